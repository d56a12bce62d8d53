#pragma once

#include <stdexcept>
#include <string>

namespace helirot {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs violate a documented precondition or invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file (CSV, config). Messages carry path and line.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Table lookup outside the tabulated range; never extrapolated.
class RangeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Wave packet leaked into the guard shells of a truncated basis.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Time integration failed its step-size or norm contract.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// A model quantity is undefined for the given inputs (e.g. a ratio with zero denominator).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Data cannot constrain the requested parameters.
class NonIdentifiableError : public Error {
public:
    using Error::Error;
};

} // namespace helirot
