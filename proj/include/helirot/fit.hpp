#pragma once

// Bounded nonlinear least squares: projected Levenberg–Marquardt with
// optional seeded multi-start.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace helirot {

struct FitParameter {
    std::string name;
    double initial = 0.0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    bool fixed = false;
};

/// Predictions at every x for a full parameter vector (fixed ones included).
using ModelFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& params)>;
/// d prediction / d param, one column per parameter (fixed ones included).
using JacobianFunction = std::function<Eigen::MatrixXd(const Eigen::VectorXd& x, const Eigen::VectorXd& params)>;

struct FitProblem {
    std::string model_name;
    ModelFunction model;
    JacobianFunction jacobian; ///< optional; forward differences otherwise
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    std::optional<Eigen::VectorXd> sigma;
    std::vector<FitParameter> parameters;

    /// Throws ValidationError on unordered bounds, an initial value outside
    /// them, no free parameters, too few points, or mismatched sizes.
    void validate() const;
    std::size_t free_count() const;
    Eigen::VectorXd initial_values() const;
    /// Index of a parameter by name; std::out_of_range when unknown.
    std::size_t index(std::string_view name) const;
};

struct FitConfig {
    double relative_tolerance = 1e-10;
    int max_iterations = 500;
    std::uint64_t seed = 0;
    int restarts = 0; ///< extra starts drawn uniformly inside the bounds
};

struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd best_fit;
    Eigen::VectorXd uncertainty; ///< one standard deviation; zero for fixed parameters
    Eigen::MatrixXd covariance;  ///< full size, zero rows/columns for fixed parameters
    double residual_rms = 0.0;   ///< unweighted sqrt(mean((model - y)²))
    double cost = 0.0;           ///< ½ Σ (weighted residual)²
    bool converged = false;
    bool uncertainty_valid = false;
    int iterations = 0;
    int starts = 0;
    std::vector<double> cost_history; ///< accepted costs of the winning start

    double value(std::string_view name) const;
    double error(std::string_view name) const;
};

/// Runs the fit from the initial values, then from `config.restarts` seeded
/// random starts, and returns the lowest-cost run. Throws ModelError (with
/// the parameter values) when the model returns non-finite output.
FitResult least_squares(const FitProblem& problem, const FitConfig& config = {});

/// Forward-difference Jacobian over all parameters; steps stay inside bounds.
Eigen::MatrixXd numerical_jacobian(const FitProblem& problem, const Eigen::VectorXd& params);

/// Central-difference Jacobian, for checking other Jacobians.
Eigen::MatrixXd central_jacobian(const FitProblem& problem, const Eigen::VectorXd& params, double relative_step = 1e-6);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
template <class Engine>
double unit_uniform(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

} // namespace helirot
