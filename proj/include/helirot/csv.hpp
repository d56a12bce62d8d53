#pragma once

// Plain CSV with '#' comment lines, a mandatory header row and RFC 4180
// quoting. Numbers are written in shortest round-trip form.

#include "helirot/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace helirot {

struct CsvDocument {
    std::vector<std::string> comments; ///< text after the leading '#'
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers; ///< source line of each row (1-based)
    std::string source;

    /// Throws ParseError when the column is absent.
    std::size_t column(std::string_view name) const;
    /// Throws ParseError naming source, line and column on malformed numbers.
    double number(std::size_t row, std::size_t col) const;
    std::vector<double> numeric_column(std::string_view name) const;
    /// Throws ParseError unless the header starts with exactly these names.
    void require_columns(std::initializer_list<std::string_view> names) const;
};

CsvDocument read_csv(std::istream& in, const std::string& source);
CsvDocument read_csv_file(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvDocument& doc);
void write_csv_file(const std::filesystem::path& path, const CsvDocument& doc);

/// Shortest decimal string that parses back to the same double.
std::string format_number(double value);

/// Header lines recorded in every emitted CSV.
struct Provenance {
    std::string tool_version;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<std::string> comments() const;
};

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string content_hash(std::string_view bytes);

CsvDocument trace_to_csv(const LDTrace& trace, const Provenance& provenance);
LDTrace trace_from_csv(const CsvDocument& doc);
CsvDocument spectrum_to_csv(const Spectrum& spectrum, const Provenance& provenance);
CsvDocument peaks_to_csv(std::span<const SpectralPeak> peaks, const Provenance& provenance);
std::vector<SpectralPeak> peaks_from_csv(const CsvDocument& doc);

} // namespace helirot
