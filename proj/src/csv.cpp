#include "helirot/csv.hpp"

#include "helirot/errors.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace helirot {

namespace {

std::vector<std::string> split_record(const std::string& line, const std::string& where) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) {
        throw ParseError(where + ": unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

std::size_t CsvDocument::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw ParseError(source + ": missing column '" + std::string(name) + "'");
}

double CsvDocument::number(std::size_t row, std::size_t col) const {
    const std::string& cell = rows.at(row).at(col);
    double value = 0.0;
    const auto* begin = cell.data();
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || cell.empty()) {
        throw ParseError(source + ":" + std::to_string(line_numbers.at(row)) + ": column '" + header.at(col) +
                         "': not a number: '" + cell + "'");
    }
    return value;
}

std::vector<double> CsvDocument::numeric_column(std::string_view name) const {
    const std::size_t col = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.push_back(number(r, col));
    }
    return out;
}

void CsvDocument::require_columns(std::initializer_list<std::string_view> names) const {
    std::size_t i = 0;
    for (auto name : names) {
        if (i >= header.size() || header[i] != name) {
            std::string expected;
            for (auto n : names) {
                expected += (expected.empty() ? "" : ",") + std::string(n);
            }
            throw ParseError(source + ": expected header '" + expected + "'");
        }
        ++i;
    }
}

CsvDocument read_csv(std::istream& in, const std::string& source) {
    CsvDocument doc;
    doc.source = source;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.starts_with('#')) {
            doc.comments.push_back(trim(line.substr(1)));
            continue;
        }
        if (trim(line).empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        auto fields = split_record(line, where);
        for (auto& f : fields) {
            f = trim(std::move(f));
        }
        if (doc.header.empty()) {
            doc.header = std::move(fields);
            continue;
        }
        if (fields.size() != doc.header.size()) {
            throw ParseError(where + ": expected " + std::to_string(doc.header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        doc.rows.push_back(std::move(fields));
        doc.line_numbers.push_back(line_no);
    }
    if (doc.header.empty()) {
        throw ParseError(source + ": missing header row");
    }
    return doc;
}

CsvDocument read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string() + ": cannot open file");
    }
    return read_csv(in, path.string());
}

void write_csv(std::ostream& out, const CsvDocument& doc) {
    for (const auto& c : doc.comments) {
        out << "# " << c << '\n';
    }
    for (std::size_t i = 0; i < doc.header.size(); ++i) {
        out << (i ? "," : "") << quote(doc.header[i]);
    }
    out << '\n';
    for (const auto& row : doc.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << quote(row[i]);
        }
        out << '\n';
    }
}

void write_csv_file(const std::filesystem::path& path, const CsvDocument& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(path.string() + ": cannot write file");
    }
    write_csv(out, doc);
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::vector<std::string> Provenance::comments() const {
    return {"tool: helirot " + tool_version, "config_hash: " + config_hash, "seed: " + std::to_string(seed)};
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

CsvDocument trace_to_csv(const LDTrace& trace, const Provenance& provenance) {
    CsvDocument doc;
    doc.comments = provenance.comments();
    if (!trace.meta.empty()) {
        doc.comments.push_back("meta: " + trace.meta);
    }
    doc.header = {"t_ps", "ld"};
    for (std::size_t i = 0; i < trace.times_ps.size(); ++i) {
        doc.rows.push_back({format_number(trace.times_ps[i]), format_number(trace.values[i])});
    }
    return doc;
}

LDTrace trace_from_csv(const CsvDocument& doc) {
    doc.require_columns({"t_ps", "ld"});
    LDTrace trace;
    trace.times_ps = doc.numeric_column("t_ps");
    trace.values = doc.numeric_column("ld");
    trace.meta = "ingested " + doc.source;
    trace.validate();
    return trace;
}

CsvDocument spectrum_to_csv(const Spectrum& spectrum, const Provenance& provenance) {
    CsvDocument doc;
    doc.comments = provenance.comments();
    doc.comments.push_back("resolution_thz: " + format_number(spectrum.resolution_thz));
    doc.header = {"freq_thz", "amplitude", "label"};
    for (std::size_t i = 0; i < spectrum.frequency_thz.size(); ++i) {
        doc.rows.push_back({format_number(spectrum.frequency_thz[i]), format_number(spectrum.amplitude[i]), ""});
    }
    return doc;
}

CsvDocument peaks_to_csv(std::span<const SpectralPeak> peaks, const Provenance& provenance) {
    CsvDocument doc;
    doc.comments = provenance.comments();
    doc.header = {"freq_thz", "amplitude", "label"};
    for (const auto& p : peaks) {
        doc.rows.push_back({format_number(p.frequency_thz), format_number(p.amplitude), p.label});
    }
    return doc;
}

std::vector<SpectralPeak> peaks_from_csv(const CsvDocument& doc) {
    doc.require_columns({"freq_thz", "amplitude", "label"});
    std::vector<SpectralPeak> peaks;
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        peaks.push_back({doc.number(r, 0), doc.number(r, 1), doc.rows[r][2]});
    }
    return peaks;
}

} // namespace helirot
