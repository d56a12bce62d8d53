#include "helirot/commands.hpp"
#include "helirot/errors.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

using namespace helirot;

namespace {

const std::filesystem::path source_dir{HELIROT_SOURCE_DIR};

RunConfig shipped() { return load_config(source_dir / "config" / "default.json"); }

std::string text_of(const CsvDocument& doc) {
    std::ostringstream out;
    write_csv(out, doc);
    return out.str();
}

const CsvDocument& table_named(const CommandOutput& out, const std::string& name) {
    for (const auto& [n, doc] : out.tables) {
        if (n == name) {
            return doc;
        }
    }
    FAIL("no table " << name);
    throw std::logic_error("unreachable");
}

std::map<std::string, std::string> parse_report(const std::string& report) {
    std::map<std::string, std::string> kv;
    std::istringstream in(report);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) {
            kv[line.substr(0, eq)] = line.substr(eq + 3);
        }
    }
    return kv;
}

double report_number(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    REQUIRE_MESSAGE(it != kv.end(), "missing report key " << key);
    return std::stod(it->second);
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("helirot_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(HELIROT_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("simulate-kick: zero energy leaves N = 1, 3.5 uJ puts more than 15% in N = 3") {
    const auto cfg = shipped();
    const auto out = cmd_simulate_kick(cfg);
    const auto& doc = table_named(out, "kick.csv");
    CHECK(doc.header == std::vector<std::string>{"energy_uJ", "P", "pop_N1", "pop_N3", "pop_N5", "coh13_re",
                                                 "coh13_im", "coh35_re", "coh35_im"});
    CHECK(doc.number(0, 0) == 0.0);
    CHECK(doc.number(0, 2) == doctest::Approx(1.0).epsilon(1e-14));
    bool found = false;
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        if (doc.number(r, 0) == 3.5) {
            found = true;
            CHECK(doc.number(r, 3) > 0.15);
            CHECK(doc.number(r, 4) == doctest::Approx(0.02).epsilon(1e-4));
        }
    }
    CHECK(found);
    CHECK(text_of(doc) == text_of(table_named(cmd_simulate_kick(cfg), "kick.csv")));
}

TEST_CASE("synthesize: 2.27 THz and 4.08 THz peaks within resolution") {
    const auto out = cmd_synthesize(shipped());
    const auto peaks = peaks_from_csv(table_named(out, "peaks.csv"));
    const auto kv = parse_report(out.report);
    const double resolution = report_number(kv, "resolution_THz");
    std::map<std::string, double> freq;
    for (const auto& p : peaks) {
        freq[p.label] = p.frequency_thz;
    }
    REQUIRE(freq.count("LD13:v0"));
    REQUIRE(freq.count("LD35:v0"));
    CHECK(std::abs(freq["LD13:v0"] - 2.27) <= resolution);
    CHECK(std::abs(freq["LD35:v0"] - 4.08) <= resolution);
    const auto trace = trace_from_csv(table_named(out, "trace.csv"));
    CHECK(trace.times_ps.size() == 5001);
}

TEST_CASE("synthesize without the (3,5) line has no 4.08 THz target") {
    auto cfg = shipped();
    cfg.signal.coherence_35_weight = 0.0;
    const auto peaks = peaks_from_csv(table_named(cmd_synthesize(cfg), "peaks.csv"));
    for (const auto& p : peaks) {
        CHECK(p.label.rfind("LD35", 0) == std::string::npos);
    }
}

TEST_CASE("spectrum of a written trace reproduces the synthesized spectrum") {
    const auto cfg = shipped();
    const auto synth = cmd_synthesize(cfg);
    const auto dir = scratch_dir("spectrum");
    write_outputs(synth, dir);
    const auto again = cmd_spectrum(cfg, dir / "trace.csv");
    CHECK(text_of(table_named(again, "spectrum.csv")) == text_of(table_named(synth, "spectrum.csv")));
    CHECK(text_of(table_named(again, "peaks.csv")) == text_of(table_named(synth, "peaks.csv")));
}

TEST_CASE("fit fig2b-beat recovers tau within 5%") {
    const auto out = cmd_fit(shipped(), "fig2b-beat", std::nullopt);
    const auto kv = parse_report(out.report);
    CHECK(out.exit_code == 0);
    CHECK(report_number(kv, "tau_ns") == doctest::Approx(1.0).epsilon(0.05));
    CHECK(report_number(kv, "linewidth_GHz") == doctest::Approx(0.318).epsilon(0.06));
    CHECK(kv.count("fit.residual_rms"));
}

TEST_CASE("fit fig3-temperature: non-equilibrium beats equilibrium") {
    const auto out = cmd_fit(shipped(), "fig3-temperature", std::nullopt);
    const auto kv = parse_report(out.report);
    CHECK(out.exit_code == 0);
    CHECK(report_number(kv, "nonequilibrium.residual_rms") < report_number(kv, "equilibrium.residual_rms"));
    CHECK(report_number(kv, "nonequilibrium.sigma_A2") == doctest::Approx(0.025).epsilon(0.15));
    CHECK(report_number(kv, "nonequilibrium.w_nm") == doctest::Approx(22.0).epsilon(0.15));
    CHECK(kv.at("equilibrium.variant") == "equilibrium");
    CHECK(kv.at("nonequilibrium.variant") == "nonequilibrium-literal");
    const auto& model = table_named(out, "fig3-temperature_model.csv");
    CHECK(model.header.size() == 5);
}

TEST_CASE("fit figS2b-bimolecular and fig2a-ratio on synthetic data") {
    const auto cfg = shipped();
    const auto bi = parse_report(cmd_fit(cfg, "figS2b-bimolecular", std::nullopt).report);
    CHECK(report_number(bi, "N0_cm3") == doctest::Approx(1.9e13).epsilon(0.05));
    const auto ratio = parse_report(cmd_fit(cfg, "fig2a-ratio", std::nullopt).report);
    CHECK(report_number(ratio, "p3") <= 0.05);
    CHECK(report_number(ratio, "p5") <= 0.002);
    CHECK(report_number(ratio, "p5") <= report_number(ratio, "p3") + 1e-15);
}

TEST_CASE("fit from a data file matches the synthetic run that wrote it") {
    const auto cfg = shipped();
    const auto synthetic = cmd_fit(cfg, "figS2b-bimolecular", std::nullopt);
    const auto dir = scratch_dir("fitdata");
    write_outputs(synthetic, dir);
    const auto from_file = cmd_fit(cfg, "figS2b-bimolecular", dir / "figS2b-bimolecular_data.csv");
    CHECK(report_number(parse_report(from_file.report), "N0_cm3") ==
          report_number(parse_report(synthetic.report), "N0_cm3"));
}

TEST_CASE("fit errors: unknown recipe, missing data file, malformed data") {
    const auto cfg = shipped();
    CHECK_THROWS_AS(cmd_fit(cfg, "fig9", std::nullopt), ValidationError);
    CHECK_THROWS_AS(cmd_fit(cfg, "fig3-temperature", std::filesystem::path("/nonexistent/data.csv")),
                    ValidationError);
    const auto dir = scratch_dir("baddata");
    {
        std::ofstream f(dir / "bad.csv");
        f << "T_K,ld\n1.5,0.5\n1.6,zero\n";
    }
    try {
        cmd_fit(cfg, "fig3-temperature", dir / "bad.csv");
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bad.csv:3") != std::string::npos);
    }
}

TEST_CASE("validate: shipped config passes; broken tables and huge splittings are reported") {
    const auto ok = cmd_validate(shipped());
    CHECK(ok.exit_code == 0);
    CHECK(ok.report.find("FAIL") == std::string::npos);

    const auto dir = scratch_dir("validate");
    {
        std::ifstream in(source_dir / "data" / "he4_svp_properties.csv");
        std::ofstream out(dir / "table.csv");
        std::string line;
        int data_row = -1;
        std::string held;
        while (std::getline(in, line)) {
            if (line.starts_with('#') || line.starts_with("T_K")) {
                out << line << "\n";
                continue;
            }
            ++data_row;
            if (data_row == 3) {
                held = line;
                continue;
            }
            out << line << "\n";
            if (data_row == 4) {
                out << held << "\n";
            }
        }
    }
    auto cfg = shipped();
    cfg.bath_table = dir / "table.csv";
    const auto bad = cmd_validate(cfg);
    CHECK(bad.exit_code == 2);
    CHECK(bad.report.find("row 4") != std::string::npos);

    auto wide = shipped();
    wide.molecule.lambda_ss_ghz = -30.0;
    const auto warned = cmd_validate(wide);
    CHECK(warned.report.find("WARN fine_structure") != std::string::npos);
    CHECK(warned.report.find("2 GHz") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs and regenerate after deletion") {
    const auto cfg = shipped();
    const auto dir = scratch_dir("determinism");
    const auto first = write_outputs(cmd_fit(cfg, "fig2b-beat", std::nullopt), dir);
    std::map<std::filesystem::path, std::string> contents;
    for (const auto& p : first) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        contents[p] = s.str();
    }
    std::filesystem::remove(first.front());
    write_outputs(cmd_fit(cfg, "fig2b-beat", std::nullopt), dir);
    for (const auto& [p, text] : contents) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        CHECK(s.str() == text);
    }
}

TEST_CASE("CLI exit codes") {
    const auto dir = scratch_dir("cli");
    const std::string config = "--config " + (source_dir / "config" / "default.json").string();
    CHECK(run_cli("validate " + config + " --out " + dir.string()) == 0);
    CHECK(std::filesystem::exists(dir / "validate_report.txt"));
    CHECK(run_cli("simulate-kick " + config + " --out " + dir.string() + " --seed 3") == 0);
    {
        std::ifstream in(dir / "kick.csv");
        std::string first;
        std::getline(in, first);
        CHECK(first == "# tool: helirot " HELIROT_VERSION);
    }
    {
        std::ofstream f(dir / "broken.json");
        f << "{ \"seed\": ";
    }
    CHECK(run_cli("validate --config " + (dir / "broken.json").string()) == 3);
    {
        std::ofstream f(dir / "unknown.json");
        f << "{ \"sed\": 4 }";
    }
    CHECK(run_cli("validate --config " + (dir / "unknown.json").string()) == 2);
    CHECK(run_cli("fit fig9 --out " + dir.string()) == 2);
    CHECK(run_cli("fit fig3-temperature --data /nonexistent.csv --out " + dir.string()) == 2);
    CHECK(run_cli("no-such-command") == 2);
}
