// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit when
// any criterion fails.

#include "helirot/bath.hpp"
#include "helirot/commands.hpp"
#include "helirot/fine_structure.hpp"
#include "helirot/rotor.hpp"
#include "helirot/units.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

using namespace helirot;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

const std::filesystem::path source_dir{HELIROT_SOURCE_DIR};

RunConfig shipped() { return load_config(source_dir / "config" / "default.json"); }

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
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

double number(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw std::runtime_error("report lacks " + key);
    }
    return std::stod(it->second);
}

const CsvDocument& table_named(const CommandOutput& out, const std::string& name) {
    for (const auto& [n, doc] : out.tables) {
        if (n == name) {
            return doc;
        }
    }
    throw std::runtime_error("missing table " + name);
}

std::string text_of(const CsvDocument& doc) {
    std::ostringstream out;
    write_csv(out, doc);
    return out.str();
}

Outcome beat_frequency_anchors() {
    const auto out = cmd_synthesize(shipped());
    const auto kv = parse_report(out.report);
    const double resolution = number(kv, "resolution_THz");
    const double f13 = number(kv, "peak.LD13:v0.frequency_THz");
    const double f35 = number(kv, "peak.LD35:v0.frequency_THz");
    const bool pass = std::abs(f13 - 2.27) <= resolution && std::abs(f35 - 4.08) <= resolution;
    return {pass, "(1,3) " + fmt(f13) + " THz, (3,5) " + fmt(f35) + " THz, resolution " + fmt(resolution) + " THz"};
}

Outcome kick_populations() {
    const auto config = shipped();
    const auto basis = config.basis();
    const auto calibration = calibrate_kick(basis, 3.5, 5, 0.02);
    const double p = calibration.strength(3.5);
    const auto pops = populations(kicked_ensemble(basis, InitialMixture{}, p, config.kick_options));
    const double p3 = pops.at(3);
    const double p5 = pops.at(5);
    KickOptions unguarded;
    unguarded.leakage_tolerance = 1.0;
    const RotorBasis small(11, Parity::OddOnly);
    const auto pops11 = populations(kicked_ensemble(small, InitialMixture{}, p, unguarded));
    const double leak11 = pops11.at(9) + pops11.at(11);
    return {p3 > 0.15 && p5 >= 0.01 && p5 <= 0.04,
            "P = " + fmt(p) + ", pop(N=3) = " + fmt(p3) + ", pop(N=5) = " + fmt(p5) + " at n_max = " +
                std::to_string(basis.n_max()) + " (n_max = 11 guard-shell population " + fmt(leak11, 2) + ")"};
}

Outcome oracle_equivalence() {
    const RotorBasis basis(21, Parity::OddOnly);
    const auto constants = MoleculeConstants::helium_excimer();
    double worst = 0.0;
    double worst_p = 0.0;
    double worst_fwhm = 0.0;
    double drift = 0.0;
    for (double fwhm : {25.0, 50.0, 100.0}) {
        for (double p : {1.0, 3.0, 5.0}) {
            KickPulse pulse;
            pulse.duration_fwhm_fs = fwhm;
            pulse.kick_strength = p;
            for (int m : {-1, 0, 1}) {
                const auto psi = WavePacket::eigenstate(basis, 1, m, -1.0);
                const auto tdse = evolve_tdse(psi, pulse, constants, fwhm / 40.0);
                const auto impulsive = apply_impulsive_kick(psi, p);
                drift = std::max(drift, std::abs(tdse.norm() - 1.0));
                const auto a = populations(tdse);
                const auto b = populations(impulsive);
                for (const auto& [n, pop] : a) {
                    const double d = std::abs(pop - b.at(n));
                    if (d > worst) {
                        worst = d;
                        worst_p = p;
                        worst_fwhm = fwhm;
                    }
                }
            }
        }
    }
    return {worst <= 0.02 && drift < 1e-8,
            "max population difference " + fmt(worst) + " (P = " + fmt(worst_p) + ", " + fmt(worst_fwhm) +
                " fs), norm drift " + fmt(drift, 2)};
}

Outcome pair_enumeration() {
    const auto pairs = allowed_pairs(1, 3);
    const std::vector<TransitionPair> expected{{0, 2}, {0, 4}, {1, 3}, {2, 2}, {2, 4}};
    const auto constants = MoleculeConstants::helium_excimer();
    double lo = 1e9;
    double hi = 0.0;
    for (int n : {1, 3}) {
        const double s = splitting_ghz(fine_levels(n, constants));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return {pairs == expected && lo >= 1.0 && hi <= 5.0,
            std::to_string(pairs.size()) + " pairs, splittings " + fmt(lo) + " to " + fmt(hi) + " GHz"};
}

Outcome beat_envelope_round_trip() {
    const auto kv = parse_report(cmd_fit(shipped(), "fig2b-beat", std::nullopt).report);
    const double tau = number(kv, "tau_ns");
    const bool has_minimum = kv.count("model_first_minimum_ps") > 0;
    const double t_min = has_minimum ? number(kv, "model_first_minimum_ps") : -1.0;
    const double depth = has_minimum ? number(kv, "model_first_minimum_depth") : 1.0;
    const bool pass = std::abs(tau - 1.0) <= 0.05 && t_min >= 450.0 && t_min <= 550.0 && depth < 0.5;
    return {pass, "tau = " + fmt(tau) + " ns, first minimum at " + fmt(t_min) + " ps (depth " + fmt(depth, 3) + ")"};
}

double slope(const BathTable& bath, const DecoherenceParams& params, double t_k) {
    const double h = 1e-3;
    return (ld_model(bath, t_k + h, 850.0, params, 1.0) - ld_model(bath, t_k - h, 850.0, params, 1.0)) / (2.0 * h);
}

Outcome temperature_models() {
    const auto config = shipped();
    const auto bath = BathTable::read_file(config.bath_table);
    const DecoherenceParams params{2.5e-2, 22.0, DecoherenceModel::NonequilibriumLiteral};
    double flat = 0.0;
    for (double t = 1.41; t < 1.8; t += 0.01) {
        flat = std::max(flat, std::abs(slope(bath, params, t)));
    }
    double steep = 0.0;
    for (double t = 1.91; t < 2.1; t += 0.01) {
        steep = std::max(steep, std::abs(slope(bath, params, t)));
    }
    const double rate = gamma_nonequilibrium(bath, 1.95, 0.0, params.sigma_a2, params.w_nm);
    const auto kv = parse_report(cmd_fit(config, "fig3-temperature", std::nullopt).report);
    const double sigma = number(kv, "nonequilibrium.sigma_A2");
    const double w = number(kv, "nonequilibrium.w_nm");
    const bool pass = steep >= 2.0 * flat && rate >= 0.5 && rate <= 2.0 && std::abs(sigma / 2.5e-2 - 1.0) <= 0.15 &&
                      std::abs(w / 22.0 - 1.0) <= 0.15;
    return {pass, "max |dLD/dT| " + fmt(flat) + " on (1.4,1.8) vs " + fmt(steep) + " on (1.9,2.1), rate at 1.95 K " +
                      fmt(rate) + " GHz, fit sigma = " + fmt(sigma) + " A^2, w = " + fmt(w) + " nm"};
}

Outcome second_sound_distance() {
    const auto kv = parse_report(cmd_fit(shipped(), "fig3-temperature", std::nullopt).report);
    const double d = number(kv, "second_sound_distance_nm");
    return {std::abs(d / 17.0 - 1.0) <= 0.2,
            fmt(d) + " nm at " + fmt(number(kv, "operative_temperature_K")) + " K"};
}

Outcome bimolecular_fit() {
    const auto out = cmd_fit(shipped(), "figS2b-bimolecular", std::nullopt);
    const double n0 = number(parse_report(out.report), "N0_cm3");
    const auto& model = table_named(out, "figS2b-bimolecular_model.csv");
    const auto intensity = model.numeric_column("intensity");
    const bool monotone = std::is_sorted(intensity.begin(), intensity.end()) &&
                          std::adjacent_find(intensity.begin(), intensity.end()) == intensity.end();
    return {std::abs(n0 / 1.9e13 - 1.0) <= 0.05 && monotone,
            "N0 = " + fmt(n0) + " cm^-3, model intensity " + (monotone ? "increasing" : "not increasing") + " in T"};
}

Outcome separation_sanity() {
    const auto estimate = separation_and_displacement(2e13, 1e-4, 1e-3);
    return {estimate.separation_nm > 300.0, "mean separation " + fmt(estimate.separation_nm) + " nm"};
}

Outcome determinism_and_round_trip() {
    const auto config = shipped();
    auto run_all = [&] {
        std::vector<CommandOutput> outs;
        outs.push_back(cmd_simulate_kick(config));
        outs.push_back(cmd_synthesize(config));
        for (const auto& recipe : recipe_names()) {
            outs.push_back(cmd_fit(config, recipe, std::nullopt));
        }
        outs.push_back(cmd_validate(config));
        return outs;
    };
    const auto first = run_all();
    const auto second = run_all();
    std::size_t tables = 0;
    std::size_t mismatched = 0;
    std::size_t lossy = 0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        if (first[i].report != second[i].report || first[i].tables.size() != second[i].tables.size()) {
            ++mismatched;
            continue;
        }
        for (std::size_t j = 0; j < first[i].tables.size(); ++j) {
            ++tables;
            const auto text = text_of(first[i].tables[j].second);
            if (text != text_of(second[i].tables[j].second)) {
                ++mismatched;
            }
            std::istringstream in(text);
            const auto back = read_csv(in, first[i].tables[j].first);
            bool same = text_of(back) == text && back.header == first[i].tables[j].second.header;
            for (std::size_t r = 0; same && r < back.rows.size(); ++r) {
                for (std::size_t c = 0; c < back.header.size(); ++c) {
                    const auto& cell = back.rows[r][c];
                    if (!cell.empty() && (std::isdigit(static_cast<unsigned char>(cell[0])) || cell[0] == '-')) {
                        same = same && format_number(back.number(r, c)) == cell;
                    }
                }
            }
            lossy += same ? 0 : 1;
        }
    }
    return {mismatched == 0 && lossy == 0, std::to_string(tables) + " tables, " + std::to_string(mismatched) +
                                               " differ between runs, " + std::to_string(lossy) +
                                               " not re-ingested losslessly"};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double budget_s;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "beat-frequency anchors", 1.0, beat_frequency_anchors},
        {2, "kick populations", 1.0, kick_populations},
        {3, "impulsive vs finite-duration populations", 10.0, oracle_equivalence},
        {4, "pair enumeration and fine-structure scale", 0.0, pair_enumeration},
        {5, "beat-envelope fit round trip", 30.0, beat_envelope_round_trip},
        {6, "temperature models", 60.0, temperature_models},
        {7, "second-sound distance", 0.0, second_sound_distance},
        {8, "bimolecular fit", 10.0, bimolecular_fit},
        {9, "separation sanity", 0.0, separation_sanity},
        {10, "determinism and CSV round trip", 0.0, determinism_and_round_trip},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("error: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0 && seconds > c.budget_s) {
            outcome.pass = false;
            outcome.detail += ", over the " + fmt(c.budget_s) + " s budget";
        }
        failures += outcome.pass ? 0 : 1;
        std::printf("[%s] AC%d %s: %s (%.2f s)\n", outcome.pass ? "PASS" : "FAIL", c.id, c.title,
                    outcome.detail.c_str(), seconds);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
