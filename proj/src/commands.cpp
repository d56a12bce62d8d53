#include "helirot/commands.hpp"

#include "helirot/errors.hpp"
#include "helirot/fit_models.hpp"
#include "helirot/units.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace helirot {

namespace {

class Report {
public:
    void add(const std::string& key, double value) { lines_ << key << " = " << format_number(value) << "\n"; }
    void add(const std::string& key, const std::string& value) { lines_ << key << " = " << value << "\n"; }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }
    std::string str() const { return lines_.str(); }

private:
    std::ostringstream lines_;
};

CsvDocument table(const Provenance& provenance, std::vector<std::string> header) {
    CsvDocument doc;
    doc.comments = provenance.comments();
    doc.header = std::move(header);
    return doc;
}

void add_row(CsvDocument& doc, std::initializer_list<double> values) {
    std::vector<std::string> row;
    for (double v : values) {
        row.push_back(format_number(v));
    }
    doc.rows.push_back(std::move(row));
}

/// y·(1 + ε·n), n ~ N(0, 1), from the run seed.
std::vector<double> with_relative_noise(std::vector<double> values, double relative, std::uint64_t seed) {
    if (relative <= 0.0) {
        return values;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : values) {
        v *= 1.0 + relative * normal(rng);
    }
    return values;
}

std::vector<double> dense_grid(double lo, double hi, std::size_t count) {
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
}

void report_fit(Report& report, const std::string& prefix, const FitResult& result) {
    for (std::size_t i = 0; i < result.names.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        report.add(prefix + result.names[i], result.best_fit[idx]);
        report.add(prefix + result.names[i] + "_error", result.uncertainty[idx]);
    }
    report.add(prefix + "residual_rms", result.residual_rms);
    report.add(prefix + "converged", result.converged);
    report.add(prefix + "uncertainty_valid", result.uncertainty_valid);
    report.add(prefix + "iterations", result.iterations);
    report.add(prefix + "starts", result.starts);
}

std::pair<std::vector<double>, std::vector<double>> read_xy(const std::filesystem::path& path, const char* x_name,
                                                            const char* y_name) {
    const auto doc = read_csv_file(path);
    doc.require_columns({x_name, y_name});
    return {doc.numeric_column(x_name), doc.numeric_column(y_name)};
}

CsvDocument xy_table(const Provenance& provenance, const char* x_name, const char* y_name,
                     const std::vector<double>& x, const std::vector<double>& y) {
    auto doc = table(provenance, {x_name, y_name});
    for (std::size_t i = 0; i < x.size(); ++i) {
        add_row(doc, {x[i], y[i]});
    }
    return doc;
}

SpectrumOptions spectrum_options(const RunConfig& config) { return config.signal.spectrum; }

void spectrum_outputs(const RunConfig& config, const LDTrace& trace, const Provenance& provenance,
                      const std::string& prefix, CommandOutput& out, Report& report) {
    const auto targets = configured_targets(config);
    double lowest = targets.front().frequency_thz;
    for (const auto& t : targets) {
        lowest = std::min(lowest, t.frequency_thz);
    }
    const auto spectrum = magnitude_spectrum(trace, spectrum_options(config));
    const auto peaks = fourier_spectrum(trace, spectrum_options(config), lowest);
    const auto labelled = label_peaks(peaks, targets, spectrum.resolution_thz);
    out.tables.emplace_back(prefix + "spectrum.csv", spectrum_to_csv(spectrum, provenance));
    out.tables.emplace_back(prefix + "peaks.csv", peaks_to_csv(labelled, provenance));
    report.add("resolution_THz", spectrum.resolution_thz);
    for (const auto& p : labelled) {
        report.add("peak." + p.label + ".frequency_THz", p.frequency_thz);
        report.add("peak." + p.label + ".amplitude", p.amplitude);
    }
}

// --- fit recipes ----------------------------------------------------------------

CommandOutput recipe_spectrum(const RunConfig& config) {
    auto out = cmd_synthesize(config);
    for (auto& [name, doc] : out.tables) {
        name = "fig1b-spectrum_" + name;
    }
    out.report_name = "fig1b-spectrum_report.txt";
    return out;
}

CommandOutput recipe_beat(const RunConfig& config, const std::optional<std::filesystem::path>& data_path) {
    const auto provenance = provenance_for(config);
    const auto& beat = config.beat;
    const VibrationalBranch branch{0, config.molecule.b(0), 1.0};
    const auto components =
        coherence_components(config.molecule, 1, config.signal.pair_weights, std::span(&branch, 1));

    LDTrace trace;
    if (data_path) {
        trace = trace_from_csv(read_csv_file(*data_path));
    } else {
        trace = synthesize_ld(components, beat.tau_ns, TimeGrid::spanning(0.0, beat.t_end_ps, beat.dt_ps));
        double scale = 0.0;
        for (const auto& c : components) {
            scale += std::abs(c.weight);
        }
        trace = add_white_noise(std::move(trace), beat.noise_relative * scale, config.seed);
    }

    const double carrier = 10.0 * config.molecule.b(0);
    std::vector<double> starts;
    for (double t = trace.times_ps.front(); t + beat.window_ps <= trace.times_ps.back() + 1e-9;
         t += beat.window_step_ps) {
        starts.push_back(t);
    }
    const auto series = sliding_window_amplitude(trace, carrier, beat.window_ps, starts);
    std::vector<double> offsets;
    for (const auto& c : components) {
        offsets.push_back((c.frequency_thz - carrier) * 1e3);
    }
    const auto fit = fit_spin_beating(series, offsets, config.fit);

    std::vector<BeatComponent> fitted = components;
    for (std::size_t k = 0; k < fitted.size(); ++k) {
        fitted[k].weight = fit.weights[k];
    }
    const double t_end = trace.times_ps.back();

    CommandOutput out;
    Report report;
    report.add("recipe", std::string("fig2b-beat"));
    report.add("data", data_path ? data_path->string() : std::string("synthetic"));
    if (!data_path) {
        report.add("true_tau_ns", beat.tau_ns);
    }
    report.add("tau_ns", fit.tau_ns);
    report.add("tau_error_ns", fit.tau_error_ns);
    report.add("linewidth_GHz", fit.linewidth_ghz);
    report_fit(report, "fit.", fit.result);
    if (const auto minimum = first_envelope_minimum(fitted, fit.tau_ns, t_end)) {
        report.add("model_first_minimum_ps", minimum->t_ps);
        report.add("model_first_minimum_depth", minimum->depth);
    }
    out.tables.emplace_back("fig2b-beat_data.csv", trace_to_csv(trace, provenance));
    out.tables.emplace_back("fig2b-beat_amplitude.csv",
                            xy_table(provenance, "t_ps", "amplitude", series.t_ps, series.amplitude));
    auto model = table(provenance, {"t_ps", "amplitude"});
    for (double t : dense_grid(0.0, t_end, 1501)) {
        add_row(model, {t, beat_envelope(t, fitted, fit.tau_ns)});
    }
    out.tables.emplace_back("fig2b-beat_model.csv", std::move(model));
    out.report = report.str();
    out.report_name = "fig2b-beat_report.txt";
    out.exit_code = fit.result.converged ? 0 : 4;
    return out;
}

CommandOutput recipe_temperature(const RunConfig& config, const std::optional<std::filesystem::path>& data_path) {
    const auto provenance = provenance_for(config);
    const auto bath = BathTable::read_file(config.bath_table);
    const auto& section = config.temperature;

    std::vector<double> temps;
    std::vector<double> ld;
    if (data_path) {
        std::tie(temps, ld) = read_xy(*data_path, "T_K", "ld");
    } else {
        temps = section.temperatures_k;
        for (double t : temps) {
            ld.push_back(ld_model(bath, t, section.delay_ps, section.params, section.ld0));
        }
        ld = with_relative_noise(std::move(ld), section.noise_relative, config.seed);
    }

    const auto neq_variant = section.params.model == DecoherenceModel::Equilibrium
                                 ? DecoherenceModel::NonequilibriumLiteral
                                 : section.params.model;
    TemperatureOptions eq_options;
    eq_options.variant = DecoherenceModel::Equilibrium;
    eq_options.t_ps = section.delay_ps;
    eq_options.ld0 = section.ld0;
    eq_options.fit_ld0 = section.fit_ld0;
    TemperatureOptions neq_options = eq_options;
    neq_options.variant = neq_variant;

    const auto eq = fit_temperature(bath, temps, ld, config.fit, eq_options);
    const auto neq = fit_temperature(bath, temps, ld, config.fit, neq_options);

    CommandOutput out;
    Report report;
    report.add("recipe", std::string("fig3-temperature"));
    report.add("data", data_path ? data_path->string() : std::string("synthetic"));
    report.add("delay_ps", section.delay_ps);
    if (!data_path) {
        report.add("true_model", to_string(section.params.model));
        report.add("true_sigma_A2", section.params.sigma_a2);
        report.add("true_w_nm", section.params.w_nm);
    }
    report.add("equilibrium.variant", to_string(eq.variant));
    report_fit(report, "equilibrium.", eq.result);
    report.add("nonequilibrium.variant", to_string(neq.variant));
    report_fit(report, "nonequilibrium.", neq.result);
    const auto op = bath.at(section.operative_temperature_k);
    report.add("operative_temperature_K", section.operative_temperature_k);
    report.add("second_sound_distance_nm", units::distance_nm(op.u2_mps, section.delay_ps));
    const double t_ref = std::clamp(1.95, bath.range().first, bath.range().second);
    report.add("gamma_equilibrium_at_1.95K_GHz", gamma_equilibrium(bath, t_ref, eq.sigma_a2));
    report.add("total_rate_N_sigma_u1_at_1.95K_GHz",
               gamma_nonequilibrium(bath, t_ref, 0.0, neq.sigma_a2, std::max(neq.w_nm, 1e-9)));

    out.tables.emplace_back("fig3-temperature_data.csv", xy_table(provenance, "T_K", "ld", temps, ld));
    auto model = table(provenance, {"T_K", "ld_equilibrium", "ld_nonequilibrium", "gamma_equilibrium_GHz",
                                    "gamma_nonequilibrium_GHz"});
    const auto [t_lo, t_hi] = std::minmax_element(temps.begin(), temps.end());
    DecoherenceParams eq_params{eq.sigma_a2, 1.0, DecoherenceModel::Equilibrium};
    DecoherenceParams neq_params{neq.sigma_a2, neq.w_nm, neq.variant};
    for (double t : dense_grid(*t_lo, *t_hi, 201)) {
        add_row(model, {t, ld_model(bath, t, section.delay_ps, eq_params, eq.ld0),
                        ld_model(bath, t, section.delay_ps, neq_params, neq.ld0),
                        gamma_model(bath, t, section.delay_ps, eq_params),
                        gamma_model(bath, t, section.delay_ps, neq_params)});
    }
    out.tables.emplace_back("fig3-temperature_model.csv", std::move(model));
    out.report = report.str();
    out.report_name = "fig3-temperature_report.txt";
    out.exit_code = eq.result.converged && neq.result.converged ? 0 : 4;
    return out;
}

CommandOutput recipe_bimolecular(const RunConfig& config, const std::optional<std::filesystem::path>& data_path) {
    const auto provenance = provenance_for(config);
    const auto bath = BathTable::read_file(config.bath_table);
    const auto& section = config.bimolecular;

    std::vector<double> temps;
    std::vector<double> intensity;
    if (data_path) {
        std::tie(temps, intensity) = read_xy(*data_path, "T_K", "intensity");
    } else {
        temps = section.temperatures_k;
        for (double t : temps) {
            intensity.push_back(bimolecular_density(bath, section.delay_ms * units::ms_to_s, t, section.params) /
                                1e13);
        }
        intensity = with_relative_noise(std::move(intensity), section.noise_relative, config.seed);
    }

    BimolecularOptions options;
    options.delay_ms = section.delay_ms;
    options.annihilation = section.params;
    options.annihilation.n0_cm3 = 1e13;
    options.free_scale = section.free_scale;
    const auto fit = fit_bimolecular(bath, temps, intensity, config.fit, options);

    CommandOutput out;
    Report report;
    report.add("recipe", std::string("figS2b-bimolecular"));
    report.add("data", data_path ? data_path->string() : std::string("synthetic"));
    report.add("delay_ms", section.delay_ms);
    report.add("K_ref_cm3_per_s", section.params.k_ref_cm3_per_s);
    report.add("T_ref_K", section.params.t_ref_k);
    if (!data_path) {
        report.add("true_N0_cm3", section.params.n0_cm3);
    }
    report.add("N0_cm3", fit.n0_cm3);
    report.add("N0_error_cm3", fit.n0_error_cm3);
    report_fit(report, "fit.", fit.result);

    out.tables.emplace_back("figS2b-bimolecular_data.csv",
                            xy_table(provenance, "T_K", "intensity", temps, intensity));
    auto model = table(provenance, {"T_K", "intensity", "density_cm3"});
    AnnihilationParams fitted = section.params;
    fitted.n0_cm3 = fit.n0_cm3;
    const auto [t_lo, t_hi] = std::minmax_element(temps.begin(), temps.end());
    for (double t : dense_grid(*t_lo, *t_hi, 161)) {
        const double n = bimolecular_density(bath, section.delay_ms * units::ms_to_s, t, fitted);
        add_row(model, {t, fit.scale * n / 1e13, n});
    }
    out.tables.emplace_back("figS2b-bimolecular_model.csv", std::move(model));
    out.report = report.str();
    out.report_name = "figS2b-bimolecular_report.txt";
    out.exit_code = fit.result.converged ? 0 : 4;
    return out;
}

CommandOutput recipe_ratio(const RunConfig& config, const std::optional<std::filesystem::path>& data_path) {
    const auto provenance = provenance_for(config);
    const auto basis = config.basis();
    const auto calibration = kick_calibration(config);
    const auto& section = config.kick_ratio;

    std::vector<double> energies;
    std::vector<double> ratios;
    if (data_path) {
        std::tie(energies, ratios) = read_xy(*data_path, "energy_uJ", "ratio");
    } else {
        energies = section.energies_uj;
        const InitialMixture truth{1.0 - section.p3 - section.p5, section.p3, section.p5};
        ratios = ld_amplitude_ratio(basis, calibration, energies, truth, config.kick_options);
        ratios = with_relative_noise(std::move(ratios), section.noise_relative, config.seed);
    }

    KickRatioOptions options;
    options.initial_p_per_uj = std::clamp(calibration.p_per_uj, 0.05, 1.2);
    options.kick = config.kick_options;
    const auto fit = fit_kick_ratio(basis, energies, ratios, config.fit, options);

    CommandOutput out;
    Report report;
    report.add("recipe", std::string("fig2a-ratio"));
    report.add("data", data_path ? data_path->string() : std::string("synthetic"));
    report.add("calibration_p_per_uJ", calibration.p_per_uj);
    if (!data_path) {
        report.add("true_p3", section.p3);
        report.add("true_p5", section.p5);
    }
    report.add("p1", fit.p1);
    report.add("p3", fit.p3);
    report.add("p3_error", fit.p3_error);
    report.add("p5", fit.p5);
    report.add("p5_error", fit.p5_error);
    report.add("p3_upper_2sigma", fit.p3 + 2.0 * fit.p3_error);
    report.add("p5_upper_2sigma", fit.p5 + 2.0 * fit.p5_error);
    report.add("p_per_uJ", fit.p_per_uj);
    report.add("identifiable", fit.identifiable);
    report_fit(report, "fit.", fit.result);

    out.tables.emplace_back("fig2a-ratio_data.csv", xy_table(provenance, "energy_uJ", "ratio", energies, ratios));
    const double e_max = *std::max_element(energies.begin(), energies.end());
    const auto grid = dense_grid(0.05 * e_max, e_max, 60);
    const InitialMixture fitted{fit.p1, fit.p3, fit.p5};
    const auto curve = ld_amplitude_ratio(basis, KickCalibration{fit.p_per_uj}, grid, fitted, config.kick_options);
    out.tables.emplace_back("fig2a-ratio_model.csv", xy_table(provenance, "energy_uJ", "ratio", grid, curve));
    out.report = report.str();
    out.report_name = "fig2a-ratio_report.txt";
    out.exit_code = fit.result.converged ? 0 : 4;
    return out;
}

} // namespace

const std::vector<std::string>& recipe_names() {
    static const std::vector<std::string> names{"fig1b-spectrum", "fig2a-ratio", "fig2b-beat", "fig3-temperature",
                                                "figS2b-bimolecular"};
    return names;
}

Provenance provenance_for(const RunConfig& config) {
    return Provenance{HELIROT_VERSION, config.hash, config.seed};
}

KickCalibration kick_calibration(const RunConfig& config) {
    if (config.kick.p_per_uj) {
        return KickCalibration{*config.kick.p_per_uj};
    }
    return calibrate_kick(config.basis(), config.kick.reference_energy_uj, config.kick.target_shell,
                          config.kick.target_population);
}

CommandOutput cmd_simulate_kick(const RunConfig& config) {
    const auto basis = config.basis();
    const auto calibration = kick_calibration(config);
    auto provenance = provenance_for(config);
    auto doc = table(provenance, {"energy_uJ", "P", "pop_N1", "pop_N3", "pop_N5", "coh13_re", "coh13_im", "coh35_re",
                                  "coh35_im"});
    doc.comments.push_back("p_per_uJ = " + format_number(calibration.p_per_uj));

    Report report;
    report.add("p_per_uJ", calibration.p_per_uj);
    for (double energy : config.kick.energies_uj) {
        const double p = calibration.strength(energy);
        const auto ensemble = kicked_ensemble(basis, config.kick.mixture, p, config.kick_options);
        const auto pops = populations(ensemble);
        const auto c13 = coherence(ensemble, 1);
        const auto c35 = coherence(ensemble, 3);
        add_row(doc, {energy, p, pops.at(1), pops.at(3), pops.at(5), c13.real(), c13.imag(), c35.real(), c35.imag()});
    }
    CommandOutput out;
    out.tables.emplace_back("kick.csv", std::move(doc));
    out.report = report.str();
    return out;
}

std::vector<BeatComponent> configured_components(const RunConfig& config) {
    const auto& s = config.signal;
    const auto branches = vibrational_branches(config.molecule, s.branch_weights);
    auto components = coherence_components(config.molecule, 1, s.pair_weights, branches);
    if (s.coherence_35_weight != 0.0) {
        const auto count = allowed_pairs(3, 5).size();
        const std::vector<double> weights(count, s.coherence_35_weight / static_cast<double>(count));
        const auto upper = coherence_components(config.molecule, 3, weights, branches);
        components.insert(components.end(), upper.begin(), upper.end());
    }
    return components;
}

std::vector<PeakTarget> configured_targets(const RunConfig& config) {
    std::vector<PeakTarget> targets;
    for (std::size_t v = 0; v < config.signal.branch_weights.size(); ++v) {
        const double b = config.molecule.b(static_cast<int>(v));
        targets.push_back({"LD13:v" + std::to_string(v), 10.0 * b});
        if (config.signal.coherence_35_weight != 0.0) {
            targets.push_back({"LD35:v" + std::to_string(v), 18.0 * b});
        }
    }
    return targets;
}

CommandOutput cmd_synthesize(const RunConfig& config) {
    const auto& s = config.signal;
    const auto components = configured_components(config);
    auto trace = synthesize_ld(components, s.tau_ns, TimeGrid::spanning(s.t_start_ps, s.t_end_ps, s.dt_ps));
    if (s.noise_relative > 0.0) {
        double scale = 0.0;
        for (const auto& c : components) {
            scale += std::abs(c.weight);
        }
        trace = add_white_noise(std::move(trace), s.noise_relative * scale, config.seed);
    }
    const auto provenance = provenance_for(config);
    CommandOutput out;
    Report report;
    report.add("components", static_cast<int>(components.size()));
    report.add("samples", static_cast<int>(trace.values.size()));
    out.tables.emplace_back("trace.csv", trace_to_csv(trace, provenance));
    spectrum_outputs(config, trace, provenance, "", out, report);
    out.report = report.str();
    return out;
}

CommandOutput cmd_spectrum(const RunConfig& config, const std::filesystem::path& trace_path) {
    const auto trace = trace_from_csv(read_csv_file(trace_path));
    CommandOutput out;
    Report report;
    report.add("trace", trace_path.string());
    spectrum_outputs(config, trace, provenance_for(config), "", out, report);
    out.report = report.str();
    return out;
}

CommandOutput cmd_fit(const RunConfig& config, const std::string& recipe,
                      const std::optional<std::filesystem::path>& data_path) {
    if (data_path && !std::filesystem::is_regular_file(*data_path)) {
        throw ValidationError("fit: data file not found: " + data_path->string());
    }
    if (recipe == "fig1b-spectrum") {
        if (data_path) {
            throw ValidationError("fit: fig1b-spectrum takes no data file; use `spectrum` for a measured trace");
        }
        return recipe_spectrum(config);
    }
    if (recipe == "fig2a-ratio") {
        return recipe_ratio(config, data_path);
    }
    if (recipe == "fig2b-beat") {
        return recipe_beat(config, data_path);
    }
    if (recipe == "fig3-temperature") {
        return recipe_temperature(config, data_path);
    }
    if (recipe == "figS2b-bimolecular") {
        return recipe_bimolecular(config, data_path);
    }
    std::string known;
    for (const auto& name : recipe_names()) {
        known += (known.empty() ? "" : ", ") + name;
    }
    throw ValidationError("fit: unknown recipe '" + recipe + "' (known: " + known + ")");
}

CommandOutput cmd_validate(const RunConfig& config) {
    std::ostringstream lines;
    int failures = 0;
    auto check = [&](bool ok, const std::string& name, const std::string& detail) {
        lines << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        failures += ok ? 0 : 1;
    };
    auto warn = [&](const std::string& name, const std::string& detail) {
        lines << "WARN " << name << ": " << detail << "\n";
    };

    try {
        const auto bath = BathTable::read_file(config.bath_table);
        const auto problems = check_bath_invariants(bath);
        for (const auto& p : problems) {
            check(false, "bath_table", p);
        }
        if (problems.empty()) {
            std::ostringstream detail;
            detail << bath.rows().size() << " rows, u2 maximum at " << format_number(bath.u2_maximum_temperature())
                   << " K, normal fraction monotone";
            check(true, "bath_table", detail.str());
        }
    } catch (const Error& e) {
        check(false, "bath_table", e.what());
    }

    for (int n : {1, 3}) {
        const auto closed = fine_levels(n, config.molecule);
        const auto diag = fine_levels_diagonalized(n, config.molecule);
        double mismatch = 0.0;
        for (std::size_t i = 0; i < closed.size(); ++i) {
            mismatch = std::max(mismatch, std::abs(closed[i].offset_ghz - diag[i].offset_ghz));
        }
        const double split = splitting_ghz(closed);
        const std::string name = "fine_structure.N" + std::to_string(n);
        check(mismatch < 1e-6, name, "closed form vs diagonalization differ by " + format_number(mismatch) + " GHz");
        if (split > 10.0) {
            warn(name, "splitting " + format_number(split) +
                           " GHz is far above the ~2 GHz scale of the He2* triplet fine structure");
        } else {
            lines << "INFO " << name << ": splitting " << format_number(split) << " GHz\n";
        }
    }

    try {
        const auto basis = config.basis();
        const auto calibration = kick_calibration(config);
        double e_max = config.kick.reference_energy_uj;
        for (double e : config.kick.energies_uj) {
            e_max = std::max(e_max, e);
        }
        const double p = calibration.strength(e_max);
        const auto ensemble = kicked_ensemble(basis, InitialMixture{0.0, 0.0, 1.0}, p, config.kick_options);
        double leak = 0.0;
        for (const auto& member : ensemble) {
            leak = std::max(leak, guard_shell_population(member.state));
        }
        check(true, "basis", "n_max = " + std::to_string(config.n_max) + ", guard-shell population " +
                                 format_number(leak) + " at P = " + format_number(p) + " from N = 5");
    } catch (const Error& e) {
        check(false, "basis", e.what());
    }

    CommandOutput out;
    out.report = lines.str();
    out.report_name = "validate_report.txt";
    out.exit_code = failures == 0 ? 0 : 2;
    return out;
}

std::vector<std::filesystem::path> write_outputs(const CommandOutput& output, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    std::vector<std::filesystem::path> written;
    for (const auto& [name, doc] : output.tables) {
        const auto path = directory / name;
        write_csv_file(path, doc);
        written.push_back(path);
    }
    if (!output.report_name.empty()) {
        const auto path = directory / output.report_name;
        std::ofstream out(path, std::ios::binary);
        out << output.report;
        if (!out) {
            throw Error("cannot write " + path.string());
        }
        written.push_back(path);
    }
    return written;
}

} // namespace helirot
