#include "helirot/config.hpp"

#include "helirot/csv.hpp"
#include "helirot/errors.hpp"
#include "helirot/units.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace helirot {

namespace {

using nlohmann::json;

// A JSON object being consumed key by key; whatever is left over when
// finish() runs is an unknown key.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            fail(path_.empty() ? "top level" : path_, "expected an object");
        }
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    template <class T>
    void read(const std::string& key, T& out) {
        if (!node_.contains(key)) {
            return;
        }
        used_.insert(key);
        try {
            out = node_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(where(key), "has the wrong type");
        }
    }

    template <class T>
    void read(const std::string& key, std::optional<T>& out) {
        if (node_.contains(key) && !node_.at(key).is_null()) {
            T value{};
            read(key, value);
            out = value;
        } else if (node_.contains(key)) {
            used_.insert(key);
        }
    }

    Section child(const std::string& key) {
        used_.insert(key);
        return Section(node_.contains(key) ? node_.at(key) : empty(), where(key));
    }

    void finish() const {
        for (const auto& item : node_.items()) {
            if (!used_.count(item.key())) {
                fail(where(item.key()), "unknown key");
            }
        }
    }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] static void fail(const std::string& where, const std::string& what) {
        throw ValidationError("config: " + where + ": " + what);
    }

private:
    static const json& empty() {
        static const json object = json::object();
        return object;
    }

    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& where, const std::string& what) {
    if (!ok) {
        Section::fail(where, what);
    }
}

void require_positive(double value, const std::string& where) { require(value > 0.0, where, "must be positive"); }

void require_fraction(double value, const std::string& where) {
    require(value >= 0.0 && value <= 1.0, where, "must lie in [0, 1]");
}

void require_nonnegative(double value, const std::string& where) {
    require(value >= 0.0 && std::isfinite(value), where, "must be non-negative");
}

std::vector<double> arange(double start, double stop, double step) {
    std::vector<double> out;
    const auto count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) {
        out.push_back(start + step * i);
    }
    return out;
}

void read_molecule(Section s, RunConfig& cfg) {
    s.read("B_THz", cfg.molecule.b_thz);
    s.read("delta_alpha_A3", cfg.molecule.delta_alpha_a3);
    s.read("lambda_ss_GHz", cfg.molecule.lambda_ss_ghz);
    s.read("gamma_sr_GHz", cfg.molecule.gamma_sr_ghz);
    s.finish();
    try {
        cfg.molecule.validate();
    } catch (const ValidationError& e) {
        Section::fail("molecule", e.what());
    }
}

void read_basis(Section s, RunConfig& cfg) {
    std::string parity = cfg.parity == Parity::OddOnly ? "odd" : "all";
    s.read("n_max", cfg.n_max);
    s.read("parity", parity);
    s.finish();
    require(parity == "odd" || parity == "all", s.where("parity"), "must be \"odd\" or \"all\"");
    cfg.parity = parity == "odd" ? Parity::OddOnly : Parity::All;
    require(cfg.n_max >= 7, s.where("n_max"), "must be at least 7 (N = 5 plus two guard shells)");
    require(cfg.parity == Parity::All || cfg.n_max % 2 == 1, s.where("n_max"), "must be odd for the odd-only basis");
}

void read_pulse(Section s, RunConfig& cfg) {
    auto& p = cfg.pulse;
    double polarization_deg = p.polarization_angle_rad * 180.0 / units::pi;
    s.read("energy_uJ", p.energy_uj);
    s.read("peak_intensity_Wcm2", p.peak_intensity_wcm2);
    s.read("duration_fs", p.duration_fwhm_fs);
    s.read("polarization_deg", polarization_deg);
    s.read("center_ps", p.center_ps);
    s.read("waist_um", p.waist_um);
    s.read("kick_strength", p.kick_strength);
    s.read("leakage_tolerance", cfg.kick_options.leakage_tolerance);
    s.finish();
    p.polarization_angle_rad = polarization_deg * units::pi / 180.0;
    require_positive(cfg.kick_options.leakage_tolerance, s.where("leakage_tolerance"));
    try {
        p.validate();
    } catch (const ValidationError& e) {
        Section::fail("pulse", e.what());
    }
}

void read_mixture(Section s, InitialMixture& m) {
    s.read("p1", m.p1);
    s.read("p3", m.p3);
    s.read("p5", m.p5);
    s.finish();
    try {
        m.validate();
    } catch (const ValidationError& e) {
        Section::fail("kick.initial_mixture", e.what());
    }
}

void read_kick(Section s, RunConfig& cfg) {
    auto& k = cfg.kick;
    s.read("energies_uJ", k.energies_uj);
    s.read("reference_energy_uJ", k.reference_energy_uj);
    s.read("target_shell", k.target_shell);
    s.read("target_population", k.target_population);
    s.read("p_per_uJ", k.p_per_uj);
    read_mixture(s.child("initial_mixture"), k.mixture);
    s.finish();
    require(!k.energies_uj.empty(), s.where("energies_uJ"), "must not be empty");
    for (double e : k.energies_uj) {
        require_nonnegative(e, s.where("energies_uJ"));
    }
    require_positive(k.reference_energy_uj, s.where("reference_energy_uJ"));
    require(k.target_shell >= 3 && k.target_shell < cfg.n_max - 2, s.where("target_shell"),
            "must be at least 3 and below the guard shells");
    require(k.target_population > 0.0 && k.target_population < 1.0, s.where("target_population"),
            "must lie in (0, 1)");
    if (k.p_per_uj) {
        require_positive(*k.p_per_uj, s.where("p_per_uJ"));
    }
}

void read_spectrum(Section s, SpectrumOptions& o) {
    std::string window = o.window == Window::Hann ? "hann" : "none";
    s.read("window", window);
    s.read("zero_pad", o.zero_pad);
    s.read("min_relative_amplitude", o.min_relative_amplitude);
    s.finish();
    require(window == "hann" || window == "none", s.where("window"), "must be \"hann\" or \"none\"");
    o.window = window == "hann" ? Window::Hann : Window::None;
    require(o.zero_pad >= 1, s.where("zero_pad"), "must be at least 1");
    require(o.min_relative_amplitude > 0.0 && o.min_relative_amplitude < 1.0, s.where("min_relative_amplitude"),
            "must lie in (0, 1)");
}

void read_signal(Section s, RunConfig& cfg) {
    auto& g = cfg.signal;
    s.read("pair_weights", g.pair_weights);
    s.read("coherence_35_weight", g.coherence_35_weight);
    s.read("branch_weights", g.branch_weights);
    s.read("tau_ns", g.tau_ns);
    s.read("t_start_ps", g.t_start_ps);
    s.read("t_end_ps", g.t_end_ps);
    s.read("dt_ps", g.dt_ps);
    s.read("noise_relative", g.noise_relative);
    read_spectrum(s.child("spectrum"), g.spectrum);
    s.finish();
    require(g.pair_weights.size() == 5, s.where("pair_weights"), "needs one weight per allowed (1,3) pair (5)");
    require(!g.branch_weights.empty() && g.branch_weights.size() <= cfg.molecule.b_thz.size(),
            s.where("branch_weights"), "needs between 1 and len(molecule.B_THz) entries");
    for (double w : g.branch_weights) {
        require_nonnegative(w, s.where("branch_weights"));
    }
    require_positive(g.tau_ns, s.where("tau_ns"));
    require(g.t_end_ps > g.t_start_ps, s.where("t_end_ps"), "must exceed t_start_ps");
    require_positive(g.dt_ps, s.where("dt_ps"));
    require_nonnegative(g.noise_relative, s.where("noise_relative"));
}

void read_beat(Section s, RunConfig& cfg) {
    auto& b = cfg.beat;
    s.read("tau_ns", b.tau_ns);
    s.read("t_end_ps", b.t_end_ps);
    s.read("dt_ps", b.dt_ps);
    s.read("noise_relative", b.noise_relative);
    s.read("window_ps", b.window_ps);
    s.read("window_step_ps", b.window_step_ps);
    s.finish();
    require_positive(b.tau_ns, s.where("tau_ns"));
    require_positive(b.t_end_ps, s.where("t_end_ps"));
    require_positive(b.dt_ps, s.where("dt_ps"));
    require_nonnegative(b.noise_relative, s.where("noise_relative"));
    require_positive(b.window_ps, s.where("window_ps"));
    require_positive(b.window_step_ps, s.where("window_step_ps"));
}

void read_temperature(Section s, RunConfig& cfg) {
    auto& t = cfg.temperature;
    std::string model = to_string(t.params.model);
    s.read("model", model);
    s.read("sigma_A2", t.params.sigma_a2);
    s.read("w_nm", t.params.w_nm);
    s.read("delay_ps", t.delay_ps);
    s.read("operative_temperature_K", t.operative_temperature_k);
    s.read("ld0", t.ld0);
    s.read("fit_ld0", t.fit_ld0);
    s.read("temperatures_K", t.temperatures_k);
    s.read("noise_relative", t.noise_relative);
    s.finish();
    try {
        t.params.model = parse_decoherence_model(model);
        t.params.validate();
    } catch (const ValidationError& e) {
        Section::fail("decoherence", e.what());
    }
    require_positive(t.delay_ps, s.where("delay_ps"));
    require_positive(t.operative_temperature_k, s.where("operative_temperature_K"));
    require_positive(t.ld0, s.where("ld0"));
    require(t.temperatures_k.size() >= 4, s.where("temperatures_K"), "needs at least four temperatures");
    require_nonnegative(t.noise_relative, s.where("noise_relative"));
}

void read_bimolecular(Section s, RunConfig& cfg) {
    auto& b = cfg.bimolecular;
    s.read("N0_cm3", b.params.n0_cm3);
    s.read("K_ref_cm3_per_s", b.params.k_ref_cm3_per_s);
    s.read("T_ref_K", b.params.t_ref_k);
    s.read("delay_ms", b.delay_ms);
    s.read("free_scale", b.free_scale);
    s.read("temperatures_K", b.temperatures_k);
    s.read("noise_relative", b.noise_relative);
    s.finish();
    try {
        b.params.validate();
    } catch (const ValidationError& e) {
        Section::fail("annihilation", e.what());
    }
    require_positive(b.delay_ms, s.where("delay_ms"));
    require(b.temperatures_k.size() >= 3, s.where("temperatures_K"), "needs at least three temperatures");
    require_nonnegative(b.noise_relative, s.where("noise_relative"));
}

void read_kick_ratio(Section s, RunConfig& cfg) {
    auto& k = cfg.kick_ratio;
    s.read("energies_uJ", k.energies_uj);
    s.read("p3", k.p3);
    s.read("p5", k.p5);
    s.read("noise_relative", k.noise_relative);
    s.finish();
    require(k.energies_uj.size() >= 4, s.where("energies_uJ"), "needs at least four energies");
    for (double e : k.energies_uj) {
        require_positive(e, s.where("energies_uJ"));
    }
    require_fraction(k.p3, s.where("p3"));
    require(k.p5 >= 0.0 && k.p5 <= k.p3, s.where("p5"), "must lie in [0, p3]");
    require_nonnegative(k.noise_relative, s.where("noise_relative"));
}

void read_fit(Section s, RunConfig& cfg) {
    s.read("relative_tolerance", cfg.fit.relative_tolerance);
    s.read("max_iterations", cfg.fit.max_iterations);
    s.read("restarts", cfg.fit.restarts);
    s.finish();
    require_positive(cfg.fit.relative_tolerance, s.where("relative_tolerance"));
    require(cfg.fit.max_iterations > 0, s.where("max_iterations"), "must be positive");
    require(cfg.fit.restarts >= 0, s.where("restarts"), "must be non-negative");
}

} // namespace

RunConfig RunConfig::defaults() {
    RunConfig cfg;
    cfg.bath_table = std::filesystem::path(HELIROT_SOURCE_DIR) / "data" / "he4_svp_properties.csv";
    cfg.pulse.energy_uj = 3.5;
    cfg.pulse.peak_intensity_wcm2 = 5e11;
    cfg.pulse.duration_fwhm_fs = 100.0;
    cfg.kick.energies_uj = arange(0.0, 4.0, 0.25);
    cfg.temperature.temperatures_k = arange(1.35, 2.15, 0.05);
    cfg.bimolecular.temperatures_k = arange(1.3, 2.1, 0.1);
    cfg.kick_ratio.energies_uj = arange(0.5, 3.5, 0.5);
    cfg.fit.restarts = 8;
    cfg.fit.seed = cfg.seed;
    cfg.hash = content_hash("defaults");
    return cfg;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& source) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ParseError("config: " + source.string() + ": " + e.what());
    }

    RunConfig cfg = RunConfig::defaults();
    cfg.source = source;
    cfg.hash = content_hash(text);
    const auto base = source.has_parent_path() ? source.parent_path() : std::filesystem::path(".");

    Section top(doc, "");
    read_molecule(top.child("molecule"), cfg);
    read_basis(top.child("basis"), cfg);
    std::string table = cfg.bath_table.string();
    std::string output = cfg.output_dir.string();
    if (top.has("bath_table")) {
        top.read("bath_table", table);
        cfg.bath_table = std::filesystem::path(table).is_absolute() ? std::filesystem::path(table) : base / table;
    }
    if (top.has("output_dir")) {
        top.read("output_dir", output);
        cfg.output_dir = std::filesystem::path(output).is_absolute() ? std::filesystem::path(output) : base / output;
    }
    read_pulse(top.child("pulse"), cfg);
    read_kick(top.child("kick"), cfg);
    read_signal(top.child("signal"), cfg);
    read_beat(top.child("beat"), cfg);
    read_temperature(top.child("decoherence"), cfg);
    read_bimolecular(top.child("annihilation"), cfg);
    read_kick_ratio(top.child("kick_ratio"), cfg);
    read_fit(top.child("fit"), cfg);
    top.read("seed", cfg.seed);
    top.finish();

    require(cfg.molecule.b_thz.size() >= cfg.signal.branch_weights.size(), "signal.branch_weights",
            "has more entries than molecule.B_THz");
    require(std::filesystem::is_regular_file(cfg.bath_table), "bath_table",
            "file not found: " + cfg.bath_table.string());
    cfg.fit.seed = cfg.seed;
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("config: cannot open " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

} // namespace helirot
