#pragma once

// Run configuration: one JSON document (comments allowed) whose keys carry
// their units, e.g. "delta_alpha_A3". Unknown keys are rejected so that a
// misspelt unit tag cannot silently fall back to a default.

#include "helirot/bath.hpp"
#include "helirot/fit.hpp"
#include "helirot/rotor.hpp"
#include "helirot/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace helirot {

struct KickSection {
    std::vector<double> energies_uj;
    double reference_energy_uj = 3.5;
    int target_shell = 5;
    double target_population = 0.02;
    std::optional<double> p_per_uj; ///< skips calibration when set
    InitialMixture mixture;
};

struct SignalSection {
    std::vector<double> pair_weights{0.2, -0.1, 1.0, 0.5, -0.5}; ///< (1,3) pairs in allowed_pairs order
    double coherence_35_weight = 0.25;                          ///< 0 disables the (3,5) line
    std::vector<double> branch_weights{1.0, 0.35, 0.12};
    double tau_ns = 1.0;
    double t_start_ps = 0.0;
    double t_end_ps = 100.0;
    double dt_ps = 0.02;
    double noise_relative = 0.0;
    SpectrumOptions spectrum;
};

struct BeatSection {
    double tau_ns = 1.0;
    double t_end_ps = 1500.0;
    double dt_ps = 0.02;
    double noise_relative = 0.01;
    double window_ps = 20.0;
    double window_step_ps = 25.0;
};

struct TemperatureSection {
    DecoherenceParams params;
    double delay_ps = 850.0;
    double operative_temperature_k = 1.6; ///< where the second-sound distance u2·t is reported
    double ld0 = 1.0;
    bool fit_ld0 = false;
    std::vector<double> temperatures_k;
    double noise_relative = 0.05;
};

struct BimolecularSection {
    AnnihilationParams params;
    double delay_ms = 1.0;
    bool free_scale = false;
    std::vector<double> temperatures_k;
    double noise_relative = 0.01;
};

struct KickRatioSection {
    std::vector<double> energies_uj;
    double p3 = 0.005;
    double p5 = 0.0005;
    double noise_relative = 0.02;
};

struct RunConfig {
    std::filesystem::path source; ///< config file, empty for built-in defaults
    std::string hash;             ///< content hash of the config text
    MoleculeConstants molecule = MoleculeConstants::helium_excimer();
    int n_max = 21;
    Parity parity = Parity::OddOnly;
    std::filesystem::path bath_table;
    KickPulse pulse;
    KickOptions kick_options;
    KickSection kick;
    SignalSection signal;
    BeatSection beat;
    TemperatureSection temperature;
    BimolecularSection bimolecular;
    KickRatioSection kick_ratio;
    FitConfig fit;
    std::uint64_t seed = 20190519;
    std::filesystem::path output_dir = "out";

    /// Built-in defaults, identical to config/default.json.
    static RunConfig defaults();
    RotorBasis basis() const { return RotorBasis(n_max, parity); }
};

/// Throws ParseError for malformed JSON and ValidationError (with the key
/// path, e.g. "pulse.duration_fs") for bad values, unknown keys or missing
/// files. Relative paths resolve against the config's directory.
RunConfig parse_config(const std::string& text, const std::filesystem::path& source);
RunConfig load_config(const std::filesystem::path& path);

} // namespace helirot
