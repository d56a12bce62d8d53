#pragma once

// CLI command bodies. Every command is a pure function of the configuration
// and its input files; outputs are CSV documents with provenance headers
// plus a key = value report.

#include "helirot/config.hpp"
#include "helirot/csv.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace helirot {

struct CommandOutput {
    std::vector<std::pair<std::string, CsvDocument>> tables; ///< file name → content
    std::string report;                                      ///< key = value lines
    std::string report_name;                                 ///< empty when no report file is written
    int exit_code = 0;
};

/// The five figure recipes.
const std::vector<std::string>& recipe_names();

Provenance provenance_for(const RunConfig& config);

/// Energy → P map: the configured p_per_uJ or a fresh calibration.
KickCalibration kick_calibration(const RunConfig& config);

/// kick.csv: energy_uJ,P,pop_N1,pop_N3,pop_N5,coh13_re,coh13_im,coh35_re,coh35_im.
CommandOutput cmd_simulate_kick(const RunConfig& config);

/// Beat components of the configured signal: (1,3) for every branch and,
/// when enabled, (3,5).
std::vector<BeatComponent> configured_components(const RunConfig& config);
/// Spectral targets "LD13:v<v>" at 10 B_v and "LD35:v<v>" at 18 B_v.
std::vector<PeakTarget> configured_targets(const RunConfig& config);

/// trace.csv, spectrum.csv, peaks.csv.
CommandOutput cmd_synthesize(const RunConfig& config);

/// spectrum.csv and peaks.csv for an existing trace CSV.
CommandOutput cmd_spectrum(const RunConfig& config, const std::filesystem::path& trace_path);

/// <recipe>_data.csv, <recipe>_model.csv and <recipe>_report.txt. Uses
/// synthetic data generated from the config unless `data_path` is given.
/// exit_code is 4 when a fit did not converge.
CommandOutput cmd_fit(const RunConfig& config, const std::string& recipe,
                      const std::optional<std::filesystem::path>& data_path);

/// Bath-table invariants, fine-structure scale and basis adequacy. Exit
/// code 0 iff no check fails; warnings do not fail.
CommandOutput cmd_validate(const RunConfig& config);

/// Writes every table and the report into `directory` (created if needed)
/// and returns the written paths.
std::vector<std::filesystem::path> write_outputs(const CommandOutput& output, const std::filesystem::path& directory);

} // namespace helirot
