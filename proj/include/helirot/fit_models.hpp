#pragma once

// Model adapters: each builds a FitProblem for one measurement type, runs
// least_squares and translates the result back into physical quantities.

#include "helirot/bath.hpp"
#include "helirot/fit.hpp"
#include "helirot/rotor.hpp"
#include "helirot/signal.hpp"

#include <span>
#include <string>
#include <vector>

namespace helirot {

// --- spin-beat envelope ---------------------------------------------------------

struct SpinBeatOptions {
    double initial_tau_ns = 0.8;
    double tau_bounds_ns[2] = {0.05, 20.0};
};

struct SpinBeatFit {
    double tau_ns = 0.0;
    double tau_error_ns = 0.0;
    std::vector<double> weights; ///< c_k in the order of the offsets
    double linewidth_ghz = 0.0;  ///< 1 / (π τ)
    FitResult result;
};

/// Envelope model |Σ_k c_k e^{2πi δ_k t}| e^{-t/τ}; `offsets_ghz` are the
/// beat frequencies minus the carrier. Parameters: tau_ns, c0..c(K-1).
FitProblem spin_beat_problem(const AmplitudeSeries& series, std::span<const double> offsets_ghz,
                             const SpinBeatOptions& options = {});

/// Throws NonIdentifiableError for a constant series and ValidationError
/// when the series is shorter than one envelope oscillation.
SpinBeatFit fit_spin_beating(const AmplitudeSeries& series, std::span<const double> offsets_ghz,
                             const FitConfig& config, const SpinBeatOptions& options = {});

// --- temperature dependence -----------------------------------------------------

struct TemperatureOptions {
    DecoherenceModel variant = DecoherenceModel::NonequilibriumLiteral;
    double t_ps = 850.0;
    double ld0 = 1.0;
    bool fit_ld0 = false;
    double initial_sigma_a2 = 1e-2;
    double initial_w_nm = 15.0;
};

struct TemperatureFit {
    DecoherenceModel variant = DecoherenceModel::Equilibrium;
    double sigma_a2 = 0.0;
    double sigma_error_a2 = 0.0;
    double w_nm = 0.0; ///< zero for the equilibrium variant
    double w_error_nm = 0.0;
    double ld0 = 0.0;
    FitResult result;
};

/// LD(T) at the fixed delay. Parameters: sigma_A2, w_nm (non-equilibrium
/// only), ld0. The table must outlive the problem.
FitProblem temperature_problem(const BathTable& table, std::span<const double> t_k, std::span<const double> ld,
                               const TemperatureOptions& options = {});
TemperatureFit fit_temperature(const BathTable& table, std::span<const double> t_k, std::span<const double> ld,
                               const FitConfig& config, const TemperatureOptions& options = {});

// --- kick-energy ratio ----------------------------------------------------------

struct KickRatioOptions {
    double initial_p3 = 0.02;
    double initial_f5 = 0.1;
    double initial_p_per_uj = 0.6;
    /// When false, p_per_uJ stays at initial_p_per_uj (the kick calibration).
    bool fit_p_per_uj = false;
    KickOptions kick;
};

struct KickRatioFit {
    double p1 = 0.0;
    double p3 = 0.0;
    double p5 = 0.0;
    double p3_error = 0.0;
    double p5_error = 0.0;
    double p_per_uj = 0.0;
    double p_per_uj_error = 0.0;
    /// False when the curvature matrix is singular: the energies do not
    /// constrain the populations.
    bool identifiable = false;
    FitResult result;
};

/// Parameters: p3 in [0, 0.5], f5 = p5/p3 in [0, 1], p_per_uJ in [0.05, 1.2]
/// (fixed unless fit_p_per_uj).
/// The basis must outlive the problem.
FitProblem kick_ratio_problem(const RotorBasis& basis, std::span<const double> energies_uj,
                              std::span<const double> ratios, const KickRatioOptions& options = {});
KickRatioFit fit_kick_ratio(const RotorBasis& basis, std::span<const double> energies_uj,
                            std::span<const double> ratios, const FitConfig& config,
                            const KickRatioOptions& options = {});

// --- bimolecular decay ----------------------------------------------------------

struct BimolecularOptions {
    double delay_ms = 1.0;
    AnnihilationParams annihilation; ///< n0 is the starting value
    bool free_scale = false;
};

struct BimolecularFit {
    double n0_cm3 = 0.0;
    double n0_error_cm3 = 0.0;
    double scale = 1.0;
    double scale_error = 0.0;
    FitResult result;
};

/// Intensity = scale · N(delay; T) / 10¹³ cm⁻³. Parameters: n0_1e13, scale.
FitProblem bimolecular_problem(const BathTable& table, std::span<const double> t_k,
                               std::span<const double> intensity, const BimolecularOptions& options = {});
BimolecularFit fit_bimolecular(const BathTable& table, std::span<const double> t_k,
                               std::span<const double> intensity, const FitConfig& config,
                               const BimolecularOptions& options = {});

} // namespace helirot
