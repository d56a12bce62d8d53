#pragma once

// He II property tables and the bath-coupling models: kinematic decoherence
// (equilibrium and second-sound driven), roton-mediated bimolecular decay,
// and diffusion/separation estimates.
//
// Units: T in K, densities in cm⁻³, speeds in m/s, σ in Å², w in nm,
// delays t in ps unless a name says otherwise, rates in GHz (10⁹ s⁻¹).

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace helirot {

struct BathProperties {
    double t_k = 0.0;
    double density_cm3 = 0.0;
    double normal_fraction = 0.0;
    double u1_mps = 0.0;
    double u2_mps = 0.0;
    double roton_gap_k = 0.0;
};

/// Tabulated He II properties with monotone (PCHIP) interpolation.
class BathTable {
public:
    /// Throws ValidationError (with row index) on a non-increasing T grid,
    /// fewer than four rows, or non-physical values.
    BathTable(std::vector<BathProperties> rows, std::vector<std::string> provenance = {});

    static BathTable read(std::istream& in, const std::string& source);
    static BathTable read_file(const std::filesystem::path& path);

    /// Interpolated properties; RangeError outside [t_min, t_max].
    BathProperties at(double t_k) const;
    std::pair<double, double> range() const { return {rows_.front().t_k, rows_.back().t_k}; }
    const std::vector<BathProperties>& rows() const { return rows_; }
    const std::vector<std::string>& provenance() const { return provenance_; }

    /// Temperature of the largest interpolated u2 on a dense grid.
    double u2_maximum_temperature(std::size_t samples = 2001) const;

private:
    std::vector<BathProperties> rows_;
    std::vector<std::string> provenance_;
    std::vector<std::function<double(double)>> columns_; // density, normal fraction, u1, u2, gap
};

/// Human-readable violations of the table invariants: coverage of
/// [1.3, 2.17] K, normal fraction in [0, 1] and non-decreasing, u2 maximum
/// inside (1.4, 1.8) K. Empty when the table passes.
std::vector<std::string> check_bath_invariants(const BathTable& table);

enum class DecoherenceModel { Equilibrium, NonequilibriumLiteral, NonequilibriumIntegrated };

/// "equilibrium", "nonequilibrium-literal", "nonequilibrium-integrated";
/// ValidationError otherwise.
DecoherenceModel parse_decoherence_model(const std::string& label);
std::string to_string(DecoherenceModel model);

struct DecoherenceParams {
    double sigma_a2 = 2.5e-2;
    double w_nm = 22.0;
    DecoherenceModel model = DecoherenceModel::NonequilibriumLiteral;
    void validate() const;
};

/// γ = N·(ρn/ρ)·σ·u1, in GHz.
double gamma_equilibrium(const BathTable& table, double t_k, double sigma_a2);
/// LD0·exp(-γ_eq t).
double ld_equilibrium(const BathTable& table, double t_k, double t_ps, double sigma_a2, double ld0);

/// N·exp(-(u2 t / w)²): the normal density carried by a Gaussian second-sound pulse.
double n_neq(const BathTable& table, double t_k, double t_ps, double w_nm);
/// ∫₀ᵗ n_neq dt' in cm⁻³·ps, via the error function.
double n_neq_integral(const BathTable& table, double t_k, double t_ps, double w_nm);
/// Instantaneous rate n_neq·σ·u1 in GHz.
double gamma_nonequilibrium(const BathTable& table, double t_k, double t_ps, double sigma_a2, double w_nm);

/// Literal: LD0·exp[-n_neq(t)·σ·u1·t]. Integrated: LD0·exp[-σ·u1·∫₀ᵗ n_neq].
/// Equilibrium is accepted too and ignores w.
double ld_nonequilibrium(const BathTable& table, double t_k, double t_ps, double sigma_a2, double w_nm, double ld0,
                         DecoherenceModel variant);

/// Dispatches on params.model.
double ld_model(const BathTable& table, double t_k, double t_ps, const DecoherenceParams& params, double ld0);
/// Decoherence rate plotted against T for the chosen model, GHz.
double gamma_model(const BathTable& table, double t_k, double t_ps, const DecoherenceParams& params);

struct AnnihilationParams {
    double n0_cm3 = 1.9e13;
    double k_ref_cm3_per_s = 1e-10;
    double t_ref_k = 1.5;
    void validate() const;
};

/// √T·exp(-Δ(T)/T): thermal roton density up to a constant factor.
double roton_density_factor(const BathTable& table, double t_k);
/// K(T) = K_ref · n_rot(T_ref) / n_rot(T).
double annihilation_rate(const BathTable& table, double t_k, const AnnihilationParams& params);
/// N(t) = N0 / (1 + K(T)·N0·t).
double bimolecular_density(const BathTable& table, double t_s, double t_k, const AnnihilationParams& params);

struct SeparationEstimate {
    double separation_nm = 0.0;   ///< density^(-1/3)
    double displacement_nm = 0.0; ///< √(6 D t), three-dimensional diffusion
};
SeparationEstimate separation_and_displacement(double density_cm3, double diffusion_cm2_per_s, double t_s);

} // namespace helirot
