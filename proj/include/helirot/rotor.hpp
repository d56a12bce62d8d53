#pragma once

// Rigid-rotor dynamics of a linear molecule kicked by a linearly polarized
// femtosecond pulse. The quantization axis is the kick polarization, so the
// interaction conserves M and couples N to N±2 only.
//
// Units: frequencies and rotational constants in THz (E/h), times in ps
// unless a name says otherwise.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace helirot {

enum class Parity { OddOnly, All };

struct RotorState {
    int n = 0;
    int m = 0;
    friend bool operator==(const RotorState&, const RotorState&) = default;
};

/// Truncated |N,M⟩ basis, ordered by N then M.
class RotorBasis {
public:
    RotorBasis(int n_max, Parity parity);

    int n_max() const { return n_max_; }
    Parity parity() const { return parity_; }
    std::size_t size() const { return states_.size(); }

    const RotorState& state(std::size_t index) const { return states_.at(index); }
    bool contains(int n, int m) const;
    /// Throws std::out_of_range for states outside the basis.
    std::size_t index(int n, int m) const;

    /// Retained N values, ascending.
    std::vector<int> shells() const;
    /// Basis indices grouped by (M, N mod 2), each sorted by N. The kick
    /// operator is block diagonal in this partition.
    const std::vector<std::vector<std::size_t>>& coupling_blocks() const { return blocks_; }

private:
    int n_max_;
    Parity parity_;
    int n_min_;
    std::vector<RotorState> states_;
    std::vector<std::vector<std::size_t>> blocks_;
};

struct MoleculeConstants {
    std::vector<double> b_thz{0.227}; ///< rotational constant B_v, index = v
    double delta_alpha_a3 = 35.1;     ///< polarizability anisotropy, Å³
    double lambda_ss_ghz = 0.0;       ///< spin-spin constant
    double gamma_sr_ghz = 0.0;        ///< spin-rotation constant

    /// Throws ValidationError unless B_0 > 0, B_v decreasing and Δα > 0.
    void validate() const;
    double b(int v = 0) const;

    /// a³Σu⁺ He₂* constants used by the shipped configuration.
    static MoleculeConstants helium_excimer();
};

/// Rigid-rotor level energy B·N(N+1), in the frequency units of b.
constexpr double rotor_energy(int n, double b) { return b * n * (n + 1.0); }

struct KickPulse {
    double energy_uj = 0.0;
    double peak_intensity_wcm2 = 0.0;
    double duration_fwhm_fs = 0.0; ///< intensity FWHM of the Gaussian envelope
    double polarization_angle_rad = 0.0;
    double center_ps = 0.0;
    /// Gaussian beam waist (1/e² intensity radius). When present, the peak
    /// intensity must agree with energy / (duration · area).
    std::optional<double> waist_um;
    /// Direct kick strength; overrides the intensity-derived value.
    std::optional<double> kick_strength;

    /// Throws ValidationError on non-positive fields or an energy/intensity
    /// mismatch beyond `relative_tolerance`.
    void validate(double relative_tolerance = 0.25) const;
    /// Peak intensity implied by energy, duration and waist.
    double implied_peak_intensity_wcm2() const;
    /// ∫ I dt in J/m².
    double fluence_jm2() const;
};

class WavePacket {
public:
    WavePacket(RotorBasis basis, Eigen::VectorXcd amplitudes, double t_ref_ps = 0.0);

    static WavePacket eigenstate(const RotorBasis& basis, int n, int m, double t_ref_ps = 0.0);

    const RotorBasis& basis() const { return basis_; }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    double t_ref() const { return t_ref_; }
    double norm() const { return amplitudes_.squaredNorm(); }
    /// Zero for states outside the basis.
    std::complex<double> amplitude(int n, int m) const;

private:
    RotorBasis basis_;
    Eigen::VectorXcd amplitudes_;
    double t_ref_;
};

/// ⟨N',M|cos²θ|N,M⟩ from the closed-form Clebsch–Gordan expressions; zero
/// unless |N'-N| ∈ {0,2}.
double cos2_element(int n_row, int n_col, int m);
/// Matrix of cos²θ over the basis (zero between different M).
Eigen::MatrixXd cos2_matrix(const RotorBasis& basis);

/// Dimensionless kick strength P = Δα_SI ∫ℰ² dt / (4ħ) = 2π Δα' F / (ħ c),
/// with F the fluence from peak intensity × Gaussian duration.
double kick_strength(const KickPulse& pulse, const MoleculeConstants& constants);

struct KickOptions {
    /// Maximum population allowed in the two highest retained shells.
    double leakage_tolerance = 1e-6;
};

/// Population in the two highest shells of the basis.
double guard_shell_population(const WavePacket& psi);

/// ψ → exp(i P cos²θ) ψ. Throws TruncationError on guard-shell leakage.
WavePacket apply_impulsive_kick(const WavePacket& psi, double p, const KickOptions& options = {});

/// Field-free evolution by `duration_ps` with rotational constant `b_thz`.
WavePacket free_evolve(const WavePacket& psi, double b_thz, double duration_ps);

/// Finite-duration propagation through a Gaussian pulse centred at
/// pulse.center_ps, using Strang splitting of the free rotor and the
/// (exactly exponentiated) cos²θ coupling. The input must be valid no later
/// than three FWHM before the pulse centre; the result is valid three FWHM
/// after it.
WavePacket evolve_tdse(const WavePacket& psi, const KickPulse& pulse, const MoleculeConstants& constants,
                       double dt_fs, const KickOptions& options = {});

/// N → Σ_M |c_{N,M}|².
std::map<int, double> populations(const WavePacket& psi);

/// Σ_M c_{N,M} conj(c_{N+2,M}).
std::complex<double> coherence(const WavePacket& psi, int n);

/// Incoherent ensemble member: a pure state with statistical weight.
struct EnsembleMember {
    WavePacket state;
    double weight = 0.0;
};

std::map<int, double> populations(std::span<const EnsembleMember> ensemble);
/// Weighted sum of member coherences.
std::complex<double> coherence(std::span<const EnsembleMember> ensemble, int n);

/// Rotational populations of N = 1, 3, 5 before the kick. M sublevels are
/// equally populated.
struct InitialMixture {
    double p1 = 1.0;
    double p3 = 0.0;
    double p5 = 0.0;

    void validate() const;
    static InitialMixture from_excited(double p3, double p5) { return {1.0 - p3 - p5, p3, p5}; }
};

/// Kicks every |N0,M0⟩ of the mixture impulsively and returns the weighted
/// ensemble.
std::vector<EnsembleMember> kicked_ensemble(const RotorBasis& basis, const InitialMixture& mixture, double p,
                                            const KickOptions& options = {});

/// Linear map from kick energy to kick strength.
struct KickCalibration {
    double p_per_uj = 0.0;
    double strength(double energy_uj) const { return p_per_uj * energy_uj; }
};

/// Finds the P at which a pure, isotropic N = 1 ensemble reaches
/// `target_population` in shell `target_shell`, and scales it to
/// `reference_energy_uj`. The population must grow monotonically on
/// (0, p_max].
KickCalibration calibrate_kick(const RotorBasis& basis, double reference_energy_uj, int target_shell,
                               double target_population, double p_max = 6.0);

/// |coherence(3)| / |coherence(1)| of the kicked mixture for each energy.
/// Throws ModelError when coherence(1) vanishes.
std::vector<double> ld_amplitude_ratio(const RotorBasis& basis, const KickCalibration& calibration,
                                       std::span<const double> energies_uj, const InitialMixture& mixture,
                                       const KickOptions& options = {});

} // namespace helirot
