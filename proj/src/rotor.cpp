#include "helirot/rotor.hpp"

#include "helirot/errors.hpp"
#include "helirot/units.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace helirot {

namespace {

constexpr std::complex<double> I{0.0, 1.0};

// ⟨j+1,m|cosθ|j,m⟩
double cos_up(int j, int m) {
    const double jj = j;
    return std::sqrt((jj - m + 1.0) * (jj + m + 1.0) / ((2.0 * jj + 1.0) * (2.0 * jj + 3.0)));
}

// Eigensystems of the cos²θ blocks, reused across kicks of one basis.
class KickPropagator {
public:
    explicit KickPropagator(const RotorBasis& basis) : blocks_(basis.coupling_blocks()) {
        for (const auto& block : basis.coupling_blocks()) {
            Eigen::MatrixXd c(block.size(), block.size());
            for (std::size_t r = 0; r < block.size(); ++r) {
                for (std::size_t k = 0; k < block.size(); ++k) {
                    const auto& sr = basis.state(block[r]);
                    const auto& sk = basis.state(block[k]);
                    c(r, k) = cos2_element(sr.n, sk.n, sr.m);
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
            eigenvalues_.push_back(solver.eigenvalues());
            eigenvectors_.push_back(solver.eigenvectors());
        }
    }

    // amplitudes ← exp(i·phase·cos²θ) amplitudes
    void apply(Eigen::VectorXcd& amplitudes, double phase) const {
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            const auto& block = blocks_[b];
            Eigen::VectorXcd local(block.size());
            bool empty = true;
            for (std::size_t r = 0; r < block.size(); ++r) {
                local(r) = amplitudes(block[r]);
                empty = empty && local(r) == std::complex<double>{};
            }
            if (empty) {
                continue;
            }
            const auto& v = eigenvectors_[b];
            Eigen::VectorXcd projected = v.transpose() * local;
            for (Eigen::Index k = 0; k < projected.size(); ++k) {
                projected(k) *= std::exp(I * phase * eigenvalues_[b](k));
            }
            local = v * projected;
            for (std::size_t r = 0; r < block.size(); ++r) {
                amplitudes(block[r]) = local(r);
            }
        }
    }

    /// Shared instance for bases of this shape; built on first use.
    static const KickPropagator& for_basis(const RotorBasis& basis) {
        static std::mutex mutex;
        static std::map<std::pair<int, Parity>, std::unique_ptr<KickPropagator>> cache;
        const std::lock_guard lock(mutex);
        auto& slot = cache[{basis.n_max(), basis.parity()}];
        if (!slot) {
            slot = std::make_unique<KickPropagator>(basis);
        }
        return *slot;
    }

private:
    std::vector<std::vector<std::size_t>> blocks_;
    std::vector<Eigen::VectorXd> eigenvalues_;
    std::vector<Eigen::MatrixXd> eigenvectors_;
};

void check_leakage(const WavePacket& psi, const KickOptions& options) {
    const double leaked = guard_shell_population(psi);
    if (leaked > options.leakage_tolerance) {
        std::ostringstream msg;
        msg << "population " << leaked << " in the two highest shells (n_max = " << psi.basis().n_max()
            << ") exceeds " << options.leakage_tolerance << "; enlarge n_max";
        throw TruncationError(msg.str());
    }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

// --- RotorBasis ---------------------------------------------------------------

RotorBasis::RotorBasis(int n_max, Parity parity)
    : n_max_(n_max), parity_(parity), n_min_(parity == Parity::OddOnly ? 1 : 0) {
    if (n_max < n_min_ || (parity == Parity::OddOnly && n_max % 2 == 0)) {
        throw ValidationError("invalid basis: n_max = " + std::to_string(n_max) +
                              (parity == Parity::OddOnly ? " (odd-only basis needs odd n_max >= 1)" : ""));
    }
    const int step = parity == Parity::OddOnly ? 2 : 1;
    for (int n = n_min_; n <= n_max; n += step) {
        for (int m = -n; m <= n; ++m) {
            states_.push_back({n, m});
        }
    }
    for (int m = -n_max; m <= n_max; ++m) {
        for (int par = 0; par < 2; ++par) {
            std::vector<std::size_t> block;
            for (std::size_t i = 0; i < states_.size(); ++i) {
                if (states_[i].m == m && states_[i].n % 2 == par) {
                    block.push_back(i);
                }
            }
            if (!block.empty()) {
                blocks_.push_back(std::move(block));
            }
        }
    }
}

bool RotorBasis::contains(int n, int m) const {
    if (n < n_min_ || n > n_max_ || std::abs(m) > n) {
        return false;
    }
    return parity_ == Parity::All || n % 2 == 1;
}

std::size_t RotorBasis::index(int n, int m) const {
    if (!contains(n, m)) {
        throw std::out_of_range("state |" + std::to_string(n) + "," + std::to_string(m) + "> not in basis");
    }
    std::size_t offset = 0;
    const int step = parity_ == Parity::OddOnly ? 2 : 1;
    for (int k = n_min_; k < n; k += step) {
        offset += static_cast<std::size_t>(2 * k + 1);
    }
    return offset + static_cast<std::size_t>(m + n);
}

std::vector<int> RotorBasis::shells() const {
    std::vector<int> out;
    const int step = parity_ == Parity::OddOnly ? 2 : 1;
    for (int n = n_min_; n <= n_max_; n += step) {
        out.push_back(n);
    }
    return out;
}

// --- MoleculeConstants ----------------------------------------------------------

void MoleculeConstants::validate() const {
    if (b_thz.empty() || !(b_thz.front() > 0.0)) {
        throw ValidationError("molecule: B_0 must be positive");
    }
    for (std::size_t v = 1; v < b_thz.size(); ++v) {
        if (!(b_thz[v] < b_thz[v - 1]) || !(b_thz[v] > 0.0)) {
            throw ValidationError("molecule: B_v must decrease monotonically in v (v = " + std::to_string(v) + ")");
        }
    }
    if (!(delta_alpha_a3 > 0.0)) {
        throw ValidationError("molecule: delta_alpha must be positive");
    }
    if (!std::isfinite(lambda_ss_ghz) || !std::isfinite(gamma_sr_ghz)) {
        throw ValidationError("molecule: spin constants must be finite");
    }
}

double MoleculeConstants::b(int v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= b_thz.size()) {
        throw ValidationError("molecule: no rotational constant for v = " + std::to_string(v));
    }
    return b_thz[static_cast<std::size_t>(v)];
}

MoleculeConstants MoleculeConstants::helium_excimer() {
    // B_0 from the N=1→3 interval (10 B_0 = 2.27 THz); α_e ≈ 0.223 cm⁻¹.
    // λ = -0.0366 cm⁻¹, γ = -0.00229 cm⁻¹ (v = 0 effective constants).
    return MoleculeConstants{{0.2270, 0.2203, 0.2136}, 35.1, -1.097, -0.0687};
}

// --- KickPulse ------------------------------------------------------------------

double KickPulse::implied_peak_intensity_wcm2() const {
    if (!waist_um) {
        throw ValidationError("pulse: implied intensity needs a beam waist");
    }
    const double area_cm2 = units::pi * std::pow(*waist_um * 1e-4, 2) / 2.0;
    const double duration_s = duration_fwhm_fs * units::fs_to_s * units::gaussian_fwhm_area;
    return energy_uj * 1e-6 / (duration_s * area_cm2);
}

void KickPulse::validate(double relative_tolerance) const {
    if (!(duration_fwhm_fs > 0.0)) {
        throw ValidationError("pulse: duration_fwhm_fs must be positive");
    }
    if (!(energy_uj >= 0.0) || !(peak_intensity_wcm2 >= 0.0)) {
        throw ValidationError("pulse: energy and intensity must be non-negative");
    }
    if (kick_strength && !(*kick_strength >= 0.0)) {
        throw ValidationError("pulse: kick_strength must be non-negative");
    }
    if ((energy_uj == 0.0) != (peak_intensity_wcm2 == 0.0) && !kick_strength) {
        throw ValidationError("pulse: energy and peak intensity must both be zero or both positive");
    }
    if (waist_um) {
        if (!(*waist_um > 0.0)) {
            throw ValidationError("pulse: waist_um must be positive");
        }
        if (peak_intensity_wcm2 > 0.0) {
            const double implied = implied_peak_intensity_wcm2();
            const double mismatch = std::abs(implied / peak_intensity_wcm2 - 1.0);
            if (mismatch > relative_tolerance) {
                std::ostringstream msg;
                msg << "pulse: energy " << energy_uj << " uJ over " << duration_fwhm_fs << " fs and waist "
                    << *waist_um << " um implies " << implied << " W/cm^2, but peak_intensity is "
                    << peak_intensity_wcm2 << " W/cm^2 (mismatch " << mismatch * 100.0 << "%)";
                throw ValidationError(msg.str());
            }
        }
    }
}

double KickPulse::fluence_jm2() const {
    return peak_intensity_wcm2 * units::wcm2_to_wm2 * duration_fwhm_fs * units::fs_to_s * units::gaussian_fwhm_area;
}

// --- WavePacket -----------------------------------------------------------------

WavePacket::WavePacket(RotorBasis basis, Eigen::VectorXcd amplitudes, double t_ref_ps)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)), t_ref_(t_ref_ps) {
    if (static_cast<std::size_t>(amplitudes_.size()) != basis_.size()) {
        throw ValidationError("wave packet: amplitude vector does not match basis size");
    }
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > 1e-10) {
        throw ValidationError("wave packet: amplitudes are not normalized");
    }
}

WavePacket WavePacket::eigenstate(const RotorBasis& basis, int n, int m, double t_ref_ps) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    c(static_cast<Eigen::Index>(basis.index(n, m))) = 1.0;
    return WavePacket(basis, std::move(c), t_ref_ps);
}

std::complex<double> WavePacket::amplitude(int n, int m) const {
    if (!basis_.contains(n, m)) {
        return {};
    }
    return amplitudes_(static_cast<Eigen::Index>(basis_.index(n, m)));
}

// --- operators ------------------------------------------------------------------

double cos2_element(int n_row, int n_col, int m) {
    if (std::abs(m) > n_row || std::abs(m) > n_col || n_row < 0 || n_col < 0) {
        return 0.0;
    }
    const int lo = std::min(n_row, n_col);
    switch (std::abs(n_row - n_col)) {
    case 0: {
        const double up = cos_up(lo, m);
        const double down = lo > 0 ? cos_up(lo - 1, m) : 0.0;
        return up * up + down * down;
    }
    case 2:
        return cos_up(lo, m) * cos_up(lo + 1, m);
    default:
        return 0.0;
    }
}

Eigen::MatrixXd cos2_matrix(const RotorBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& block : basis.coupling_blocks()) {
        for (auto r : block) {
            for (auto k : block) {
                const auto& sr = basis.state(r);
                const auto& sk = basis.state(k);
                c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = cos2_element(sr.n, sk.n, sr.m);
            }
        }
    }
    return c;
}

double kick_strength(const KickPulse& pulse, const MoleculeConstants& constants) {
    pulse.validate();
    if (pulse.kick_strength) {
        return *pulse.kick_strength;
    }
    constants.validate();
    const double delta_alpha_m3 = constants.delta_alpha_a3 * units::angstrom3_to_m3;
    return 2.0 * units::pi * delta_alpha_m3 * pulse.fluence_jm2() / (units::hbar * units::speed_of_light);
}

double guard_shell_population(const WavePacket& psi) {
    const auto shells = psi.basis().shells();
    const auto pops = populations(psi);
    double leaked = 0.0;
    for (std::size_t k = shells.size() >= 2 ? shells.size() - 2 : 0; k < shells.size(); ++k) {
        leaked += pops.at(shells[k]);
    }
    return leaked;
}

WavePacket apply_impulsive_kick(const WavePacket& psi, double p, const KickOptions& options) {
    Eigen::VectorXcd c = psi.amplitudes();
    if (p != 0.0) {
        KickPropagator::for_basis(psi.basis()).apply(c, p);
    }
    WavePacket out(psi.basis(), std::move(c), psi.t_ref());
    check_leakage(out, options);
    return out;
}

WavePacket free_evolve(const WavePacket& psi, double b_thz, double duration_ps) {
    Eigen::VectorXcd c = psi.amplitudes();
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const auto& s = psi.basis().state(static_cast<std::size_t>(i));
        c(i) *= std::exp(-I * 2.0 * units::pi * rotor_energy(s.n, b_thz) * duration_ps);
    }
    return WavePacket(psi.basis(), std::move(c), psi.t_ref() + duration_ps);
}

WavePacket evolve_tdse(const WavePacket& psi, const KickPulse& pulse, const MoleculeConstants& constants,
                       double dt_fs, const KickOptions& options) {
    const double p = kick_strength(pulse, constants);
    const double fwhm_ps = pulse.duration_fwhm_fs * 1e-3;
    const double dt_request_ps = dt_fs * 1e-3;
    const double b = constants.b(0);
    const double omega_max = 2.0 * units::pi * rotor_energy(psi.basis().n_max(), b);

    if (!(dt_fs > 0.0) || fwhm_ps / dt_request_ps < 20.0) {
        throw IntegrationError("tdse: dt must resolve the pulse with at least 20 steps per FWHM");
    }
    if (omega_max * dt_request_ps > units::pi) {
        throw IntegrationError("tdse: dt does not resolve the fastest retained rotational phase");
    }

    const double half_window = 3.0 * fwhm_ps;
    const double t_start = pulse.center_ps - half_window;
    if (psi.t_ref() > t_start + 1e-12) {
        throw ValidationError("tdse: initial state is referenced after the pulse window opens");
    }
    WavePacket start = free_evolve(psi, b, t_start - psi.t_ref());

    const auto steps = static_cast<long>(std::ceil(2.0 * half_window / dt_request_ps));
    const double dt = 2.0 * half_window / static_cast<double>(steps);
    // Intensity envelope exp(-4 ln2 t²/τ²) is a normal density with this σ.
    const double sigma_t = fwhm_ps / std::sqrt(8.0 * std::log(2.0));

    Eigen::VectorXcd c = start.amplitudes();
    Eigen::VectorXcd half_phase(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const auto& s = psi.basis().state(static_cast<std::size_t>(i));
        half_phase(i) = std::exp(-I * units::pi * rotor_energy(s.n, b) * dt);
    }
    const KickPropagator coupling(psi.basis());
    for (long k = 0; k < steps; ++k) {
        const double t0 = t_start + static_cast<double>(k) * dt;
        const double weight = normal_cdf((t0 + dt - pulse.center_ps) / sigma_t) -
                              normal_cdf((t0 - pulse.center_ps) / sigma_t);
        c = c.cwiseProduct(half_phase);
        coupling.apply(c, p * weight);
        c = c.cwiseProduct(half_phase);
    }

    const double drift = std::abs(c.squaredNorm() - psi.norm());
    if (drift > 1e-8) {
        throw IntegrationError("tdse: norm drift " + std::to_string(drift) + " exceeds 1e-8");
    }
    c /= std::sqrt(c.squaredNorm());
    WavePacket out(psi.basis(), std::move(c), t_start + 2.0 * half_window);
    check_leakage(out, options);
    return out;
}

std::map<int, double> populations(const WavePacket& psi) {
    std::map<int, double> out;
    for (int n : psi.basis().shells()) {
        out[n] = 0.0;
    }
    const auto& c = psi.amplitudes();
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        out[psi.basis().state(static_cast<std::size_t>(i)).n] += std::norm(c(i));
    }
    return out;
}

std::complex<double> coherence(const WavePacket& psi, int n) {
    std::complex<double> sum{};
    for (int m = -n; m <= n; ++m) {
        sum += psi.amplitude(n, m) * std::conj(psi.amplitude(n + 2, m));
    }
    return sum;
}

std::map<int, double> populations(std::span<const EnsembleMember> ensemble) {
    std::map<int, double> out;
    for (const auto& member : ensemble) {
        for (const auto& [n, p] : populations(member.state)) {
            out[n] += member.weight * p;
        }
    }
    return out;
}

std::complex<double> coherence(std::span<const EnsembleMember> ensemble, int n) {
    std::complex<double> sum{};
    for (const auto& member : ensemble) {
        sum += member.weight * coherence(member.state, n);
    }
    return sum;
}

// --- ensembles ------------------------------------------------------------------

void InitialMixture::validate() const {
    if (p1 < 0.0 || p3 < 0.0 || p5 < 0.0 || std::abs(p1 + p3 + p5 - 1.0) > 1e-12) {
        throw ValidationError("initial mixture: populations must be non-negative and sum to 1");
    }
}

std::vector<EnsembleMember> kicked_ensemble(const RotorBasis& basis, const InitialMixture& mixture, double p,
                                            const KickOptions& options) {
    mixture.validate();
    const auto& propagator = KickPropagator::for_basis(basis);
    std::vector<EnsembleMember> out;
    const std::pair<int, double> shells[] = {{1, mixture.p1}, {3, mixture.p3}, {5, mixture.p5}};
    for (const auto& [n0, weight] : shells) {
        if (weight == 0.0) {
            continue;
        }
        for (int m0 = -n0; m0 <= n0; ++m0) {
            WavePacket initial = WavePacket::eigenstate(basis, n0, m0);
            Eigen::VectorXcd c = initial.amplitudes();
            propagator.apply(c, p);
            WavePacket kicked(basis, std::move(c));
            check_leakage(kicked, options);
            out.push_back({std::move(kicked), weight / (2.0 * n0 + 1.0)});
        }
    }
    return out;
}

KickCalibration calibrate_kick(const RotorBasis& basis, double reference_energy_uj, int target_shell,
                               double target_population, double p_max) {
    if (!(reference_energy_uj > 0.0) || !(target_population > 0.0 && target_population < 1.0)) {
        throw ValidationError("calibration: reference energy and target population out of range");
    }
    // std::nullopt when the kick leaks into the guard shells of this basis.
    auto shell_population = [&](double p) -> std::optional<double> {
        try {
            return populations(kicked_ensemble(basis, InitialMixture{}, p)).at(target_shell);
        } catch (const TruncationError&) {
            return std::nullopt;
        }
    };
    double lo = 0.0;
    double hi = p_max;
    bool reached = false;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto pop = shell_population(mid);
        if (pop && *pop < target_population) {
            lo = mid;
        } else {
            reached = reached || pop.has_value();
            hi = mid;
        }
    }
    const double p = 0.5 * (lo + hi);
    if (!reached || !shell_population(p)) {
        throw ValidationError("calibration: target population not reached for P <= " + std::to_string(p_max) +
                              " within n_max = " + std::to_string(basis.n_max()));
    }
    return KickCalibration{p / reference_energy_uj};
}

std::vector<double> ld_amplitude_ratio(const RotorBasis& basis, const KickCalibration& calibration,
                                       std::span<const double> energies_uj, const InitialMixture& mixture,
                                       const KickOptions& options) {
    mixture.validate();
    if (basis.n_max() < 5) {
        throw ValidationError("ld ratio: basis must contain N = 5");
    }
    std::vector<double> out;
    out.reserve(energies_uj.size());
    for (double energy : energies_uj) {
        if (!(energy > 0.0)) {
            throw ValidationError("ld ratio: kick energies must be positive");
        }
        const auto ensemble = kicked_ensemble(basis, mixture, calibration.strength(energy), options);
        const double first = std::abs(coherence(ensemble, 1));
        const double second = std::abs(coherence(ensemble, 3));
        if (first < 1e-14) {
            throw ModelError("ld ratio: (1,3) coherence vanishes at " + std::to_string(energy) + " uJ");
        }
        out.push_back(second / first);
    }
    return out;
}

} // namespace helirot
