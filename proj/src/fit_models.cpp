#include "helirot/fit_models.hpp"

#include "helirot/errors.hpp"
#include "helirot/units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <sstream>

namespace helirot {

namespace {

Eigen::VectorXd to_vector(std::span<const double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = values[i];
    }
    return v;
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ValidationError(std::string(what) + ": x and y differ in length");
    }
}

} // namespace

// --- spin-beat envelope ---------------------------------------------------------

FitProblem spin_beat_problem(const AmplitudeSeries& series, std::span<const double> offsets_ghz,
                             const SpinBeatOptions& options) {
    require_same_length(series.t_ps.size(), series.amplitude.size(), "spin-beat fit");
    if (offsets_ghz.empty()) {
        throw ValidationError("spin-beat fit: no beat frequencies");
    }
    std::vector<double> omega; // rad/ps
    for (double f : offsets_ghz) {
        omega.push_back(2.0 * units::pi * f * 1e-3);
    }

    FitProblem problem;
    problem.model_name = "spin-beat envelope";
    problem.x = to_vector(series.t_ps);
    problem.y = to_vector(series.amplitude);
    const double peak = problem.y.cwiseAbs().maxCoeff();
    problem.parameters.push_back({"tau_ns", options.initial_tau_ns, options.tau_bounds_ns[0], options.tau_bounds_ns[1]});
    for (std::size_t k = 0; k < omega.size(); ++k) {
        problem.parameters.push_back({"c" + std::to_string(k), peak / static_cast<double>(omega.size()),
                                      -10.0 * peak, 10.0 * peak});
    }

    auto sum_at = [omega](double t, const Eigen::VectorXd& p) {
        std::complex<double> s{};
        for (std::size_t k = 0; k < omega.size(); ++k) {
            s += p[static_cast<Eigen::Index>(k + 1)] * std::polar(1.0, omega[k] * t);
        }
        return s;
    };
    problem.model = [sum_at](const Eigen::VectorXd& t, const Eigen::VectorXd& p) {
        Eigen::VectorXd out(t.size());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            out[i] = std::abs(sum_at(t[i], p)) * std::exp(-t[i] * 1e-3 / p[0]);
        }
        return out;
    };
    problem.jacobian = [sum_at, omega](const Eigen::VectorXd& t, const Eigen::VectorXd& p) {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(t.size(), p.size());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const auto s = sum_at(t[i], p);
            const double mag = std::abs(s);
            const double decay = std::exp(-t[i] * 1e-3 / p[0]);
            j(i, 0) = mag * decay * t[i] * 1e-3 / (p[0] * p[0]);
            if (mag > 0.0) {
                for (std::size_t k = 0; k < omega.size(); ++k) {
                    j(i, static_cast<Eigen::Index>(k + 1)) =
                        std::real(std::conj(s) * std::polar(1.0, omega[k] * t[i])) / mag * decay;
                }
            }
        }
        return j;
    };
    return problem;
}

SpinBeatFit fit_spin_beating(const AmplitudeSeries& series, std::span<const double> offsets_ghz,
                             const FitConfig& config, const SpinBeatOptions& options) {
    auto problem = spin_beat_problem(series, offsets_ghz, options);
    const double lo = problem.y.minCoeff();
    const double hi = problem.y.maxCoeff();
    if (!(hi - lo > 1e-12 * std::max(std::abs(hi), 1e-300))) {
        throw NonIdentifiableError("spin-beat fit: amplitude series is constant; decay time and weights are "
                                   "not identifiable");
    }
    const auto [f_lo, f_hi] = std::minmax_element(offsets_ghz.begin(), offsets_ghz.end());
    const double span = series.t_ps.back() - series.t_ps.front();
    if (*f_hi - *f_lo > 0.0 && span * 1e-3 * (*f_hi - *f_lo) < 1.0) {
        std::ostringstream msg;
        msg << "spin-beat fit: series spans " << span << " ps, shorter than one envelope oscillation ("
            << 1e3 / (*f_hi - *f_lo) << " ps)";
        throw ValidationError(msg.str());
    }

    SpinBeatFit fit;
    fit.result = least_squares(problem, config);
    fit.tau_ns = fit.result.best_fit[0];
    fit.tau_error_ns = fit.result.uncertainty[0];
    for (Eigen::Index k = 1; k < fit.result.best_fit.size(); ++k) {
        fit.weights.push_back(fit.result.best_fit[k]);
    }
    fit.linewidth_ghz = 1.0 / (units::pi * fit.tau_ns);
    return fit;
}

// --- temperature dependence -----------------------------------------------------

FitProblem temperature_problem(const BathTable& table, std::span<const double> t_k, std::span<const double> ld,
                               const TemperatureOptions& options) {
    require_same_length(t_k.size(), ld.size(), "temperature fit");
    if (!(options.t_ps > 0.0)) {
        throw ValidationError("temperature fit: the fixed delay must be positive");
    }
    for (double t : t_k) {
        table.at(t);
    }
    const bool equilibrium = options.variant == DecoherenceModel::Equilibrium;
    const double delay = options.t_ps;
    const auto variant = options.variant;

    FitProblem problem;
    problem.model_name = "LD(T), " + to_string(variant);
    problem.x = to_vector(t_k);
    problem.y = to_vector(ld);
    problem.parameters = {
        {"sigma_A2", options.initial_sigma_a2, 1e-5, 1.0},
        {"w_nm", equilibrium ? 1.0 : options.initial_w_nm, 0.5, 500.0, equilibrium},
        {"ld0", options.ld0, 0.0, 1e6, !options.fit_ld0},
    };
    problem.model = [&table, delay, variant](const Eigen::VectorXd& t, const Eigen::VectorXd& p) {
        Eigen::VectorXd out(t.size());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            out[i] = ld_nonequilibrium(table, t[i], delay, p[0], p[1], p[2], variant);
        }
        return out;
    };
    problem.jacobian = [&table, delay, variant](const Eigen::VectorXd& t, const Eigen::VectorXd& p) {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(t.size(), 3);
        const double sigma = p[0];
        const double w = p[1];
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const double ld_value = ld_nonequilibrium(table, t[i], delay, sigma, w, p[2], variant);
            const auto props = table.at(t[i]);
            const double rate_per_density = sigma * units::angstrom2_to_cm2 * props.u1_mps * units::mps_to_cmps;
            // exponent E with LD = ld0·e^{-E}; dE/dσ = E/σ for every variant
            double exponent = 0.0;
            double d_exponent_dw = 0.0;
            const double x = units::distance_nm(props.u2_mps, delay) / w;
            switch (variant) {
            case DecoherenceModel::Equilibrium:
                exponent = rate_per_density * props.density_cm3 * props.normal_fraction * delay * units::ps_to_s;
                break;
            case DecoherenceModel::NonequilibriumLiteral:
                exponent = rate_per_density * props.density_cm3 * std::exp(-x * x) * delay * units::ps_to_s;
                d_exponent_dw = exponent * 2.0 * x * x / w;
                break;
            case DecoherenceModel::NonequilibriumIntegrated: {
                const double integral = n_neq_integral(table, t[i], delay, w);
                exponent = rate_per_density * integral * units::ps_to_s;
                const double d_integral_dw = integral / w - props.density_cm3 * delay * std::exp(-x * x) / w;
                d_exponent_dw = rate_per_density * d_integral_dw * units::ps_to_s;
                break;
            }
            }
            j(i, 0) = -ld_value * exponent / sigma;
            j(i, 1) = -ld_value * d_exponent_dw;
            j(i, 2) = p[2] != 0.0 ? ld_value / p[2] : std::exp(-exponent);
        }
        return j;
    };
    return problem;
}

TemperatureFit fit_temperature(const BathTable& table, std::span<const double> t_k, std::span<const double> ld,
                               const FitConfig& config, const TemperatureOptions& options) {
    const auto problem = temperature_problem(table, t_k, ld, options);
    TemperatureFit fit;
    fit.variant = options.variant;
    fit.result = least_squares(problem, config);
    fit.sigma_a2 = fit.result.best_fit[0];
    fit.sigma_error_a2 = fit.result.uncertainty[0];
    if (options.variant != DecoherenceModel::Equilibrium) {
        fit.w_nm = fit.result.best_fit[1];
        fit.w_error_nm = fit.result.uncertainty[1];
    }
    fit.ld0 = fit.result.best_fit[2];
    return fit;
}

// --- kick-energy ratio ----------------------------------------------------------

FitProblem kick_ratio_problem(const RotorBasis& basis, std::span<const double> energies_uj,
                              std::span<const double> ratios, const KickRatioOptions& options) {
    require_same_length(energies_uj.size(), ratios.size(), "kick-ratio fit");
    if (energies_uj.size() < 4) {
        throw ValidationError("kick-ratio fit: need at least four energies");
    }
    for (double e : energies_uj) {
        if (!(e > 0.0)) {
            throw ValidationError("kick-ratio fit: energies must be positive");
        }
    }
    const KickOptions kick = options.kick;

    FitProblem problem;
    problem.model_name = "LD(3,5)/LD(1,3) vs kick energy";
    problem.x = to_vector(energies_uj);
    problem.y = to_vector(ratios);
    problem.parameters = {
        {"p3", options.initial_p3, 0.0, 0.5},
        {"f5", options.initial_f5, 0.0, 1.0},
        {"p_per_uJ", options.initial_p_per_uj, 0.05, 1.2, !options.fit_p_per_uj},
    };
    // The ensemble coherences are linear in the initial populations, so the
    // per-shell coherences at each energy depend on p_per_uJ alone.
    using ShellCoherences = std::array<std::array<std::complex<double>, 3>, 2>; // [N = 1, 3][initial N = 1, 3, 5]
    using Key = std::pair<double, std::vector<double>>;
    auto cache = std::make_shared<std::map<Key, std::vector<ShellCoherences>>>();
    problem.model = [&basis, kick, cache](const Eigen::VectorXd& e, const Eigen::VectorXd& p) {
        Key key{p[2], std::vector<double>(e.data(), e.data() + e.size())};
        auto it = cache->find(key);
        if (it == cache->end()) {
            if (cache->size() > 4096) {
                cache->clear();
            }
            std::vector<ShellCoherences> per_energy;
            for (Eigen::Index i = 0; i < e.size(); ++i) {
                ShellCoherences sc;
                const InitialMixture pure[] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
                for (std::size_t s = 0; s < 3; ++s) {
                    const auto ensemble = kicked_ensemble(basis, pure[s], p[2] * e[i], kick);
                    sc[0][s] = coherence(ensemble, 1);
                    sc[1][s] = coherence(ensemble, 3);
                }
                per_energy.push_back(sc);
            }
            it = cache->emplace(std::move(key), std::move(per_energy)).first;
        }
        const double p3 = p[0];
        const double p5 = p[0] * p[1];
        const std::array<double, 3> weights{1.0 - p3 - p5, p3, p5};
        Eigen::VectorXd out(e.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            const auto& sc = it->second[static_cast<std::size_t>(i)];
            std::complex<double> first;
            std::complex<double> second;
            for (std::size_t s = 0; s < 3; ++s) {
                first += weights[s] * sc[0][s];
                second += weights[s] * sc[1][s];
            }
            if (std::abs(first) < 1e-14) {
                throw ModelError("kick-ratio fit: (1,3) coherence vanishes at " + std::to_string(e[i]) + " uJ");
            }
            out[i] = std::abs(second) / std::abs(first);
        }
        return out;
    };
    return problem;
}

KickRatioFit fit_kick_ratio(const RotorBasis& basis, std::span<const double> energies_uj,
                            std::span<const double> ratios, const FitConfig& config,
                            const KickRatioOptions& options) {
    const auto problem = kick_ratio_problem(basis, energies_uj, ratios, options);
    KickRatioFit fit;
    fit.result = least_squares(problem, config);
    const auto& v = fit.result.best_fit;
    const auto& c = fit.result.covariance;
    fit.p3 = v[0];
    fit.p5 = v[0] * v[1];
    fit.p1 = 1.0 - fit.p3 - fit.p5;
    fit.p3_error = fit.result.uncertainty[0];
    const double var_p5 = v[1] * v[1] * c(0, 0) + v[0] * v[0] * c(1, 1) + 2.0 * v[0] * v[1] * c(0, 1);
    fit.p5_error = std::sqrt(std::max(var_p5, 0.0));
    fit.p_per_uj = v[2];
    fit.p_per_uj_error = fit.result.uncertainty[2];
    fit.identifiable = fit.result.uncertainty_valid;
    return fit;
}

// --- bimolecular decay ----------------------------------------------------------

FitProblem bimolecular_problem(const BathTable& table, std::span<const double> t_k,
                               std::span<const double> intensity, const BimolecularOptions& options) {
    require_same_length(t_k.size(), intensity.size(), "bimolecular fit");
    options.annihilation.validate();
    if (!(options.delay_ms > 0.0)) {
        throw ValidationError("bimolecular fit: the delay must be positive");
    }
    std::vector<double> k_rate; // cm³/s per temperature
    for (double t : t_k) {
        k_rate.push_back(annihilation_rate(table, t, options.annihilation));
    }
    const double delay_s = options.delay_ms * units::ms_to_s;
    constexpr double unit = 1e13;

    FitProblem problem;
    problem.model_name = "bimolecular decay N(t; T)";
    problem.x = to_vector(t_k);
    problem.y = to_vector(intensity);
    problem.parameters = {
        {"n0_1e13", options.annihilation.n0_cm3 / unit, 1e-3, 1e3},
        {"scale", 1.0, 1e-9, 1e9, !options.free_scale},
    };
    problem.model = [k_rate, delay_s](const Eigen::VectorXd& t, const Eigen::VectorXd& p) {
        Eigen::VectorXd out(t.size());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            out[i] = p[1] * p[0] / (1.0 + k_rate[static_cast<std::size_t>(i)] * p[0] * unit * delay_s);
        }
        return out;
    };
    problem.jacobian = [k_rate, delay_s](const Eigen::VectorXd& t, const Eigen::VectorXd& p) {
        Eigen::MatrixXd j(t.size(), 2);
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const double d = 1.0 + k_rate[static_cast<std::size_t>(i)] * p[0] * unit * delay_s;
            j(i, 0) = p[1] / (d * d);
            j(i, 1) = p[0] / d;
        }
        return j;
    };
    return problem;
}

BimolecularFit fit_bimolecular(const BathTable& table, std::span<const double> t_k,
                               std::span<const double> intensity, const FitConfig& config,
                               const BimolecularOptions& options) {
    const auto problem = bimolecular_problem(table, t_k, intensity, options);
    BimolecularFit fit;
    fit.result = least_squares(problem, config);
    fit.n0_cm3 = fit.result.best_fit[0] * 1e13;
    fit.n0_error_cm3 = fit.result.uncertainty[0] * 1e13;
    fit.scale = fit.result.best_fit[1];
    fit.scale_error = fit.result.uncertainty[1];
    return fit;
}

} // namespace helirot
