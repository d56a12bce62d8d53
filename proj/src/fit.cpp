#include "helirot/fit.hpp"

#include "helirot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace helirot {

namespace {

// Finite-difference scale for a parameter: relative to its value, but never
// smaller than a fraction of a finite bound interval.
double step_scale(const FitParameter& p, double value) {
    double typical = 1.0;
    if (std::isfinite(p.lower) && std::isfinite(p.upper)) {
        typical = 1e-3 * (p.upper - p.lower);
    }
    return std::max(std::abs(value), typical);
}

std::string describe(const FitProblem& problem, const Eigen::VectorXd& params) {
    std::ostringstream out;
    out << problem.model_name << " at (";
    for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
        out << (i ? ", " : "") << problem.parameters[i].name << " = " << params[static_cast<Eigen::Index>(i)];
    }
    out << ")";
    return out.str();
}

class Evaluator {
public:
    explicit Evaluator(const FitProblem& problem) : problem_(problem) {
        for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
            if (!problem.parameters[i].fixed) {
                free_.push_back(i);
            }
        }
        weights_ = Eigen::VectorXd::Ones(problem.y.size());
        if (problem.sigma) {
            weights_ = problem.sigma->cwiseInverse();
        }
    }

    const std::vector<std::size_t>& free_indices() const { return free_; }

    Eigen::VectorXd predict(const Eigen::VectorXd& params) const {
        Eigen::VectorXd out = problem_.model(problem_.x, params);
        if (out.size() != problem_.y.size() || !out.allFinite()) {
            throw ModelError("non-finite or mis-sized model output for " + describe(problem_, params));
        }
        return out;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& params) const {
        return (predict(params) - problem_.y).cwiseProduct(weights_);
    }

    /// Weighted Jacobian restricted to free parameters.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& params) const {
        Eigen::MatrixXd full;
        if (problem_.jacobian) {
            full = problem_.jacobian(problem_.x, params);
            if (full.rows() != problem_.y.size() || full.cols() != params.size() || !full.allFinite()) {
                throw ModelError("non-finite or mis-sized Jacobian for " + describe(problem_, params));
            }
        } else {
            full = numerical_jacobian(problem_, params);
        }
        Eigen::MatrixXd j(full.rows(), static_cast<Eigen::Index>(free_.size()));
        for (std::size_t k = 0; k < free_.size(); ++k) {
            j.col(static_cast<Eigen::Index>(k)) = full.col(static_cast<Eigen::Index>(free_[k])).cwiseProduct(weights_);
        }
        return j;
    }

    Eigen::VectorXd clamp(Eigen::VectorXd params) const {
        for (std::size_t i = 0; i < problem_.parameters.size(); ++i) {
            const auto& p = problem_.parameters[i];
            auto& v = params[static_cast<Eigen::Index>(i)];
            v = std::clamp(v, p.lower, p.upper);
        }
        return params;
    }

private:
    const FitProblem& problem_;
    std::vector<std::size_t> free_;
    Eigen::VectorXd weights_;
};

struct RunResult {
    Eigen::VectorXd params;
    double cost = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> history;
};

RunResult levenberg_marquardt(const Evaluator& eval, Eigen::VectorXd params, const FitConfig& config) {
    const auto& free = eval.free_indices();
    RunResult run;
    Eigen::VectorXd r = eval.residual(params);
    double cost = 0.5 * r.squaredNorm();
    run.history.push_back(cost);
    double mu = 1e-3;

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        run.iterations = iter + 1;
        if (cost <= 1e-300) {
            run.converged = true;
            break;
        }
        const Eigen::MatrixXd j = eval.jacobian(params);
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd g = j.transpose() * r;
        Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));

        bool accepted = false;
        while (mu < 1e20) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += mu * diag;
            const Eigen::VectorXd delta = a.ldlt().solve(-g);
            Eigen::VectorXd trial = params;
            for (std::size_t k = 0; k < free.size(); ++k) {
                trial[static_cast<Eigen::Index>(free[k])] += delta[static_cast<Eigen::Index>(k)];
            }
            trial = eval.clamp(trial);
            if ((trial - params).norm() == 0.0) {
                break;
            }
            const Eigen::VectorXd r_trial = eval.residual(trial);
            const double trial_cost = 0.5 * r_trial.squaredNorm();
            if (trial_cost < cost) {
                const double change = (cost - trial_cost) / cost;
                params = trial;
                r = r_trial;
                cost = trial_cost;
                run.history.push_back(cost);
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                if (change < config.relative_tolerance) {
                    run.converged = true;
                }
                break;
            }
            mu *= 4.0;
        }
        if (!accepted) {
            // No downhill step exists at any damping: a stationary point of
            // the bounded problem.
            run.converged = true;
            break;
        }
        if (run.converged) {
            break;
        }
    }
    run.params = params;
    run.cost = cost;
    return run;
}

Eigen::VectorXd random_start(const FitProblem& problem, std::mt19937_64& rng) {
    Eigen::VectorXd start = problem.initial_values();
    for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
        const auto& p = problem.parameters[i];
        const double u = unit_uniform(rng);
        if (p.fixed) {
            continue;
        }
        double lo = p.lower;
        double hi = p.upper;
        const double spread = std::max(std::abs(p.initial), 1.0);
        if (!std::isfinite(lo)) {
            lo = std::isfinite(hi) ? hi - 2.0 * spread : p.initial - spread;
        }
        if (!std::isfinite(hi)) {
            hi = lo + 2.0 * spread;
        }
        start[static_cast<Eigen::Index>(i)] = lo + u * (hi - lo);
    }
    return start;
}

} // namespace

void FitProblem::validate() const {
    if (!model) {
        throw ValidationError("fit problem '" + model_name + "': no model function");
    }
    if (x.size() != y.size()) {
        throw ValidationError("fit problem '" + model_name + "': x and y differ in length");
    }
    if (sigma) {
        if (sigma->size() != y.size()) {
            throw ValidationError("fit problem '" + model_name + "': sigma and y differ in length");
        }
        if ((sigma->array() <= 0.0).any() || !sigma->allFinite()) {
            throw ValidationError("fit problem '" + model_name + "': sigma must be positive and finite");
        }
    }
    if (!y.allFinite()) {
        throw ValidationError("fit problem '" + model_name + "': non-finite data");
    }
    for (const auto& p : parameters) {
        if (!(p.lower <= p.upper)) {
            throw ValidationError("fit problem '" + model_name + "': bounds of " + p.name + " are not ordered");
        }
        if (!(p.initial >= p.lower && p.initial <= p.upper)) {
            throw ValidationError("fit problem '" + model_name + "': initial " + p.name + " outside its bounds");
        }
    }
    const auto n_free = free_count();
    if (n_free == 0) {
        throw ValidationError("fit problem '" + model_name + "': no free parameters");
    }
    if (static_cast<std::size_t>(y.size()) <= n_free) {
        throw ValidationError("fit problem '" + model_name + "': need more data points than free parameters");
    }
}

std::size_t FitProblem::free_count() const {
    return static_cast<std::size_t>(
        std::count_if(parameters.begin(), parameters.end(), [](const FitParameter& p) { return !p.fixed; }));
}

Eigen::VectorXd FitProblem::initial_values() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(parameters.size()));
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = parameters[i].initial;
    }
    return v;
}

std::size_t FitProblem::index(std::string_view name) const {
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (parameters[i].name == name) {
            return i;
        }
    }
    throw std::out_of_range("unknown fit parameter '" + std::string(name) + "'");
}

double FitResult::value(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw std::out_of_range("unknown fit parameter '" + std::string(name) + "'");
    }
    return best_fit[it - names.begin()];
}

double FitResult::error(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw std::out_of_range("unknown fit parameter '" + std::string(name) + "'");
    }
    return uncertainty[it - names.begin()];
}

Eigen::MatrixXd numerical_jacobian(const FitProblem& problem, const Eigen::VectorXd& params) {
    const Eigen::VectorXd base = problem.model(problem.x, params);
    Eigen::MatrixXd j(base.size(), params.size());
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        const auto& p = problem.parameters[static_cast<std::size_t>(i)];
        double h = 1.4901161193847656e-8 * step_scale(p, params[i]);
        if (params[i] + h > p.upper) {
            h = -h;
        }
        Eigen::VectorXd shifted = params;
        shifted[i] += h;
        j.col(i) = (problem.model(problem.x, shifted) - base) / h;
    }
    return j;
}

Eigen::MatrixXd central_jacobian(const FitProblem& problem, const Eigen::VectorXd& params, double relative_step) {
    Eigen::MatrixXd j(problem.y.size(), params.size());
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        const auto& p = problem.parameters[static_cast<std::size_t>(i)];
        const double h = relative_step * step_scale(p, params[i]);
        Eigen::VectorXd up = params;
        Eigen::VectorXd down = params;
        up[i] += h;
        down[i] -= h;
        j.col(i) = (problem.model(problem.x, up) - problem.model(problem.x, down)) / (2.0 * h);
    }
    return j;
}

FitResult least_squares(const FitProblem& problem, const FitConfig& config) {
    problem.validate();
    if (config.max_iterations <= 0 || !(config.relative_tolerance > 0.0) || config.restarts < 0) {
        throw ValidationError("fit config: max_iterations and relative_tolerance must be positive, restarts >= 0");
    }
    const Evaluator eval(problem);

    std::mt19937_64 rng(config.seed);
    std::vector<Eigen::VectorXd> starts{problem.initial_values()};
    for (int r = 0; r < config.restarts; ++r) {
        starts.push_back(random_start(problem, rng));
    }

    RunResult best;
    bool have_best = false;
    for (const auto& start : starts) {
        RunResult run = levenberg_marquardt(eval, start, config);
        if (!have_best || run.cost < best.cost) {
            best = std::move(run);
            have_best = true;
        }
    }

    FitResult result;
    for (const auto& p : problem.parameters) {
        result.names.push_back(p.name);
    }
    result.best_fit = best.params;
    result.cost = best.cost;
    result.converged = best.converged;
    result.iterations = best.iterations;
    result.starts = static_cast<int>(starts.size());
    result.cost_history = std::move(best.history);

    const Eigen::VectorXd raw = eval.predict(best.params) - problem.y;
    result.residual_rms = std::sqrt(raw.squaredNorm() / static_cast<double>(raw.size()));

    const auto& free = eval.free_indices();
    const auto n = static_cast<Eigen::Index>(free.size());
    const Eigen::MatrixXd j = eval.jacobian(best.params);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double threshold = s.size() > 0 ? s[0] * 1e-12 : 0.0;
    Eigen::VectorXd s_inv = Eigen::VectorXd::Zero(n);
    bool full_rank = s.size() > 0 && s[0] > 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (s[i] > threshold) {
            s_inv[i] = 1.0 / s[i];
        } else {
            full_rank = false;
        }
    }
    Eigen::MatrixXd cov_free = svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
    if (!problem.sigma) {
        const double dof = static_cast<double>(problem.y.size()) - static_cast<double>(n);
        cov_free *= 2.0 * best.cost / dof;
    }

    const auto total = static_cast<Eigen::Index>(problem.parameters.size());
    result.covariance = Eigen::MatrixXd::Zero(total, total);
    result.uncertainty = Eigen::VectorXd::Zero(total);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            result.covariance(static_cast<Eigen::Index>(free[static_cast<std::size_t>(a)]),
                              static_cast<Eigen::Index>(free[static_cast<std::size_t>(b)])) = cov_free(a, b);
        }
        result.uncertainty[static_cast<Eigen::Index>(free[static_cast<std::size_t>(a)])] =
            std::sqrt(std::max(cov_free(a, a), 0.0));
    }
    result.uncertainty_valid = full_rank && result.converged && result.covariance.allFinite();
    return result;
}

} // namespace helirot
