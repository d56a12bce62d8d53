#include "helirot/errors.hpp"
#include "helirot/fit.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace helirot;

namespace {

FitProblem linear_problem() {
    FitProblem p;
    p.model_name = "a*x";
    p.x = Eigen::VectorXd::LinSpaced(10, 0.0, 9.0);
    p.y = 2.5 * p.x;
    p.parameters = {{"a", 1.0}};
    p.model = [](const Eigen::VectorXd& x, const Eigen::VectorXd& q) -> Eigen::VectorXd { return q[0] * x; };
    return p;
}

FitProblem exponential_problem(double noise, std::uint64_t seed) {
    FitProblem p;
    p.model_name = "A exp(-k x) + c";
    p.x = Eigen::VectorXd::LinSpaced(60, 0.0, 6.0);
    p.model = [](const Eigen::VectorXd& x, const Eigen::VectorXd& q) -> Eigen::VectorXd {
        return (q[0] * (-q[1] * x.array()).exp() + q[2]).matrix();
    };
    Eigen::VectorXd truth(3);
    truth << 3.0, 1.3, 0.4;
    p.y = p.model(p.x, truth);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, noise);
    for (Eigen::Index i = 0; i < p.y.size(); ++i) {
        p.y[i] += normal(rng);
    }
    p.parameters = {{"A", 1.0, 0.0, 10.0}, {"k", 0.5, 0.01, 10.0}, {"c", 0.0, -5.0, 5.0}};
    return p;
}

} // namespace

TEST_CASE("linear model with exact data recovers the slope to 1e-10") {
    const auto r = least_squares(linear_problem());
    CHECK(r.converged);
    CHECK(r.value("a") == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(r.residual_rms < 1e-9);
}

TEST_CASE("noisy exponential: estimates within a few sigma, uncertainties positive and finite") {
    const auto p = exponential_problem(0.02, 3);
    const auto r = least_squares(p);
    CHECK(r.converged);
    CHECK(r.uncertainty_valid);
    const std::vector<double> truth{3.0, 1.3, 0.4};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        CHECK(r.uncertainty[idx] > 0.0);
        CHECK(std::isfinite(r.uncertainty[idx]));
        CHECK(std::abs(r.best_fit[idx] - truth[i]) < 4.0 * r.uncertainty[idx]);
    }
    CHECK(r.residual_rms == doctest::Approx(0.02).epsilon(0.3));
}

TEST_CASE("accepted cost never increases") {
    const auto r = least_squares(exponential_problem(0.05, 9));
    REQUIRE(r.cost_history.size() >= 2);
    for (std::size_t i = 1; i < r.cost_history.size(); ++i) {
        CHECK(r.cost_history[i] <= r.cost_history[i - 1]);
    }
}

TEST_CASE("result is deterministic for a seed and invariant under data reordering") {
    FitConfig config;
    config.seed = 77;
    config.restarts = 4;
    const auto p = exponential_problem(0.05, 5);
    const auto a = least_squares(p, config);
    const auto b = least_squares(p, config);
    CHECK(a.best_fit == b.best_fit);
    CHECK(a.cost_history == b.cost_history);

    FitProblem shuffled = p;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p.x.size()));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(1);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); ++i) {
        shuffled.x[static_cast<Eigen::Index>(i)] = p.x[order[i]];
        shuffled.y[static_cast<Eigen::Index>(i)] = p.y[order[i]];
    }
    const auto c = least_squares(shuffled, config);
    for (Eigen::Index i = 0; i < a.best_fit.size(); ++i) {
        CHECK(c.best_fit[i] == doctest::Approx(a.best_fit[i]).epsilon(1e-6));
    }
}

TEST_CASE("bounds are respected and fixed parameters stay put") {
    auto p = exponential_problem(0.0, 1);
    p.parameters[1].upper = 1.0;
    p.parameters[2].fixed = true;
    p.parameters[2].initial = 0.4;
    const auto r = least_squares(p);
    CHECK(r.value("k") <= 1.0);
    CHECK(r.value("k") == doctest::Approx(1.0));
    CHECK(r.value("c") == 0.4);
    CHECK(r.error("c") == 0.0);
}

TEST_CASE("multi-start escapes a poor local minimum") {
    FitProblem p;
    p.model_name = "sin(w x)";
    p.x = Eigen::VectorXd::LinSpaced(200, 0.0, 10.0);
    p.model = [](const Eigen::VectorXd& x, const Eigen::VectorXd& q) -> Eigen::VectorXd {
        return (q[0] * x.array()).sin().matrix();
    };
    Eigen::VectorXd truth(1);
    truth << 4.0;
    p.y = p.model(p.x, truth);
    p.parameters = {{"w", 1.0, 0.1, 6.0}};
    const auto single = least_squares(p);
    FitConfig config;
    config.restarts = 20;
    config.seed = 5;
    const auto multi = least_squares(p, config);
    CHECK(multi.cost <= single.cost);
    CHECK(multi.value("w") == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(multi.starts == 21);
}

TEST_CASE("per-point sigma weights the residuals") {
    auto p = linear_problem();
    p.y[9] += 10.0;
    p.sigma = Eigen::VectorXd::Ones(10);
    (*p.sigma)[9] = 1e6;
    const auto r = least_squares(p);
    CHECK(r.value("a") == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("non-finite model output is rejected with parameter context") {
    auto p = linear_problem();
    p.model = [](const Eigen::VectorXd& x, const Eigen::VectorXd& q) -> Eigen::VectorXd {
        return (x.array() / (q[0] - 1.0)).matrix();
    };
    try {
        least_squares(p);
        FAIL("expected a model error");
    } catch (const ModelError& e) {
        CHECK(std::string(e.what()).find("a = 1") != std::string::npos);
    }
}

TEST_CASE("iteration cap flags non-convergence and returns the best iterate") {
    auto p = exponential_problem(0.05, 2);
    FitConfig config;
    config.max_iterations = 1;
    const auto r = least_squares(p, config);
    CHECK_FALSE(r.converged);
    CHECK_FALSE(r.uncertainty_valid);
    CHECK(r.cost_history.back() <= r.cost_history.front());
}

TEST_CASE("problem validation") {
    auto p = linear_problem();
    p.parameters[0] = {"a", 5.0, 0.0, 1.0};
    CHECK_THROWS_AS(least_squares(p), ValidationError);
    p.parameters[0] = {"a", 0.5, 1.0, 0.0};
    CHECK_THROWS_AS(least_squares(p), ValidationError);
    p.parameters[0] = {"a", 1.0, 0.0, 5.0, true};
    CHECK_THROWS_AS(least_squares(p), ValidationError);
    p = linear_problem();
    p.y.conservativeResize(1);
    p.x.conservativeResize(1);
    CHECK_THROWS_AS(least_squares(p), ValidationError);
    p = linear_problem();
    p.y.conservativeResize(5);
    CHECK_THROWS_AS(least_squares(p), ValidationError);
}

TEST_CASE("finite-difference Jacobians agree with the analytic one") {
    auto p = exponential_problem(0.0, 1);
    Eigen::VectorXd q(3);
    q << 2.0, 0.7, 0.1;
    Eigen::MatrixXd analytic(p.x.size(), 3);
    analytic.col(0) = (-q[1] * p.x.array()).exp().matrix();
    analytic.col(1) = (-q[0] * p.x.array() * (-q[1] * p.x.array()).exp()).matrix();
    analytic.col(2).setOnes();
    CHECK((numerical_jacobian(p, q) - analytic).norm() / analytic.norm() < 1e-6);
    CHECK((central_jacobian(p, q) - analytic).norm() / analytic.norm() < 1e-8);
}

TEST_CASE("unit uniform draws lie in [0, 1)") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double u = unit_uniform(rng);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
