#include "helirot/fine_structure.hpp"

#include "helirot/errors.hpp"

#include <algorithm>
#include <cmath>

namespace helirot {

namespace {

void require_odd_manifold(int n) {
    if (n < 1 || n % 2 == 0) {
        throw ValidationError("fine structure: N = " + std::to_string(n) + " is not in the odd-N manifold");
    }
}

bool couples(int n, int j) { return n >= 0 && j >= std::abs(n - 1) && j <= n + 1; }

double diagonal(int n, int j, double b, double lambda, double gamma) {
    const double jj = j;
    if (n == j) {
        return b * jj * (jj + 1.0) + 2.0 * lambda / 3.0 - gamma;
    }
    if (n == j - 1) {
        return b * jj * (jj - 1.0) - (2.0 * lambda / 3.0) * (jj - 1.0) / (2.0 * jj + 1.0) + gamma * (jj - 1.0);
    }
    return b * (jj + 1.0) * (jj + 2.0) - (2.0 * lambda / 3.0) * (jj + 2.0) / (2.0 * jj + 1.0) - gamma * (jj + 2.0);
}

double off_diagonal(int j, double lambda) {
    const double jj = j;
    return 2.0 * lambda * std::sqrt(jj * (jj + 1.0)) / (2.0 * jj + 1.0);
}

} // namespace

Eigen::Matrix3d triplet_sigma_block(int j, double b_ghz, double lambda_ghz, double gamma_ghz) {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (int k = 0; k < 3; ++k) {
        const int n = j - 1 + k;
        if (couples(n, j)) {
            h(k, k) = diagonal(n, j, b_ghz, lambda_ghz, gamma_ghz);
        }
    }
    if (couples(j - 1, j) && couples(j + 1, j)) {
        h(0, 2) = h(2, 0) = off_diagonal(j, lambda_ghz);
    }
    return h;
}

FineManifold fine_levels(int n, const MoleculeConstants& constants, int v) {
    require_odd_manifold(n);
    const double b = constants.b(v) * 1e3;
    const double lambda = constants.lambda_ss_ghz;
    const double gamma = constants.gamma_sr_ghz;
    const double rigid = b * n * (n + 1.0);

    FineManifold levels{};
    // J = N - 1: upper root of the {N-2, N} block of J = N - 1.
    {
        const int j = n - 1;
        double e = diagonal(n, j, b, lambda, gamma);
        if (couples(n - 2, j)) {
            const double a = diagonal(n - 2, j, b, lambda, gamma);
            const double half_gap = 0.5 * (e - a);
            e = 0.5 * (a + e) + std::sqrt(half_gap * half_gap + std::pow(off_diagonal(j, lambda), 2));
        }
        levels[0] = {n, j, e - rigid};
    }
    levels[1] = {n, n, diagonal(n, n, b, lambda, gamma) - rigid};
    // J = N + 1: lower root of the {N, N+2} block of J = N + 1.
    {
        const int j = n + 1;
        const double a = diagonal(n, j, b, lambda, gamma);
        const double c = diagonal(n + 2, j, b, lambda, gamma);
        const double half_gap = 0.5 * (c - a);
        const double e = 0.5 * (a + c) - std::sqrt(half_gap * half_gap + std::pow(off_diagonal(j, lambda), 2));
        levels[2] = {n, j, e - rigid};
    }
    return levels;
}

FineManifold fine_levels_diagonalized(int n, const MoleculeConstants& constants, int v) {
    require_odd_manifold(n);
    const double b = constants.b(v) * 1e3;
    const double rigid = b * n * (n + 1.0);
    FineManifold levels{};
    for (int k = 0; k < 3; ++k) {
        const int j = n - 1 + k;
        const Eigen::Matrix3d h = triplet_sigma_block(j, b, constants.lambda_ss_ghz, constants.gamma_sr_ghz);
        // Restrict to the N values that exist for this J.
        std::vector<int> rows;
        for (int r = 0; r < 3; ++r) {
            if (couples(j - 1 + r, j)) {
                rows.push_back(r);
            }
        }
        Eigen::MatrixXd sub(rows.size(), rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < rows.size(); ++c) {
                sub(r, c) = h(rows[r], rows[c]);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub);
        // The eigenvector dominated by N is the level labelled (N, J).
        const auto target = std::find(rows.begin(), rows.end(), n - j + 1) - rows.begin();
        Eigen::Index best = 0;
        solver.eigenvectors().row(target).cwiseAbs().maxCoeff(&best);
        levels[k] = {n, j, solver.eigenvalues()(best) - rigid};
    }
    return levels;
}

double splitting_ghz(const FineManifold& levels) {
    const auto [lo, hi] = std::minmax_element(levels.begin(), levels.end(), [](const auto& a, const auto& b) {
        return a.offset_ghz < b.offset_ghz;
    });
    return hi->offset_ghz - lo->offset_ghz;
}

bool two_photon_reachable(int j1, int j2) {
    if (j1 < 0 || j2 < 0) {
        return false;
    }
    auto step = [](int a, int b) { return a == b || std::abs(a - b) == 2; };
    for (int jd = 0; jd <= std::max(j1, j2) + 2; ++jd) {
        if (step(j1, jd) && step(jd, j2)) {
            return true;
        }
    }
    return false;
}

std::vector<TransitionPair> allowed_pairs(int n1, int n2) {
    if (n1 < 0 || n2 != n1 + 2) {
        throw ValidationError("allowed pairs: coherences couple N and N+2 only (got " + std::to_string(n1) + ", " +
                              std::to_string(n2) + ")");
    }
    std::vector<TransitionPair> pairs;
    for (int j1 = std::max(0, n1 - 1); j1 <= n1 + 1; ++j1) {
        if (!couples(n1, j1)) {
            continue;
        }
        for (int j2 = std::max(0, n2 - 1); j2 <= n2 + 1; ++j2) {
            if (couples(n2, j2) && two_photon_reachable(j1, j2)) {
                pairs.push_back({j1, j2});
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

std::vector<double> beat_frequencies(std::span<const TransitionPair> pairs, const FineManifold& lower,
                                     const FineManifold& upper, double b_thz) {
    auto offset = [](const FineManifold& levels, int j) {
        for (const auto& level : levels) {
            if (level.j == j) {
                return level.offset_ghz;
            }
        }
        throw ValidationError("beat frequencies: J = " + std::to_string(j) + " not in manifold N = " +
                              std::to_string(levels[1].n));
    };
    const double center = rotor_energy(upper[1].n, b_thz) - rotor_energy(lower[1].n, b_thz);
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        out.push_back(center + (offset(upper, pair.j2) - offset(lower, pair.j1)) * 1e-3);
    }
    return out;
}

std::vector<double> beat_frequencies(int n1, const MoleculeConstants& constants, int v) {
    const auto pairs = allowed_pairs(n1, n1 + 2);
    return beat_frequencies(pairs, fine_levels(n1, constants, v), fine_levels(n1 + 2, constants, v), constants.b(v));
}

} // namespace helirot
