#pragma once

// Spin-rotation / spin-spin fine structure of a ³Σ rotational manifold and
// the two-photon-allowed coherence pairs between N and N+2.
//
// Effective Hamiltonian (Hund's case b):
//   H = B N² + γ N·S + (2/3) λ (3 S_z² - S²)
// For fixed J it couples N = J-1 and N = J+1; N = J is isolated.

#include "helirot/rotor.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace helirot {

struct FineLevel {
    int n = 0;
    int j = 0;
    double offset_ghz = 0.0; ///< relative to B·N(N+1)
};

/// Levels J = N-1, N, N+1 (in that order).
using FineManifold = std::array<FineLevel, 3>;

struct TransitionPair {
    int j1 = 0; ///< fine level of the lower N
    int j2 = 0; ///< fine level of the upper N
    friend bool operator==(const TransitionPair&, const TransitionPair&) = default;
    friend auto operator<=>(const TransitionPair&, const TransitionPair&) = default;
};

/// Closed-form (Schlapp-type) level offsets for odd N >= 1.
FineManifold fine_levels(int n, const MoleculeConstants& constants, int v = 0);

/// Same levels from numerical diagonalization of the J blocks.
FineManifold fine_levels_diagonalized(int n, const MoleculeConstants& constants, int v = 0);

/// Case-(b) matrix for fixed J over N = J-1, J, J+1 (GHz, including B·N(N+1)).
/// Rows for N values that cannot couple to J (N < 0, or J outside |N-1|..N+1)
/// are returned as zero and must be ignored.
Eigen::Matrix3d triplet_sigma_block(int j, double b_ghz, double lambda_ghz, double gamma_ghz);

/// Spread max - min of the level offsets of one manifold.
double splitting_ghz(const FineManifold& levels);

/// Two photon steps with ΔJ ∈ {0, ±2} through a common intermediate J.
bool two_photon_reachable(int j1, int j2);

/// Coherence pairs (J1, J2) between fine levels of N1 and N2 = N1 + 2,
/// sorted. Throws ValidationError when N2 != N1 + 2.
std::vector<TransitionPair> allowed_pairs(int n1, int n2);

/// ν_k = [E(N2,J2) - E(N1,J1)]/h in THz with E = B·N(N+1) + offset.
std::vector<double> beat_frequencies(std::span<const TransitionPair> pairs, const FineManifold& lower,
                                     const FineManifold& upper, double b_thz);

/// Convenience: pairs and frequencies for (N1, N1+2) in vibrational level v.
std::vector<double> beat_frequencies(int n1, const MoleculeConstants& constants, int v = 0);

} // namespace helirot
