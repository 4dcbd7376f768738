#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dice/ladder.hpp"

namespace dice {

// For each state i and die face b: N_b(i) = { j != i : ||n_i - n_j + e_b||_1 = 1 },
// i.e. the states reachable by gaining a b and shedding one other face.
struct NeighborIndex {
    int m = 0;
    int k1 = 0;
    std::vector<std::vector<std::vector<int32_t>>> nb;  // nb[i][b], ascending state order
    std::vector<std::vector<double>> S;                 // S[i][b] = sum of R_j over nb[i][b]

    const std::vector<int32_t>& neighbors(int i, int b) const { return nb[i][b]; }
    double s(int i, int b) const { return S[i][b]; }
};

NeighborIndex build_neighbors(const Ladder& L);

struct KernelEntry {
    int32_t j;
    double v;    // V_{i,j}
    double cum;  // cumulative V over nb[i][b] in ascending state order
};

// Sparse V plus per-(i,b) cumulative thresholds; P(p) = V entrywise-times W
// where W_{i,j} = p_b for j in N_b(i).
struct TransitionKernel {
    int m = 0;
    int k1 = 0;
    std::vector<std::vector<std::vector<KernelEntry>>> row;  // row[i][b]

    double v(int i, int j) const;  // 0 when (i,j) is not an edge
    double min_positive_v() const;
    // Face b such that j in N_b(i), or -1.
    int face_of(const Ladder& L, int i, int j) const;
};

// Algorithm: iteratively pick the (face, state) pair with the largest
// remaining escape mass S_b(i) (ties broken lexicographically on (b, i)),
// assign V_{i,j} = R_j / S_b(i) for the remaining neighbors and the
// reverse entries with the same denominator, then rescale the affected
// escape masses. Requires a fine and connected ladder.
TransitionKernel build_kernel(const Ladder& L);

// Baseline V_{i,j} = R_j / (S_b(i) max S_c(j)) from the static sums.
TransitionKernel suboptimal_kernel(const Ladder& L);

// Dense row-stochastic matrix at a simplex point; entries clamped at 0.
std::vector<std::vector<double>> evaluate_P(const TransitionKernel& K, const Ladder& L,
                                            std::span<const double> point);

// pi_i(p) P_ij == pi_j(p) P_ji for all pairs, relative tolerance tol.
bool check_detailed_balance(const TransitionKernel& K, const Ladder& L,
                            std::span<const double> point, double tol = 1e-12);

// Symbolic rendering of P with one "coeff p_b" cell per edge.
std::string pretty_print_P(const TransitionKernel& K, const Ladder& L);

}  // namespace dice
