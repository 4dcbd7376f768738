#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dice/expr.hpp"
#include "dice/poly.hpp"

namespace dice {

struct LadderState {
    double R;    // strictly positive weight
    Monomial n;  // exponent vector, total degree shared across states
};

// Parametric distribution pi_i(p) = R_i * p^{n_i} / C(p) with a common total
// degree. States are kept in descending lexicographic order of exponents; in
// the univariate case that puts state i at p^i (1-p)^{k-i}.
struct Ladder {
    int m = 1;
    std::vector<LadderState> states;
    Polynomial denom;  // C(p); retained for reporting and validation only

    int size() const { return static_cast<int>(states.size()); }
    int degree() const { return states.empty() ? 0 : states.front().n.degree(); }

    void sort_canonical();
    bool fine() const;
    bool connected() const;

    // Unnormalized R_i p^{n_i} per state.
    std::vector<double> weights_at(std::span<const double> point) const;
    // Normalized pi(p).
    std::vector<double> distribution_at(std::span<const double> point) const;
};

// Nonnegative (k+1) x (v+1) matrix; row i sums to R_i. Links ladder states
// back to the faces of the f-die.
struct OutcomeMap {
    int v = 0;
    int k1 = 0;
    std::vector<double> w;  // row-major

    static OutcomeMap identity(const Ladder& L);  // v = k, diagonal R_i
    static OutcomeMap trivial(const Ladder& L);   // v = 0, single column R_i

    double at(int state, int outcome) const { return w[static_cast<std::size_t>(state) * (v + 1) + outcome]; }
    double& at(int state, int outcome) { return w[static_cast<std::size_t>(state) * (v + 1) + outcome]; }
    double row_sum(int state) const;
};

struct LadderPlan {
    Ladder ladder;
    OutcomeMap outcomes;
    bool fine = false;
    bool connected = false;
    std::optional<bool> strictly_log_concave;  // set when m == 1
    std::vector<std::string> provenance;

    void refresh_flags();
    // Induced distribution over outcomes 0..v at a simplex point.
    std::vector<double> outcome_distribution(std::span<const double> point) const;
};

// --- operations -----------------------------------------------------------

// (k+1)(m+1) states; child l = i(m+1)+j carries R_i and n_i + e_j. Outcome
// rows are copied to children.
Ladder increase_degree(const Ladder& L);
std::pair<Ladder, OutcomeMap> increase_degree(const Ladder& L, const OutcomeMap& om);

// Joins states with identical exponent vectors; weights and outcome rows are
// summed. The result is fine and sorted canonically.
Ladder thin(const Ladder& L);
std::pair<Ladder, OutcomeMap> thin(const Ladder& L, const OutcomeMap& om);

Ladder augment(const Ladder& L);
std::pair<Ladder, OutcomeMap> augment(const Ladder& L, const OutcomeMap& om);

// Thin once, then augment until connected; at most degree() times.
std::pair<Ladder, OutcomeMap> ensure_connected_fine(const Ladder& L, const OutcomeMap& om,
                                                    int* augmentations = nullptr);

// Univariate only; missing interior monomials count as R = 0.
bool strictly_log_concave(const Ladder& L);

// Augment until strictly log-concave, at most cap times.
std::pair<Ladder, OutcomeMap> ensure_logconcave(const Ladder& L, const OutcomeMap& om,
                                                int cap = 4096, int* augmentations = nullptr);

// Outcome j with probability w[i][j] / R_i, cumulative scan in outcome order.
int sample_outcome(const Ladder& L, const OutcomeMap& om, int state, double u);

// --- decomposition --------------------------------------------------------

struct DecomposeOptions {
    int polya_max = 128;
    int grid_per_dim = 50;
};

// Full pipeline: fraction normalization, per-entry homogenization, joint
// Polya raise, common denominator as a deduplicated product, state
// extraction tagged by outcome, then ensure_connected_fine.
LadderPlan decompose(const RationalTarget& f, const DecomposeOptions& opt = {});

// Strictly interior evaluation grid on the simplex.
std::vector<std::vector<double>> simplex_grid(int m, int points_per_dim);

}  // namespace dice
