#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dice/chain.hpp"
#include "dice/ladder.hpp"
#include "dice/sampling.hpp"

namespace dice {

// Deterministic update: walk the cumulative thresholds over N_B(i) in
// ascending state order; stay put when u clears them all.
int update_general(const TransitionKernel& K, int i, int B, double u);

// Univariate update from the ladder weights alone; monotone in i.
struct MonotoneUpdate {
    int k = 0;                // top state
    std::vector<double> up;   // up[i]: threshold for i -> i+1 on B = 1
    std::vector<double> down; // down[i-1]: threshold for i -> i-1 on B = 0

    static MonotoneUpdate from_ladder(const Ladder& L);
    int operator()(int i, int B, double u) const {
        if (B == 0) return (i > 0 && u <= down[i - 1]) ? i - 1 : i;
        return (i < k && u <= up[i]) ? i + 1 : i;
    }
};

struct CftpOptions {
    uint64_t iteration_cap = 10'000'000;
    bool doubling = false;  // extend T by doubling instead of T <- T+1
};

// Stored randomness of one run, newest first is at the back: B[t] and U[t]
// belong to time -(t+1). Never redrawn across backward extensions.
struct CftpRun {
    std::vector<int8_t> B;
    std::vector<double> U;
    std::vector<std::vector<int>> trace;  // per-iteration endpoint states (optional)
    bool want_trace = false;
};

struct CftpResult {
    int state = 0;
    uint64_t die_rolls = 0;      // rolls consumed, including any fair-bit rolls
    uint64_t uniform_draws = 0;
    uint64_t horizon = 0;        // final T
};

// Tracks the time-0 endpoint of every start state as a composed map; one new
// (B, U) pair per unit of backward extension. Requires fine + connected.
CftpResult cftp_general(const TransitionKernel& K, const Ladder& L, DieSource& die,
                        UniformSource& uniforms, const CftpOptions& opt = {},
                        CftpRun* run = nullptr);

// Tracks only the chains from 0 and k, replaying the stored randomness from
// -T; identical output law to cftp_general. Univariate only.
CftpResult cftp_monotone(const TransitionKernel& K, const Ladder& L, DieSource& die,
                         UniformSource& uniforms, const CftpOptions& opt = {},
                         CftpRun* run = nullptr);

// Re-applies the stored randomness of a finished run; must reproduce the
// same coalesced state bit for bit.
int replay(const CftpRun& run, const TransitionKernel& K, const Ladder& L);

// Block rejection baseline: pick a state uniformly, roll degree() times
// against one fixed ordering of its monomial, accept with probability
// R_i / max R. Exact, and exponentially slow in the degree.
struct RejectionResult {
    int state = 0;
    uint64_t die_rolls = 0;
};
RejectionResult naive_rejection(const Ladder& L, DieSource& die, UniformSource& uniforms,
                                uint64_t attempt_cap = 100'000'000);

}  // namespace dice
