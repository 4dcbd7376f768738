#include "dice/cftp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dice/errors.hpp"

namespace dice {

int update_general(const TransitionKernel& K, int i, int B, double u) {
    for (const auto& e : K.row[i][B])
        if (u <= e.cum) return e.j;
    return i;
}

MonotoneUpdate MonotoneUpdate::from_ladder(const Ladder& L) {
    if (L.m != 1) throw Error("monotone update requires m = 1");
    if (!L.fine() || !L.connected())
        throw Error("monotone update requires a fine and connected ladder");
    MonotoneUpdate f;
    f.k = L.size() - 1;
    f.up.resize(f.k);
    f.down.resize(f.k);
    for (int i = 0; i < f.k; ++i) {
        double Ri = L.states[i].R, Rn = L.states[i + 1].R;
        f.up[i] = Rn / std::max(Ri, Rn);
        f.down[i] = Ri / std::max(Ri, Rn);
    }
    return f;
}

namespace {

void extend(CftpRun& run, DieSource& die, UniformSource& uniforms, uint64_t steps) {
    for (uint64_t s = 0; s < steps; ++s) {
        run.B.push_back(static_cast<int8_t>(die.roll()));
        run.U.push_back(uniforms.next());
    }
}

}  // namespace

CftpResult cftp_general(const TransitionKernel& K, const Ladder& L, DieSource& die,
                        UniformSource& uniforms, const CftpOptions& opt, CftpRun* run_out) {
    const int k1 = L.size();
    uint64_t rolls0 = die.rolls();
    uint64_t u0 = uniforms.draws();
    CftpRun local;
    CftpRun& run = run_out ? *run_out : local;
    run.B.clear();
    run.U.clear();
    run.trace.clear();

    if (k1 == 1) return {0, 0, 0, 0};

    // M[i] = endpoint at time 0 of the chain started at i at time -T.
    // Prepending a step at time -(T+1) composes on the input side:
    // M'(i) = M(phi(i, B, U)), so each extension costs O(k).
    std::vector<int32_t> M(k1), step(k1);
    std::iota(M.begin(), M.end(), 0);
    bool coalesced = false;
    uint64_t T = 0;
    while (!coalesced) {
        uint64_t add = opt.doubling ? std::max<uint64_t>(T, 1) : 1;
        for (uint64_t s = 0; s < add; ++s) {
            if (T >= opt.iteration_cap)
                throw IterationCapExceeded("cftp_general: horizon cap reached");
            extend(run, die, uniforms, 1);
            int B = run.B.back();
            double u = run.U.back();
            for (int i = 0; i < k1; ++i) step[i] = M[update_general(K, i, B, u)];
            M.swap(step);
            ++T;
        }
        coalesced = std::all_of(M.begin(), M.end(), [&](int32_t x) { return x == M[0]; });
        if (run.want_trace) run.trace.emplace_back(M.begin(), M.end());
    }
    return {M[0], die.rolls() - rolls0, uniforms.draws() - u0, T};
}

CftpResult cftp_monotone(const TransitionKernel& K, const Ladder& L, DieSource& die,
                         UniformSource& uniforms, const CftpOptions& opt, CftpRun* run_out) {
    MonotoneUpdate phi = MonotoneUpdate::from_ladder(L);
    (void)K;
    uint64_t rolls0 = die.rolls();
    uint64_t u0 = uniforms.draws();
    CftpRun local;
    CftpRun& run = run_out ? *run_out : local;
    run.B.clear();
    run.U.clear();
    run.trace.clear();

    if (L.size() == 1) return {0, 0, 0, 0};

    uint64_t T = 0;
    while (true) {
        uint64_t add = opt.doubling ? std::max<uint64_t>(T, 1) : 1;
        if (T + add > opt.iteration_cap)
            throw IterationCapExceeded("cftp_monotone: horizon cap reached");
        extend(run, die, uniforms, add);
        T += add;

        // Replay both extremal chains from -T; once they meet they evolve
        // identically, so fall through with a single chain.
        int lo = 0, hi = phi.k;
        for (std::size_t t = run.B.size(); t-- > 0;) {
            if (lo == hi) {
                lo = hi = phi(lo, run.B[t], run.U[t]);
            } else {
                lo = phi(lo, run.B[t], run.U[t]);
                hi = phi(hi, run.B[t], run.U[t]);
            }
        }
        if (run.want_trace) run.trace.push_back({lo, hi});
        if (lo == hi)
            return {lo, die.rolls() - rolls0, uniforms.draws() - u0, T};
    }
}

int replay(const CftpRun& run, const TransitionKernel& K, const Ladder& L) {
    const int k1 = L.size();
    std::vector<int32_t> M(k1), step(k1);
    std::iota(M.begin(), M.end(), 0);
    for (std::size_t t = 0; t < run.B.size(); ++t) {
        for (int i = 0; i < k1; ++i) step[i] = M[update_general(K, i, run.B[t], run.U[t])];
        M.swap(step);
    }
    return M[0];
}

RejectionResult naive_rejection(const Ladder& L, DieSource& die, UniformSource& uniforms,
                                uint64_t attempt_cap) {
    const int k1 = L.size();
    double rmax = 0.0;
    for (const auto& s : L.states) rmax = std::max(rmax, s.R);
    uint64_t rolls0 = die.rolls();

    // One fixed face ordering per state: faces in index order, each repeated
    // by its exponent. Early abort on the first mismatching roll.
    for (uint64_t attempt = 0; attempt < attempt_cap; ++attempt) {
        int pick = std::min(k1 - 1, static_cast<int>(uniforms.next() * k1));
        const auto& n = L.states[pick].n.e;
        bool match = true;
        for (int b = 0; b <= L.m && match; ++b) {
            for (int32_t r = 0; r < n[b] && match; ++r) {
                if (die.roll() != b) match = false;
            }
        }
        if (!match) continue;
        if (uniforms.next() * rmax <= L.states[pick].R)
            return {pick, die.rolls() - rolls0};
    }
    throw IterationCapExceeded("naive_rejection: attempt cap reached");
}

}  // namespace dice
