#include "dice/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

#include "dice/errors.hpp"

namespace dice {

void Ladder::sort_canonical() {
    std::sort(states.begin(), states.end(),
              [](const LadderState& a, const LadderState& b) { return b.n < a.n; });
}

bool Ladder::fine() const {
    std::map<Monomial, int> seen;
    for (const auto& s : states)
        if (++seen[s.n] > 1) return false;
    return true;
}

bool Ladder::connected() const {
    if (states.size() <= 1) return true;
    // Same total degree means any two states at L1 distance <= 2 differ by
    // exactly e_b - e_c, so candidate neighbors are enumerable.
    std::map<Monomial, std::vector<int>> by_mono;
    for (int i = 0; i < size(); ++i) by_mono[states[i].n].push_back(i);

    std::vector<char> seen(states.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int visited = 1;
    std::vector<int32_t> probe;
    while (!q.empty()) {
        int i = q.front();
        q.pop();
        const auto& n = states[i].n.e;
        auto visit = [&](const Monomial& mono) {
            auto it = by_mono.find(mono);
            if (it == by_mono.end()) return;
            for (int j : it->second) {
                if (!seen[j]) {
                    seen[j] = 1;
                    ++visited;
                    q.push(j);
                }
            }
        };
        visit(states[i].n);  // duplicate monomials (non-fine ladders)
        for (int b = 0; b <= m; ++b) {
            for (int c = 0; c <= m; ++c) {
                if (b == c || n[c] == 0) continue;
                probe = n;
                probe[b] += 1;
                probe[c] -= 1;
                visit(Monomial(probe));
            }
        }
    }
    return visited == size();
}

std::vector<double> Ladder::weights_at(std::span<const double> point) const {
    std::vector<double> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        double t = states[i].R;
        for (int j = 0; j <= m; ++j)
            for (int32_t r = 0; r < states[i].n.e[j]; ++r) t *= point[j];
        out[i] = t;
    }
    return out;
}

std::vector<double> Ladder::distribution_at(std::span<const double> point) const {
    std::vector<double> out = weights_at(point);
    double total = 0.0;
    for (double x : out) total += x;
    for (double& x : out) x /= total;
    return out;
}

OutcomeMap OutcomeMap::identity(const Ladder& L) {
    OutcomeMap om;
    om.v = L.size() - 1;
    om.k1 = L.size();
    om.w.assign(static_cast<std::size_t>(om.k1) * (om.v + 1), 0.0);
    for (int i = 0; i < om.k1; ++i) om.at(i, i) = L.states[i].R;
    return om;
}

OutcomeMap OutcomeMap::trivial(const Ladder& L) {
    OutcomeMap om;
    om.v = 0;
    om.k1 = L.size();
    om.w.resize(om.k1);
    for (int i = 0; i < om.k1; ++i) om.at(i, 0) = L.states[i].R;
    return om;
}

double OutcomeMap::row_sum(int state) const {
    double s = 0.0;
    for (int j = 0; j <= v; ++j) s += at(state, j);
    return s;
}

void LadderPlan::refresh_flags() {
    fine = ladder.fine();
    connected = ladder.connected();
    if (ladder.m == 1 && fine && connected)
        strictly_log_concave = dice::strictly_log_concave(ladder);
    else
        strictly_log_concave.reset();
}

std::vector<double> LadderPlan::outcome_distribution(std::span<const double> point) const {
    std::vector<double> dist(outcomes.v + 1, 0.0);
    double total = 0.0;
    for (int i = 0; i < ladder.size(); ++i) {
        double t = 1.0;
        for (int j = 0; j <= ladder.m; ++j)
            for (int32_t r = 0; r < ladder.states[i].n.e[j]; ++r) t *= point[j];
        for (int o = 0; o <= outcomes.v; ++o) dist[o] += outcomes.at(i, o) * t;
        total += ladder.states[i].R * t;
    }
    for (double& x : dist) x /= total;
    return dist;
}

Ladder increase_degree(const Ladder& L) {
    return increase_degree(L, OutcomeMap::trivial(L)).first;
}

std::pair<Ladder, OutcomeMap> increase_degree(const Ladder& L, const OutcomeMap& om) {
    Ladder out;
    out.m = L.m;
    out.denom = L.denom;
    OutcomeMap om2;
    om2.v = om.v;
    om2.k1 = L.size() * (L.m + 1);
    om2.w.assign(static_cast<std::size_t>(om2.k1) * (om.v + 1), 0.0);
    out.states.reserve(om2.k1);
    for (int i = 0; i < L.size(); ++i) {
        for (int j = 0; j <= L.m; ++j) {
            LadderState child;
            child.R = L.states[i].R;
            child.n = L.states[i].n;
            child.n.e[j] += 1;
            int l = i * (L.m + 1) + j;
            out.states.push_back(std::move(child));
            for (int o = 0; o <= om.v; ++o) om2.at(l, o) = om.at(i, o);
        }
    }
    return {std::move(out), std::move(om2)};
}

Ladder thin(const Ladder& L) {
    return thin(L, OutcomeMap::trivial(L)).first;
}

std::pair<Ladder, OutcomeMap> thin(const Ladder& L, const OutcomeMap& om) {
    // Group by monomial; descending lex order falls out of the map order.
    std::map<Monomial, std::vector<double>> groups;  // monomial -> [R, w_0..w_v]
    for (int i = 0; i < L.size(); ++i) {
        auto& acc = groups[L.states[i].n];
        if (acc.empty()) acc.assign(static_cast<std::size_t>(om.v) + 2, 0.0);
        acc[0] += L.states[i].R;
        for (int o = 0; o <= om.v; ++o) acc[o + 1] += om.at(i, o);
    }
    Ladder out;
    out.m = L.m;
    out.denom = L.denom;
    OutcomeMap om2;
    om2.v = om.v;
    om2.k1 = static_cast<int>(groups.size());
    om2.w.assign(static_cast<std::size_t>(om2.k1) * (om.v + 1), 0.0);
    int l = 0;
    for (auto it = groups.rbegin(); it != groups.rend(); ++it, ++l) {
        out.states.push_back({it->second[0], it->first});
        for (int o = 0; o <= om.v; ++o) om2.at(l, o) = it->second[o + 1];
    }
    return {std::move(out), std::move(om2)};
}

Ladder augment(const Ladder& L) {
    return thin(increase_degree(L));
}

std::pair<Ladder, OutcomeMap> augment(const Ladder& L, const OutcomeMap& om) {
    auto [l2, om2] = increase_degree(L, om);
    return thin(l2, om2);
}

std::pair<Ladder, OutcomeMap> ensure_connected_fine(const Ladder& L, const OutcomeMap& om,
                                                    int* augmentations) {
    auto [cur, curOm] = thin(L, om);
    int d = cur.degree();
    int count = 0;
    while (!cur.connected()) {
        if (count >= d)
            throw Error("ladder failed to connect after degree-many augmentations");
        std::tie(cur, curOm) = augment(cur, curOm);
        ++count;
    }
    if (augmentations) *augmentations = count;
    return {std::move(cur), std::move(curOm)};
}

bool strictly_log_concave(const Ladder& L) {
    if (L.m != 1) throw Error("strict log-concavity is defined here for m=1 only");
    int d = L.degree();
    std::vector<double> r(static_cast<std::size_t>(d) + 1, 0.0);
    for (const auto& s : L.states) r[s.n.e[1]] += s.R;
    for (int i = 1; i < d; ++i)
        if (!(r[i] * r[i] > r[i - 1] * r[i + 1])) return false;
    return true;
}

std::pair<Ladder, OutcomeMap> ensure_logconcave(const Ladder& L, const OutcomeMap& om, int cap,
                                                int* augmentations) {
    Ladder cur = L;
    OutcomeMap curOm = om;
    int count = 0;
    while (!strictly_log_concave(cur)) {
        if (count >= cap)
            throw CapExceeded("ladder not strictly log-concave after " + std::to_string(cap) +
                              " augmentations");
        std::tie(cur, curOm) = augment(cur, curOm);
        ++count;
    }
    if (augmentations) *augmentations = count;
    return {std::move(cur), std::move(curOm)};
}

int sample_outcome(const Ladder& L, const OutcomeMap& om, int state, double u) {
    double target = u * L.states[state].R;
    double acc = 0.0;
    int last = 0;
    for (int o = 0; o <= om.v; ++o) {
        double w = om.at(state, o);
        if (w <= 0.0) continue;
        acc += w;
        last = o;
        if (target < acc) return o;
    }
    return last;
}

std::vector<std::vector<double>> simplex_grid(int m, int points_per_dim) {
    // Compositions of (points_per_dim - 1) shifted to strictly positive
    // coordinates; for m = 1 this is i/(P+1), i = 1..P.
    int G = points_per_dim - 1;
    std::vector<std::vector<double>> out;
    std::vector<int> n(m + 1, 0);
    double denom = G + m + 1;
    auto emit = [&]() {
        std::vector<double> p(m + 1);
        for (int j = 0; j <= m; ++j) p[j] = (n[j] + 1) / denom;
        out.push_back(std::move(p));
    };
    // Enumerate n_0..n_{m-1}; n_m is the remainder.
    std::vector<int> idx(m, 0);
    while (true) {
        int used = 0;
        for (int j = 0; j < m; ++j) used += idx[j];
        if (used <= G) {
            for (int j = 0; j < m; ++j) n[j] = idx[j];
            n[m] = G - used;
            emit();
        }
        int j = m - 1;
        while (j >= 0) {
            if (++idx[j] <= G) break;
            idx[j] = 0;
            --j;
        }
        if (j < 0) break;
    }
    return out;
}

LadderPlan decompose(const RationalTarget& f, const DecomposeOptions& opt) {
    const int nvars = f.m + 1;
    const auto grid = simplex_grid(f.m, opt.grid_per_dim);

    // The target must evaluate into the simplex. Expanded numerators and
    // denominators cancel catastrophically near the corners (alternating
    // binomial coefficients), so the gate leaves room for that noise;
    // boundary-touching targets are left for the Polya raise to reject.
    for (const auto& p : grid) {
        double sum = 0.0;
        for (int i = 0; i <= f.v; ++i) {
            double fi = f.eval_entry(i, p);
            if (fi < -1e-6 || fi > 1.0 + 1e-6)
                throw PolyaExhausted("target leaves the open simplex: entry " +
                                     std::to_string(i) + " = " + std::to_string(fi));
            sum += fi;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw NormalizationError("target entries sum to " + std::to_string(sum) +
                                     " away from 1");
    }

    // Orient each fraction so the denominator is positive inside the simplex.
    std::vector<std::pair<Polynomial, Polynomial>> entries = f.entries;
    std::vector<double> centroid(nvars, 1.0 / nvars);
    for (auto& [num, den] : entries) {
        if (den.eval(centroid) < 0.0) {
            num = num * -1.0;
            den = den * -1.0;
        }
    }

    // Common denominator: product of denominators deduplicated by canonical
    // equality. G_i picks up every distinct factor except its own.
    std::vector<Polynomial> reps;
    std::vector<int> rep_of(entries.size(), -1);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t r = 0; r < reps.size(); ++r) {
            if (canonical_eq(entries[i].second, reps[r])) {
                rep_of[i] = static_cast<int>(r);
                break;
            }
        }
        if (rep_of[i] < 0) {
            rep_of[i] = static_cast<int>(reps.size());
            reps.push_back(entries[i].second);
        }
    }
    Polynomial C = Polynomial::constant(nvars, 1.0);
    for (const auto& r : reps) C = C * r;
    std::vector<Polynomial> G;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        Polynomial g = entries[i].first;
        for (std::size_t r = 0; r < reps.size(); ++r)
            if (static_cast<int>(r) != rep_of[i]) g = g * reps[r];
        G.push_back(std::move(g));
    }

    // Homogenize everything to a common degree.
    int d0 = C.degree();
    for (const auto& g : G) d0 = std::max(d0, g.degree());
    for (auto& g : G) g = homogenize(g, d0);
    C = homogenize(C, d0);

    // Joint Polya raise: one exponent shared by all entries.
    Polynomial s = simplex_sum(nvars);
    int polya_n = 0;
    while (true) {
        bool all_ok = true;
        for (const auto& g : G) {
            double floor = -1e-12 * std::max(1.0, g.max_abs_coeff());
            for (const auto& [mono, c] : g.terms()) {
                if (c < floor) {
                    all_ok = false;
                    break;
                }
            }
            if (!all_ok) break;
        }
        if (all_ok) break;
        if (polya_n >= opt.polya_max)
            throw PolyaExhausted("no joint exponent up to " + std::to_string(opt.polya_max) +
                                 " yields nonnegative coefficients");
        for (auto& g : G) g = g * s;
        C = C * s;
        ++polya_n;
    }
    // Clamp the tolerated negatives away.
    for (auto& g : G) {
        Polynomial clamped(nvars);
        for (const auto& [mono, c] : g.terms())
            if (c > 0.0) clamped.add_term(mono, c);
        g = std::move(clamped);
    }

    Polynomial gsum(nvars);
    for (const auto& g : G) gsum = gsum + g;
    if (!canonical_eq(gsum, C, 1e-9))
        throw NormalizationError("sum of numerators does not match the common denominator");

    for (const auto& p : grid)
        if (!(C.eval(p) > 0.0))
            throw GridRootError("common denominator is nonpositive on the simplex grid");

    // States: nonzero monomial terms of each G_i tagged with outcome i,
    // merged per monomial (already thin by construction).
    std::map<Monomial, std::vector<double>> by_mono;  // -> weights per outcome
    for (std::size_t i = 0; i < G.size(); ++i) {
        for (const auto& [mono, c] : G[i].terms()) {
            auto& row = by_mono[mono];
            if (row.empty()) row.assign(G.size(), 0.0);
            row[i] += c;
        }
    }
    Ladder lad;
    lad.m = f.m;
    lad.denom = C;
    OutcomeMap om;
    om.v = f.v;
    om.k1 = static_cast<int>(by_mono.size());
    om.w.assign(static_cast<std::size_t>(om.k1) * (f.v + 1), 0.0);
    int idx = 0;
    for (auto it = by_mono.rbegin(); it != by_mono.rend(); ++it, ++idx) {
        double R = 0.0;
        for (double x : it->second) R += x;
        lad.states.push_back({R, it->first});
        for (int o = 0; o <= f.v; ++o) om.at(idx, o) = it->second[o];
    }

    LadderPlan plan;
    plan.provenance.push_back("decompose");
    if (polya_n > 0) plan.provenance.push_back("polya+" + std::to_string(polya_n));
    int connect_augs = 0;
    std::tie(plan.ladder, plan.outcomes) = ensure_connected_fine(lad, om, &connect_augs);
    if (connect_augs > 0) plan.provenance.push_back("augment+" + std::to_string(connect_augs));
    plan.refresh_flags();
    return plan;
}

}  // namespace dice
