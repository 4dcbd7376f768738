#include "dice/enterprise.hpp"

#include <algorithm>
#include <cmath>

#include "dice/errors.hpp"
#include "dice/stats.hpp"

namespace dice {

DiceEnterprise DiceEnterprise::from_expressions(const std::vector<std::string>& exprs, int m,
                                                int v, bool synthesize_last,
                                                const BuildOptions& opt) {
    return from_target(parse_target(exprs, m, v, synthesize_last), opt);
}

DiceEnterprise DiceEnterprise::from_target(const RationalTarget& f, const BuildOptions& opt) {
    DiceEnterprise e;
    e.plan_ = decompose(f, DecomposeOptions{opt.polya_max, opt.grid_per_dim});
    e.finish_build(opt);
    return e;
}

DiceEnterprise DiceEnterprise::from_ladder(Ladder ladder, OutcomeMap outcomes,
                                           const BuildOptions& opt) {
    for (const auto& s : ladder.states)
        if (!(s.R > 0.0)) throw ConfigError("ladder weights must be strictly positive");
    for (int i = 0; i < ladder.size(); ++i) {
        double rs = outcomes.row_sum(i);
        if (std::abs(rs - ladder.states[i].R) > 1e-9 * std::max(1.0, ladder.states[i].R))
            throw ConfigError("outcome row " + std::to_string(i) +
                              " does not sum to the ladder weight");
    }
    if (ladder.denom.is_zero()) {
        Polynomial c(ladder.m + 1);
        for (const auto& s : ladder.states) c.add_term(s.n, s.R);
        ladder.denom = c;
    }
    DiceEnterprise e;
    e.plan_.provenance.push_back("ladder");
    int augs = 0;
    std::tie(e.plan_.ladder, e.plan_.outcomes) = ensure_connected_fine(ladder, outcomes, &augs);
    if (augs > 0) e.plan_.provenance.push_back("augment+" + std::to_string(augs));
    e.plan_.refresh_flags();
    e.finish_build(opt);
    return e;
}

void DiceEnterprise::finish_build(const BuildOptions& opt) {
    if (plan_.ladder.m == 1 && opt.auto_logconcave &&
        !(plan_.strictly_log_concave && *plan_.strictly_log_concave)) {
        std::tie(plan_.ladder, plan_.outcomes) = ensure_logconcave(
            plan_.ladder, plan_.outcomes, opt.logconcave_cap, &auto_augmentations_);
        if (auto_augmentations_ > 0)
            plan_.provenance.push_back("logconcave+" + std::to_string(auto_augmentations_));
    }
    for (int a = 0; a < opt.extra_augment; ++a)
        std::tie(plan_.ladder, plan_.outcomes) = augment(plan_.ladder, plan_.outcomes);
    if (opt.extra_augment > 0)
        plan_.provenance.push_back("augment+" + std::to_string(opt.extra_augment));
    plan_.refresh_flags();
    kernel_ = build_kernel(plan_.ladder);

    // Constant-outcome u-intervals: intersection over states of each
    // outcome's cumulative band.
    const auto& om = plan_.outcomes;
    const auto& L = plan_.ladder;
    for (int o = 0; o <= om.v; ++o) {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < L.size(); ++i) {
            double r = L.states[i].R;
            double below = 0.0;
            for (int j = 0; j < o; ++j) below += om.at(i, j);
            lo = std::max(lo, below / r);
            hi = std::min(hi, (below + om.at(i, o)) / r);
        }
        if (lo < hi) const_intervals_.push_back({o, lo, hi});
    }
}

DiceEnterprise::Draw DiceEnterprise::sample_one(DieSource& die, UniformSource& uniforms,
                                                const SampleOptions& opt, CftpRun* run) const {
    uint64_t rolls0 = die.rolls();
    uint64_t u0 = uniforms.draws();
    double u_out = uniforms.next();
    // The disaggregation uniform is drawn first; when every ladder state maps
    // it to the same face the chain never needs to run.
    for (const auto& iv : const_intervals_) {
        if (iv.lo <= u_out && u_out < iv.hi)
            return {iv.outcome, die.rolls() - rolls0, uniforms.draws() - u0};
    }
    bool mono = opt.monotone.value_or(monotone());
    CftpResult r = mono ? cftp_monotone(kernel_, plan_.ladder, die, uniforms, opt.cftp, run)
                        : cftp_general(kernel_, plan_.ladder, die, uniforms, opt.cftp, run);
    int outcome = sample_outcome(plan_.ladder, plan_.outcomes, r.state, u_out);
    return {outcome, die.rolls() - rolls0, uniforms.draws() - u0};
}

SampleStats DiceEnterprise::sample(DieSource& die, uint64_t n, const SampleOptions& opt) const {
    if (die.faces() != m() + 1)
        throw ConfigError("die has " + std::to_string(die.faces()) + " faces, ladder needs " +
                          std::to_string(m() + 1));
    UniformSource uniforms(opt.mode, &die);
    SampleStats stats;
    stats.counts.assign(v() + 1, 0);
    stats.n = n;
    RunningStat rolls, unis;
    for (uint64_t i = 0; i < n; ++i) {
        Draw d = sample_one(die, uniforms, opt, i == 0 ? opt.first_run : nullptr);
        stats.counts[d.outcome] += 1;
        rolls.add(static_cast<double>(d.rolls));
        unis.add(static_cast<double>(d.uniforms));
        stats.total_rolls += d.rolls;
    }
    stats.mean_rolls = rolls.mean;
    stats.sd_rolls = rolls.sd();
    stats.mean_uniforms = unis.mean;
    return stats;
}

std::vector<double> DiceEnterprise::true_distribution(std::span<const double> point) const {
    return plan_.outcome_distribution(point);
}

BoundsReport DiceEnterprise::bounds(std::optional<std::vector<double>> point) const {
    const Ladder& L = plan_.ladder;
    BoundsReport rep;
    rep.k_states = L.size();
    rep.degree = L.degree();
    rep.min_v = kernel_.min_positive_v();
    const int d = L.degree();

    if (L.m == 1) {
        MonotoneUpdate phi = MonotoneUpdate::from_ladder(L);
        double en0 = 0.0, en1 = 0.0;
        for (int i = 1; i <= phi.k; ++i) {
            double mx = std::max(L.states[i - 1].R, L.states[i].R);
            en1 += mx / L.states[i].R;
            en0 += mx / L.states[i - 1].R;
        }
        rep.exact_en_p0 = en0;
        rep.exact_en_p1 = en1;

        const bool slc = plan_.strictly_log_concave.value_or(false);
        if (!slc) {
            rep.rho_note = "n/a (ladder not strictly log-concave)";
        } else if (!point) {
            rep.rho_note = "n/a (needs a value of p)";
        } else {
            double p = (*point)[1];
            auto up = [&](int i) { return i >= 0 && i < phi.k ? phi.up[i] * p : 0.0; };
            auto dn = [&](int i) { return i >= 1 && i <= phi.k ? phi.down[i - 1] * (1 - p) : 0.0; };
            double rho = 0.0;
            for (int i = 0; i < phi.k; ++i) {
                double pair = 1.0 - (up(i) - up(i + 1)) - (dn(i + 1) - dn(i));
                rho = std::max(rho, pair);
            }
            rep.rho = rho;
            rep.tail_coeff = rep.k_states - 1;
            if (rho < 1.0) rep.mean_bound_geom = (rep.k_states - 1) * rho / (1.0 - rho);
        }
    } else {
        rep.rho_note = "n/a (multivariate ladder)";
    }

    // Faces whose pure monomial is present and toward which every other
    // state can always move; a run of d such moves pins every chain there.
    NeighborIndex N = build_neighbors(L);
    std::vector<int> absorbing;
    for (int b = 0; b <= L.m; ++b) {
        bool has_vertex = false, ok = true;
        for (int i = 0; i < L.size(); ++i) {
            if (L.states[i].n.e[b] == d) {
                has_vertex = true;
            } else if (N.nb[i][b].empty()) {
                ok = false;
                break;
            }
        }
        if (has_vertex && ok) absorbing.push_back(b);
    }
    if (absorbing.empty()) {
        rep.prop_note = "n/a (no face with a reachable pure-power state)";
    } else {
        double a = rep.min_v;
        if (point) {
            double best = 0.0;
            bool first = true;
            for (int b : absorbing) {
                double apb = a * (*point)[b];
                if (apb <= 0.0 || apb >= 1.0) continue;
                double bound = (std::pow(apb, -d) - 1.0) / (1.0 - apb);
                if (first || bound < best) best = bound, first = false;
            }
            if (!first) rep.prop_bound = best;
        }
        if (static_cast<int>(absorbing.size()) == L.m + 1) {
            double ap = a / (L.m + 1);
            rep.uniform_bound = (std::pow(ap, -d) - 1.0) / (1.0 - ap);
        }
    }
    return rep;
}

CoinsToDieAdapter::CoinsToDieAdapter(std::vector<std::unique_ptr<DieSource>> coins, uint64_t seed)
    : coins_(std::move(coins)), rng_(seed) {
    if (coins_.empty()) throw ConfigError("coins adapter needs at least one coin");
    for (const auto& c : coins_)
        if (c->faces() != 2) throw ConfigError("coins adapter takes two-faced dice");
}

uint64_t CoinsToDieAdapter::coin_tosses() const {
    uint64_t t = 0;
    for (const auto& c : coins_) t += c->rolls();
    return t;
}

int CoinsToDieAdapter::draw() {
    const int m = static_cast<int>(coins_.size());
    int i = std::min<int>(m - 1, static_cast<int>(((rng_() >> 11) * 0x1.0p-53) * m));
    int toss = coins_[i]->roll();
    return toss == 1 ? i : m;
}

RationalTarget substitute_coins(const RationalTarget& f_coins, int num_coins) {
    RationalTarget out;
    out.m = num_coins;
    out.v = f_coins.v;
    const double scale = static_cast<double>(num_coins);
    auto widen = [&](const Polynomial& q) {
        Polynomial r(num_coins + 1);
        for (const auto& [mono, c] : q.terms()) {
            std::vector<int32_t> e = mono.e;
            e.resize(num_coins + 1, 0);
            r.add_term(Monomial(std::move(e)), c * std::pow(scale, mono.degree()));
        }
        return r;
    };
    for (const auto& [num, den] : f_coins.entries)
        out.entries.emplace_back(widen(num), widen(den));
    return out;
}

}  // namespace dice
