#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "dice/enterprise.hpp"
#include "dice/errors.hpp"
#include "dice/stats.hpp"

using namespace dice;

namespace {

const std::string kToyExpr = "sqrt(2)*p^3/((sqrt(2)-5)*p^3+11*p^2-9*p+3)";

BuildOptions no_auto() {
    BuildOptions opt;
    opt.auto_logconcave = false;
    return opt;
}

SampleOptions seeded(uint64_t seed) {
    SampleOptions s;
    s.mode.seed = seed;
    return s;
}

Ladder univariate(std::vector<double> coef) {
    Ladder L;
    L.m = 1;
    int k = static_cast<int>(coef.size()) - 1;
    for (int i = 0; i <= k; ++i)
        L.states.push_back({coef[i], Monomial({static_cast<int32_t>(k - i), static_cast<int32_t>(i)})});
    L.sort_canonical();
    return L;
}

}  // namespace

TEST_CASE("build: toy factory plans") {
    DiceEnterprise plain =
        DiceEnterprise::from_expressions({kToyExpr}, 1, 1, true, no_auto());
    CHECK(plain.plan().ladder.size() == 5);
    CHECK(plain.monotone());
    CHECK(plain.plan().fine);
    CHECK(plain.plan().connected);
    CHECK(!plain.plan().strictly_log_concave.value());

    DiceEnterprise lc = DiceEnterprise::from_expressions({kToyExpr}, 1, 1, true);
    CHECK(lc.auto_augmentations() == 3);
    CHECK(lc.plan().ladder.size() == 8);
    CHECK(lc.plan().strictly_log_concave.value());

    // both plans induce the same law
    for (double p : {0.2, 0.5, 0.8}) {
        std::vector<double> pt{1 - p, p};
        auto a = plain.true_distribution(pt);
        auto b = lc.true_distribution(pt);
        for (int i = 0; i <= 1; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    }
}

TEST_CASE("identity target passes the coin through") {
    DiceEnterprise e = DiceEnterprise::from_expressions({"1-p", "p"}, 1, 1, false, no_auto());
    CHECK(e.plan().ladder.size() == 2);
    SimulatedDie die({0.7, 0.3}, 1234);
    SampleStats stats = e.sample(die, 20000, seeded(55));
    double freq1 = static_cast<double>(stats.counts[1]) / stats.n;
    CHECK(std::abs(freq1 - 0.3) < 4 * std::sqrt(0.3 * 0.7 / 20000.0));
}

TEST_CASE("end-to-end law: toy factory at several p") {
    DiceEnterprise e = DiceEnterprise::from_expressions({kToyExpr}, 1, 1, true, no_auto());
    for (auto [p, seed] : {std::pair{0.25, 10u}, std::pair{0.5, 11u}, std::pair{0.75, 12u}}) {
        SimulatedDie die({1 - p, p}, seed);
        SampleStats stats = e.sample(die, 10000, seeded(seed * 7));
        auto truth = e.true_distribution(std::vector<double>{1 - p, p});
        GofResult gof = chi_square_gof(stats.counts, truth);
        CHECK(gof.p_value > 0.01);
    }
}

TEST_CASE("logistic factory: frequency and expected tosses") {
    for (double C : {1.0, 2.0}) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g*p/(1+%g*p)", C, C);
        DiceEnterprise e = DiceEnterprise::from_expressions({buf}, 1, 1, true, no_auto());
        CHECK(e.plan().ladder.size() == 2);
        for (double p : {0.25, 0.75}) {
            SimulatedDie die({1 - p, p}, 999 + static_cast<uint64_t>(C * 10 + p * 100));
            SampleStats stats = e.sample(die, 20000, seeded(31 + static_cast<uint64_t>(C)));
            double heads = static_cast<double>(stats.counts[0]) / stats.n;
            double want = C * p / (1 + C * p);
            CHECK(std::abs(heads - want) < 4 * std::sqrt(want * (1 - want) / 20000.0));
            double en = C / (1 + C * p);
            CHECK(stats.mean_rolls == doctest::Approx(en).epsilon(0.10));
        }
    }
}

TEST_CASE("augmented three-spike target reproduces the benchmark cell") {
    // +40 states in the benchmark's accounting = 20 augmentations here
    std::string sum = "(p^20+p^10*(1-p)^10+(1-p)^20)";
    std::vector<std::string> exprs = {"p^20/" + sum, "p^10*(1-p)^10/" + sum,
                                      "(1-p)^20/" + sum};
    BuildOptions opt = no_auto();
    opt.extra_augment = 20;
    DiceEnterprise e = DiceEnterprise::from_expressions(exprs, 1, 2, false, opt);
    CHECK(e.plan().ladder.size() == 50);
    SimulatedDie die({0.5, 0.5}, 20240);
    SampleStats stats = e.sample(die, 200, seeded(91));
    CHECK(stats.mean_rolls > 471.4 * 0.75);
    CHECK(stats.mean_rolls < 471.4 * 1.25);
}

TEST_CASE("coins adapter: face law and substitution") {
    std::vector<std::unique_ptr<DieSource>> coins;
    coins.push_back(std::make_unique<SimulatedDie>(std::vector<double>{0.6, 0.4}, 1));
    coins.push_back(std::make_unique<SimulatedDie>(std::vector<double>{0.4, 0.6}, 2));
    CoinsToDieAdapter adapter(std::move(coins), 777);
    CHECK(adapter.faces() == 3);
    // ptilde = (0.4/2, 0.6/2, 1 - 1.0/2) = (0.2, 0.3, 0.5)
    const int n = 60000;
    std::vector<int> counts(3, 0);
    for (int i = 0; i < n; ++i) counts[adapter.roll()] += 1;
    CHECK(std::abs(counts[0] / double(n) - 0.2) < 0.01);
    CHECK(std::abs(counts[1] / double(n) - 0.3) < 0.01);
    CHECK(std::abs(counts[2] / double(n) - 0.5) < 0.01);
    CHECK(adapter.coin_tosses() == static_cast<uint64_t>(n));

    // substitution p_i = m * ptilde_i turns coin expressions into die ones
    ParseMode coin_mode{1, false};
    RationalTarget f_coins = to_rational_target(
        {parse("p0*p1", coin_mode), parse("1-p0*p1", coin_mode)}, 1, 1);
    RationalTarget f_die = substitute_coins(f_coins, 2);
    CHECK(f_die.m == 2);
    std::vector<double> ptilde{0.2, 0.3, 0.5};
    // p0 = 2*0.2 = 0.4, p1 = 2*0.3 = 0.6 -> p0 p1 = 0.24
    CHECK(f_die.eval_entry(0, ptilde) == doctest::Approx(0.24).epsilon(1e-12));
}

TEST_CASE("Bernoulli race over three coins") {
    const std::vector<double> ps{0.2, 0.5, 0.8};
    const double total = 1.5;
    ParseMode mode{2, false};
    std::vector<ExprAst> asts{parse("p0/(p0+p1+p2)", mode), parse("p1/(p0+p1+p2)", mode),
                              parse("p2/(p0+p1+p2)", mode)};
    RationalTarget f_coins = to_rational_target(asts, 2, 2);
    RationalTarget f_die = substitute_coins(f_coins, 3);
    DiceEnterprise e = DiceEnterprise::from_target(f_die, no_auto());
    CHECK(e.plan().ladder.size() == 3);
    CHECK(e.plan().ladder.degree() == 1);

    std::vector<std::unique_ptr<DieSource>> coins;
    for (std::size_t i = 0; i < ps.size(); ++i)
        coins.push_back(
            std::make_unique<SimulatedDie>(std::vector<double>{1 - ps[i], ps[i]}, 100 + i));
    CoinsToDieAdapter adapter(std::move(coins), 2024);

    const uint64_t n = 10000;
    SampleStats stats = e.sample(adapter, n, seeded(5150));
    for (int i = 0; i < 3; ++i) {
        double want = ps[i] / total;
        double got = static_cast<double>(stats.counts[i]) / n;
        CHECK(std::abs(got - want) < 4 * std::sqrt(want * (1 - want) / n));
    }
    double tosses_per_sample = static_cast<double>(adapter.coin_tosses()) / n;
    CHECK(tosses_per_sample == doctest::Approx(3.0 / total).epsilon(0.10));
    CHECK(stats.mean_rolls == doctest::Approx(3.0 / total).epsilon(0.10));
}

TEST_CASE("race over two coins with unit probability mass") {
    // coins (0.4, 0.6): the race law is (0.4, 0.6) and a draw costs
    // m / (p0 + p1) = 2 die rolls on average
    ParseMode mode{1, false};
    std::vector<ExprAst> asts{parse("p0/(p0+p1)", mode), parse("p1/(p0+p1)", mode)};
    RationalTarget f = substitute_coins(to_rational_target(asts, 1, 1), 2);
    DiceEnterprise e = DiceEnterprise::from_target(f, no_auto());
    std::vector<std::unique_ptr<DieSource>> coins;
    coins.push_back(std::make_unique<SimulatedDie>(std::vector<double>{0.6, 0.4}, 811));
    coins.push_back(std::make_unique<SimulatedDie>(std::vector<double>{0.4, 0.6}, 812));
    CoinsToDieAdapter adapter(std::move(coins), 813);
    SampleStats stats = e.sample(adapter, 10000, seeded(814));
    double f0 = static_cast<double>(stats.counts[0]) / stats.n;
    CHECK(std::abs(f0 - 0.4) < 4 * std::sqrt(0.4 * 0.6 / 10000.0));
    CHECK(stats.mean_rolls == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("single-coin adapter relabels the coin") {
    std::vector<std::unique_ptr<DieSource>> coins;
    coins.push_back(std::make_unique<SimulatedDie>(std::vector<double>{0.7, 0.3}, 91));
    CoinsToDieAdapter adapter(std::move(coins), 92);
    CHECK(adapter.faces() == 2);
    // face 0 = heads (prob 0.3), face 1 = tails (prob 0.7)
    const int n = 40000;
    int zeros = 0;
    for (int i = 0; i < n; ++i) zeros += adapter.roll() == 0;
    CHECK(std::abs(zeros / double(n) - 0.3) < 4 * std::sqrt(0.3 * 0.7 / n));
}

TEST_CASE("direct ladder with a hand-built outcome split") {
    Ladder six;
    six.m = 2;
    six.states = {
        {std::sqrt(2.0), Monomial({3, 0, 0})}, {1.0, Monomial({2, 0, 1})},
        {0.25, Monomial({1, 2, 0})},           {2.0, Monomial({1, 1, 1})},
        {0.5, Monomial({1, 0, 2})},            {0.75, Monomial({0, 2, 1})},
    };
    OutcomeMap om;
    om.v = 1;
    om.k1 = 6;
    om.w.assign(12, 0.0);
    for (int i = 0; i < 6; ++i) {
        double r = six.states[i].R;
        om.at(i, 0) = 0.3 * r;  // every state splits 30/70
        om.at(i, 1) = 0.7 * r;
    }
    DiceEnterprise e = DiceEnterprise::from_ladder(six, om, no_auto());
    std::vector<double> p{0.2, 0.3, 0.5};
    SimulatedDie die(p, 31337);
    SampleStats stats = e.sample(die, 8000, seeded(606));
    auto truth = e.true_distribution(p);
    CHECK(truth[0] == doctest::Approx(0.3).epsilon(1e-12));
    GofResult gof = chi_square_gof(stats.counts, truth);
    CHECK(gof.p_value > 0.01);
}

TEST_CASE("sampler and rejection oracle agree on outcomes") {
    DiceEnterprise e = DiceEnterprise::from_expressions({kToyExpr}, 1, 1, true, no_auto());
    SimulatedDie die({0.5, 0.5}, 717);
    UniformSource u(RandomnessMode{RandomnessMode::Prng, 718}, nullptr);
    const int n = 8000;
    std::vector<uint64_t> via_rejection(2, 0);
    for (int i = 0; i < n; ++i) {
        RejectionResult r = naive_rejection(e.plan().ladder, die, u);
        via_rejection[sample_outcome(e.plan().ladder, e.plan().outcomes, r.state, u.next())] += 1;
    }
    SampleStats stats = e.sample(die, n, seeded(719));
    GofResult gof = chi_square_two_sample(via_rejection, stats.counts);
    CHECK(gof.p_value > 0.01);
}

TEST_CASE("bounds: small symmetric ladder") {
    DiceEnterprise e =
        DiceEnterprise::from_ladder(univariate({1, 2, 1}), OutcomeMap::identity(univariate({1, 2, 1})), no_auto());
    BoundsReport rep = e.bounds(std::vector<double>{0.5, 0.5});
    REQUIRE(rep.rho.has_value());
    CHECK(*rep.rho == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(*rep.mean_bound_geom == doctest::Approx(2.0).epsilon(1e-12));
    // rho is p-free for this ladder
    BoundsReport rep2 = e.bounds(std::vector<double>{0.8, 0.2});
    CHECK(*rep2.rho == doctest::Approx(0.5).epsilon(1e-12));

    CHECK(*rep.exact_en_p1 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(*rep.exact_en_p0 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(rep.uniform_bound.has_value());
}

TEST_CASE("bounds: not applicable cases are reported, not fatal") {
    Ladder L = univariate({1, 1000, 1, 500, 1});
    DiceEnterprise e = DiceEnterprise::from_ladder(L, OutcomeMap::identity(L), no_auto());
    BoundsReport rep = e.bounds(std::vector<double>{0.5, 0.5});
    CHECK(!rep.rho.has_value());
    CHECK(rep.rho_note.find("log-concave") != std::string::npos);
    CHECK(rep.exact_en_p0.has_value());  // endpoint formulas still apply
}

TEST_CASE("exact endpoint formula validated by simulation") {
    Ladder L = univariate({1, 2, 1});
    DiceEnterprise e = DiceEnterprise::from_ladder(L, OutcomeMap::identity(L), no_auto());
    SimulatedDie die({0.0, 1.0}, 404);  // p = 1
    SampleStats stats = e.sample(die, 10000, seeded(405));
    double sem = stats.sd_rolls / std::sqrt(10000.0);
    CHECK(std::abs(stats.mean_rolls - 3.0) < 3 * sem);
}

TEST_CASE("tail bound holds on strictly log-concave fixtures") {
    DiceEnterprise e = DiceEnterprise::from_expressions({kToyExpr}, 1, 1, true);  // auto LC
    REQUIRE(e.plan().strictly_log_concave.value());
    const int n = 10000;
    for (auto [p, seed] : {std::pair{0.25, 51u}, std::pair{0.5, 52u}, std::pair{0.75, 53u}}) {
        BoundsReport rep = e.bounds(std::vector<double>{1 - p, p});
        REQUIRE(rep.rho.has_value());
        SimulatedDie die({1 - p, p}, seed);
        UniformSource u(RandomnessMode{RandomnessMode::Prng, seed + 1}, nullptr);
        std::vector<uint64_t> ge(32, 0);
        for (int i = 0; i < n; ++i) {
            CftpResult r = cftp_monotone(e.kernel(), e.plan().ladder, die, u);
            for (uint64_t m = 1; m <= 31; ++m)
                if (r.die_rolls > m) ge[m] += 1;  // P(N > n) <= (k-1) rho^n
        }
        for (int m = 1; m <= 31; ++m) {
            double tail = static_cast<double>(ge[m]) / n;
            double bound = (e.plan().ladder.size() - 1) * std::pow(*rep.rho, m);
            double sigma = std::sqrt(std::max(tail * (1 - tail), 1e-9) / n);
            CHECK(tail <= bound + 3 * sigma);
        }
    }
}

TEST_CASE("roll bound on a twice-augmented ladder") {
    // degree-2 ladder augmented twice, per the degree-doubling construction
    Ladder base = univariate({1.0, 3.0, 1.0});
    BuildOptions opt = no_auto();
    opt.extra_augment = 2;
    DiceEnterprise e = DiceEnterprise::from_ladder(base, OutcomeMap::identity(base), opt);
    CHECK(e.plan().ladder.degree() == 4);
    double p = 0.3;
    BoundsReport rep = e.bounds(std::vector<double>{1 - p, p});
    REQUIRE(rep.prop_bound.has_value());
    SimulatedDie die({1 - p, p}, 6060);
    SampleStats stats = e.sample(die, 4000, seeded(6061));
    CHECK(stats.mean_rolls <= *rep.prop_bound);
}

TEST_CASE("strict randomness counts the rolls behind every uniform") {
    DiceEnterprise e = DiceEnterprise::from_expressions({"1-p", "p"}, 1, 1, false, no_auto());
    SimulatedDie die_prng({0.5, 0.5}, 11), die_strict({0.5, 0.5}, 11);
    SampleOptions prng = seeded(21);
    SampleOptions strict = seeded(21);
    strict.mode.kind = RandomnessMode::DieDerived;
    SampleStats a = e.sample(die_prng, 200, prng);
    SampleStats b = e.sample(die_strict, 200, strict);
    // each uniform costs at least 53 fair-bit pairs in strict mode
    CHECK(b.mean_rolls >= a.mean_rolls + 106.0);
    CHECK(b.mean_uniforms >= 1.0);
}

TEST_CASE("sample refuses a mismatched die") {
    DiceEnterprise e = DiceEnterprise::from_expressions({kToyExpr}, 1, 1, true, no_auto());
    SimulatedDie die({0.2, 0.3, 0.5}, 1);
    CHECK_THROWS_AS(e.sample(die, 10, seeded(2)), ConfigError);
}
