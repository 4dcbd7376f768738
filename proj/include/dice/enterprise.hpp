#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dice/cftp.hpp"
#include "dice/chain.hpp"
#include "dice/expr.hpp"
#include "dice/ladder.hpp"
#include "dice/sampling.hpp"

namespace dice {

struct BuildOptions {
    bool auto_logconcave = true;  // m = 1 only
    int extra_augment = 0;
    int polya_max = 128;
    int grid_per_dim = 50;
    int logconcave_cap = 4096;
};

struct BoundsReport {
    int k_states = 0;
    int degree = 0;
    // Contraction rate of the monotone coupling; univariate strictly
    // log-concave ladders at a fixed p only.
    std::optional<double> rho;
    std::string rho_note;
    std::optional<double> tail_coeff;        // k_states - 1
    std::optional<double> mean_bound_geom;   // (k_states - 1) rho / (1 - rho)
    std::optional<double> prop_bound;        // min_b ((a p_b)^-d - 1)/(1 - a p_b)
    std::string prop_note;
    std::optional<double> uniform_bound;     // p-free form of the same bound
    std::optional<double> exact_en_p0;       // univariate, p = 0
    std::optional<double> exact_en_p1;       // univariate, p = 1
    double min_v = 0.0;                      // smallest positive V entry
};

struct SampleOptions {
    RandomnessMode mode{RandomnessMode::Prng, 1};
    CftpOptions cftp;
    std::optional<bool> monotone;  // default: use the monotone sampler iff m == 1
    CftpRun* first_run = nullptr;  // capture the first sample's stored randomness
};

struct SampleStats {
    std::vector<uint64_t> counts;  // per outcome 0..v
    uint64_t n = 0;
    double mean_rolls = 0.0;
    double sd_rolls = 0.0;
    double mean_uniforms = 0.0;
    uint64_t total_rolls = 0;
};

// Full pipeline: target -> fine and connected ladder -> reversible kernel ->
// CFTP -> outcome disaggregation.
class DiceEnterprise {
  public:
    static DiceEnterprise from_expressions(const std::vector<std::string>& exprs, int m, int v,
                                           bool synthesize_last = false,
                                           const BuildOptions& opt = {});
    static DiceEnterprise from_target(const RationalTarget& f, const BuildOptions& opt = {});
    static DiceEnterprise from_ladder(Ladder ladder, OutcomeMap outcomes,
                                      const BuildOptions& opt = {});

    const LadderPlan& plan() const { return plan_; }
    const TransitionKernel& kernel() const { return kernel_; }
    int m() const { return plan_.ladder.m; }
    int v() const { return plan_.outcomes.v; }
    bool monotone() const { return m() == 1; }
    int auto_augmentations() const { return auto_augmentations_; }

    struct Draw {
        int outcome = 0;
        uint64_t rolls = 0;
        uint64_t uniforms = 0;
    };
    Draw sample_one(DieSource& die, UniformSource& uniforms, const SampleOptions& opt = {},
                    CftpRun* run = nullptr) const;
    SampleStats sample(DieSource& die, uint64_t n, const SampleOptions& opt = {}) const;

    // f(p) by direct evaluation of the plan.
    std::vector<double> true_distribution(std::span<const double> point) const;

    BoundsReport bounds(std::optional<std::vector<double>> point = {}) const;

  private:
    DiceEnterprise() = default;
    void finish_build(const BuildOptions& opt);

    LadderPlan plan_;
    TransitionKernel kernel_;
    int auto_augmentations_ = 0;
    // u-intervals on which the outcome is the same from every state; lets a
    // draw skip CFTP entirely when the disaggregation uniform lands there.
    struct ConstInterval {
        int outcome;
        double lo, hi;
    };
    std::vector<ConstInterval> const_intervals_;
};

// Rolls an (m+1)-faced die out of m independent coins: pick a coin uniformly,
// output its index on heads (face 1) and m on tails.
class CoinsToDieAdapter final : public DieSource {
  public:
    CoinsToDieAdapter(std::vector<std::unique_ptr<DieSource>> coins, uint64_t seed);
    int faces() const override { return static_cast<int>(coins_.size()) + 1; }
    uint64_t coin_tosses() const;

  protected:
    int draw() override;

  private:
    std::vector<std::unique_ptr<DieSource>> coins_;
    std::mt19937_64 rng_;
};

// Rewrites a target over coin probabilities p_0..p_{m-1} into one over the
// adapter's die probabilities via p_i = m * ptilde_i.
RationalTarget substitute_coins(const RationalTarget& f_coins, int num_coins);

}  // namespace dice
