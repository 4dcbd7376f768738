#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace dice {

// Black-box (m+1)-faced die. Every draw bumps the roll counter exactly once.
class DieSource {
  public:
    virtual ~DieSource() = default;
    virtual int faces() const = 0;

    int roll() {
        ++count_;
        return draw();
    }
    uint64_t rolls() const { return count_; }

  protected:
    virtual int draw() = 0;

  private:
    uint64_t count_ = 0;
};

// Seeded i.i.d. categorical draws for a known p.
class SimulatedDie final : public DieSource {
  public:
    SimulatedDie(std::vector<double> probs, uint64_t seed);
    int faces() const override { return static_cast<int>(cum_.size()); }
    const std::vector<double>& probs() const { return probs_; }

  protected:
    int draw() override;

  private:
    std::vector<double> probs_;
    std::vector<double> cum_;
    std::mt19937_64 rng_;
};

// Faces read from an external program, one base-10 integer per line.
class CommandDie final : public DieSource {
  public:
    CommandDie(const std::string& command, int faces);
    ~CommandDie() override;
    int faces() const override { return faces_; }

  protected:
    int draw() override;

  private:
    int faces_;
    FILE* pipe_ = nullptr;
};

// Replays a fixed face sequence; throws when exhausted.
class SequenceDie final : public DieSource {
  public:
    SequenceDie(std::vector<int> seq, int faces) : seq_(std::move(seq)), faces_(faces) {}
    int faces() const override { return faces_; }

  protected:
    int draw() override;

  private:
    std::vector<int> seq_;
    int faces_;
    std::size_t pos_ = 0;
};

// Von Neumann on die pairs: roll (X1, X2) until X1 != X2, output X1 > X2.
// Exactly Bernoulli(1/2) for any p. The pair cap guards degenerate dice.
int fair_bit(DieSource& die, uint64_t max_pairs = 1'000'000);

// Refines the dyadic interval [(B_1:l)_10, (B_1:l)_10 + 2^-l) until it nests
// inside one cumulative cell of mu; boundaries follow the half-open
// convention. Returns the cell index.
int categorical_from_bits(std::span<const double> mu, const std::function<int()>& next_bit,
                          int* bits_used = nullptr);

struct RandomnessMode {
    enum Kind { Prng, DieDerived };
    Kind kind = Prng;
    uint64_t seed = 0;
};

// Uniform variates on [0,1) at 53-bit resolution. Prng mode uses a seeded
// generator; DieDerived assembles 53 fair bits from the die.
class UniformSource {
  public:
    UniformSource(const RandomnessMode& mode, DieSource* die);
    double next();
    uint64_t draws() const { return draws_; }

  private:
    RandomnessMode mode_;
    DieSource* die_;
    std::mt19937_64 rng_;
    uint64_t draws_ = 0;
};

// --- CLI die specs ---------------------------------------------------------

// "sim:0.2,0.3,0.5" or "cmd:<program>"; cmd requires an explicit face count.
std::unique_ptr<DieSource> make_die(const std::string& spec, uint64_t seed, int faces_hint);

}  // namespace dice
