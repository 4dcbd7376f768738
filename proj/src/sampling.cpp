#include "dice/sampling.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "dice/errors.hpp"

namespace dice {

SimulatedDie::SimulatedDie(std::vector<double> probs, uint64_t seed)
    : probs_(probs), rng_(seed) {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw ConfigError("die probabilities must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigError("die probabilities sum to " + std::to_string(sum));
    double acc = 0.0;
    for (double p : probs) {
        acc += p;
        cum_.push_back(acc);
    }
    cum_.back() = 1.0;
}

int SimulatedDie::draw() {
    double u = (rng_() >> 11) * 0x1.0p-53;
    for (std::size_t i = 0; i + 1 < cum_.size(); ++i)
        if (u < cum_[i]) return static_cast<int>(i);
    return static_cast<int>(cum_.size()) - 1;
}

CommandDie::CommandDie(const std::string& command, int faces) : faces_(faces) {
    pipe_ = popen(command.c_str(), "r");
    if (!pipe_) throw ConfigError("failed to launch die command: " + command);
}

CommandDie::~CommandDie() {
    if (pipe_) pclose(pipe_);
}

int CommandDie::draw() {
    char line[64];
    if (!std::fgets(line, sizeof(line), pipe_))
        throw Error("die command stream ended");
    char* end = nullptr;
    long f = std::strtol(line, &end, 10);
    if (end == line) throw Error("die command produced a non-numeric line");
    if (f < 0 || f >= faces_) throw Error("die command produced face out of range");
    return static_cast<int>(f);
}

int SequenceDie::draw() {
    if (pos_ >= seq_.size()) throw Error("fixed die sequence exhausted");
    return seq_[pos_++];
}

int fair_bit(DieSource& die, uint64_t max_pairs) {
    for (uint64_t pair = 0; pair < max_pairs; ++pair) {
        int x1 = die.roll();
        int x2 = die.roll();
        if (x1 < x2) return 0;
        if (x1 > x2) return 1;
    }
    throw NonterminationError("fair_bit: no unequal pair within the cap");
}

int categorical_from_bits(std::span<const double> mu, const std::function<int()>& next_bit,
                          int* bits_used) {
    const int k1 = static_cast<int>(mu.size());
    std::vector<double> cumlo(k1 + 1, 0.0);
    for (int i = 0; i < k1; ++i) cumlo[i + 1] = cumlo[i] + mu[i];
    cumlo[k1] = 1.0;

    double lo = 0.0, width = 1.0;
    int bits = 0;
    while (true) {
        for (int i = 0; i < k1; ++i) {
            if (cumlo[i] <= lo && lo + width <= cumlo[i + 1]) {
                if (bits_used) *bits_used = bits;
                return i;
            }
        }
        width *= 0.5;
        if (next_bit()) lo += width;
        ++bits;
        if (bits > 4096) throw Error("categorical_from_bits failed to resolve");
    }
}

UniformSource::UniformSource(const RandomnessMode& mode, DieSource* die)
    : mode_(mode), die_(die), rng_(mode.seed) {
    if (mode.kind == RandomnessMode::DieDerived && !die)
        throw ConfigError("die-derived uniforms need a die");
}

double UniformSource::next() {
    ++draws_;
    if (mode_.kind == RandomnessMode::Prng) return (rng_() >> 11) * 0x1.0p-53;
    double u = 0.0, w = 1.0;
    for (int i = 0; i < 53; ++i) {
        w *= 0.5;
        if (fair_bit(*die_)) u += w;
    }
    return u;
}

std::unique_ptr<DieSource> make_die(const std::string& spec, uint64_t seed, int faces_hint) {
    if (spec.rfind("sim:", 0) == 0) {
        std::vector<double> probs;
        std::string rest = spec.substr(4);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            std::size_t comma = rest.find(',', pos);
            std::string tok = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
            if (tok.empty()) throw ConfigError("bad die spec: " + spec);
            probs.push_back(std::strtod(tok.c_str(), nullptr));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return std::make_unique<SimulatedDie>(std::move(probs), seed);
    }
    if (spec.rfind("cmd:", 0) == 0) {
        if (faces_hint <= 0)
            throw ConfigError("cmd: die needs the face count (--m)");
        return std::make_unique<CommandDie>(spec.substr(4), faces_hint);
    }
    throw ConfigError("unknown die spec (want sim:... or cmd:...): " + spec);
}

}  // namespace dice
