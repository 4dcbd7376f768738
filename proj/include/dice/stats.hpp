#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dice {

// Regularized incomplete gamma P(a, x) and its complement.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of the chi-square distribution.
double chi2_sf(double stat, int df);

struct GofResult {
    double stat = 0.0;
    int df = 0;
    double p_value = 1.0;
};

// Pearson goodness of fit of counts against a known distribution.
GofResult chi_square_gof(std::span<const uint64_t> counts, std::span<const double> probs);

// Two multinomial samples against a pooled estimate.
GofResult chi_square_two_sample(std::span<const uint64_t> a, std::span<const uint64_t> b);

double normal_quantile(double p);

// One-sample Kolmogorov-Smirnov statistic against U(0,1).
double ks_statistic_uniform(std::vector<double> xs);

struct RunningStat {
    uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
    double sd() const;
    double sem() const;
};

}  // namespace dice
