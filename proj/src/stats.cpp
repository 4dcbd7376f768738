#include "dice/stats.hpp"

#include <algorithm>
#include <cmath>

#include "dice/errors.hpp"

namespace dice {

namespace {

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_sf(double stat, int df) {
    if (df <= 0) return 1.0;
    return gamma_q(df / 2.0, stat / 2.0);
}

GofResult chi_square_gof(std::span<const uint64_t> counts, std::span<const double> probs) {
    uint64_t n = 0;
    for (uint64_t c : counts) n += c;
    GofResult r;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double expected = probs[i] * static_cast<double>(n);
        if (expected <= 0.0) {
            if (counts[i] != 0) r.stat = 1e300;  // impossible cell observed
            continue;
        }
        double d = counts[i] - expected;
        r.stat += d * d / expected;
        ++r.df;
    }
    r.df -= 1;
    r.p_value = chi2_sf(r.stat, r.df);
    return r;
}

GofResult chi_square_two_sample(std::span<const uint64_t> a, std::span<const uint64_t> b) {
    double na = 0, nb = 0;
    for (uint64_t c : a) na += c;
    for (uint64_t c : b) nb += c;
    GofResult r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double pooled = (a[i] + b[i]) / (na + nb);
        if (pooled <= 0.0) continue;
        double ea = pooled * na, eb = pooled * nb;
        r.stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
        ++r.df;
    }
    r.df -= 1;
    r.p_value = chi2_sf(r.stat, r.df);
    return r;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: p outside (0,1)");
    // Invert the normal CDF by bisection on erfc; plenty for test tolerances.
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
        (cdf < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ks_statistic_uniform(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d = std::max(d, std::abs((i + 1) / n - xs[i]));
        d = std::max(d, std::abs(xs[i] - i / n));
    }
    return d;
}

double RunningStat::sd() const { return std::sqrt(variance()); }
double RunningStat::sem() const { return n > 0 ? sd() / std::sqrt(static_cast<double>(n)) : 0.0; }

}  // namespace dice
