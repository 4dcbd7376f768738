#include "dice/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "dice/errors.hpp"

namespace dice {

int Monomial::degree() const {
    return std::accumulate(e.begin(), e.end(), 0);
}

Polynomial Polynomial::constant(int nvars, double c) {
    Polynomial p(nvars);
    p.add_term(Monomial(std::vector<int32_t>(nvars, 0)), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int index) {
    Polynomial p(nvars);
    std::vector<int32_t> e(nvars, 0);
    e[index] = 1;
    p.add_term(Monomial(std::move(e)), 1.0);
    return p;
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [mono, c] : terms_) d = std::max(d, mono.degree());
    return d;
}

bool Polynomial::homogeneous() const {
    if (terms_.empty()) return true;
    int d = terms_.begin()->first.degree();
    for (const auto& [mono, c] : terms_)
        if (mono.degree() != d) return false;
    return true;
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

void Polynomial::add_term(const Monomial& mono, double coeff) {
    if (coeff == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(mono, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) terms_.erase(it);
    }
}

double Polynomial::eval(std::span<const double> point) const {
    double sum = 0.0;
    for (const auto& [mono, c] : terms_) {
        double t = c;
        for (int j = 0; j < nvars_; ++j)
            for (int32_t r = 0; r < mono.e[j]; ++r) t *= point[j];
        sum += t;
    }
    return sum;
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [mono, c] : terms_) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s%.12g", out.empty() ? "" : " + ", c);
        out += buf;
        for (int j = 0; j < nvars_; ++j) {
            if (mono.e[j] == 0) continue;
            out += " p" + std::to_string(j);
            if (mono.e[j] > 1) out += "^" + std::to_string(mono.e[j]);
        }
    }
    return out;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial out = a;
    for (const auto& [mono, c] : b.terms_) out.add_term(mono, c);
    return out;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    Polynomial out = a;
    for (const auto& [mono, c] : b.terms_) out.add_term(mono, -c);
    return out;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out(a.nvars_);
    std::vector<int32_t> e(a.nvars_);
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            for (int j = 0; j < a.nvars_; ++j) e[j] = ma.e[j] + mb.e[j];
            out.add_term(Monomial(e), ca * cb);
        }
    }
    return out;
}

Polynomial operator*(const Polynomial& a, double s) {
    Polynomial out(a.nvars_);
    for (const auto& [mono, c] : a.terms_) out.add_term(mono, c * s);
    return out;
}

Polynomial Polynomial::pow(int n) const {
    Polynomial out = Polynomial::constant(nvars_, 1.0);
    for (int i = 0; i < n; ++i) out = out * *this;
    return out;
}

Polynomial simplex_sum(int nvars) {
    Polynomial s(nvars);
    for (int j = 0; j < nvars; ++j) {
        std::vector<int32_t> e(nvars, 0);
        e[j] = 1;
        s.add_term(Monomial(std::move(e)), 1.0);
    }
    return s;
}

Polynomial homogenize(const Polynomial& q, int target_degree) {
    if (target_degree < q.degree())
        throw Error("homogenize: target degree below polynomial degree");
    // Powers of (p_0+...+p_m) up to the largest gap, built incrementally.
    std::vector<Polynomial> pw;
    pw.push_back(Polynomial::constant(q.nvars(), 1.0));
    Polynomial s = simplex_sum(q.nvars());
    for (int i = 1; i <= target_degree; ++i) pw.push_back(pw.back() * s);

    Polynomial out(q.nvars());
    for (const auto& [mono, c] : q.terms()) {
        Polynomial t(q.nvars());
        t.add_term(mono, c);
        out = out + t * pw[target_degree - mono.degree()];
    }
    return out;
}

bool canonical_eq(const Polynomial& a, const Polynomial& b, double tol) {
    if (a.nvars() != b.nvars()) return false;
    auto ita = a.terms().begin();
    auto itb = b.terms().begin();
    auto ok = [tol](double x, double y) {
        return std::abs(x - y) <= tol * std::max(1.0, std::max(std::abs(x), std::abs(y)));
    };
    while (ita != a.terms().end() && itb != b.terms().end()) {
        if (ita->first == itb->first) {
            if (!ok(ita->second, itb->second)) return false;
            ++ita, ++itb;
        } else if (ita->first < itb->first) {
            if (!ok(ita->second, 0.0)) return false;
            ++ita;
        } else {
            if (!ok(0.0, itb->second)) return false;
            ++itb;
        }
    }
    for (; ita != a.terms().end(); ++ita)
        if (!ok(ita->second, 0.0)) return false;
    for (; itb != b.terms().end(); ++itb)
        if (!ok(0.0, itb->second)) return false;
    return true;
}

PolyaResult polya_raise(const Polynomial& q, int n_max) {
    if (!q.homogeneous()) throw Error("polya_raise: input must be homogeneous");
    Polynomial cur = q;
    Polynomial s = simplex_sum(q.nvars());
    for (int n = 0; n <= n_max; ++n) {
        double scale = cur.max_abs_coeff();
        double floor = -1e-12 * std::max(1.0, scale);
        bool ok = true;
        for (const auto& [mono, c] : cur.terms()) {
            if (c < floor) {
                ok = false;
                break;
            }
        }
        if (ok) {
            Polynomial clamped(q.nvars());
            for (const auto& [mono, c] : cur.terms())
                if (c > 0.0) clamped.add_term(mono, c);
            return {clamped, n};
        }
        if (n < n_max) cur = cur * s;
    }
    throw PolyaExhausted("no exponent up to " + std::to_string(n_max) +
                         " yields nonnegative coefficients");
}

}  // namespace dice
