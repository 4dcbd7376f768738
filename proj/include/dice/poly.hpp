#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dice {

// Exponent vector (n_0, ..., n_m) over the simplex variables p_0..p_m.
struct Monomial {
    std::vector<int32_t> e;

    Monomial() = default;
    explicit Monomial(std::vector<int32_t> exps) : e(std::move(exps)) {}

    int degree() const;
    auto operator<=>(const Monomial&) const = default;
};

// Sparse multivariate polynomial with real coefficients. Canonical form:
// term map keyed by monomial, exact-zero coefficients dropped, so the zero
// polynomial is the empty map. Immutable in spirit; arithmetic returns new
// values.
class Polynomial {
  public:
    explicit Polynomial(int nvars = 1) : nvars_(nvars) {}

    static Polynomial constant(int nvars, double c);
    static Polynomial variable(int nvars, int index);

    int nvars() const { return nvars_; }
    const std::map<Monomial, double>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;  // total degree; 0 for the zero polynomial
    bool homogeneous() const;
    double max_abs_coeff() const;

    // Merges a term into canonical form (drops exact zeros).
    void add_term(const Monomial& mono, double coeff);

    double eval(std::span<const double> point) const;
    std::string str() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, double s);

    Polynomial pow(int n) const;  // n >= 0

  private:
    int nvars_;
    std::map<Monomial, double> terms_;
};

// p_0 + ... + p_m.
Polynomial simplex_sum(int nvars);

// Each term of degree i is multiplied by (p_0+...+p_m)^(d-i); the result is
// homogeneous of degree d and agrees with q on the simplex. Throws on
// d < deg(q).
Polynomial homogenize(const Polynomial& q, int target_degree);

// Per-coefficient comparison with tolerance tol * max(1, |c|).
bool canonical_eq(const Polynomial& a, const Polynomial& b, double tol = 1e-12);

struct PolyaResult {
    Polynomial poly;
    int n;
};

// Smallest n <= n_max such that q * (p_0+...+p_m)^n has all coefficients
// >= 0. Coefficients above -1e-12 * scale are clamped to zero; throws
// PolyaExhausted when no such n exists within the cap.
PolyaResult polya_raise(const Polynomial& q, int n_max = 128);

}  // namespace dice
