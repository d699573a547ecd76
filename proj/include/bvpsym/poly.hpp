#pragma once

#include "bvpsym/expr.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bvpsym {

// Sparse multivariate polynomial over Q in named parameters. Only used for
// exponent arithmetic and small coefficient fractions, so it stays tiny.
class Poly {
  public:
    using Mono = std::vector<std::pair<std::string, int>>; // sorted, counts >= 1
    std::map<Mono, mpq_class> terms;

    Poly() = default;
    explicit Poly(const mpq_class& c);
    static Poly variable(const std::string& name);

    bool is_zero() const { return terms.empty(); }
    bool is_constant() const;
    mpq_class constant_value() const; // requires is_constant()

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator-() const;
    bool operator==(const Poly& o) const { return terms == o.terms; }

    Poly pow(unsigned n) const;

    // exact division; nullopt when not divisible
    std::optional<Poly> divide_exact(const Poly& d) const;

    // gcd of coefficient numerators / lcm of denominators, with leading sign
    mpq_class content_signed() const;

    // single variable? returns its name
    std::optional<std::string> single_variable() const;

    int degree(const std::string& var) const;
};

// num/den fraction of Polys, canonicalized: den has content +1, gcd reduced
// (full gcd in the univariate case, exact-division probing otherwise).
class RatFunc {
  public:
    Poly num, den;

    RatFunc() : num(mpq_class(0)), den(mpq_class(1)) {}
    RatFunc(Poly n, Poly d);
    static RatFunc constant(const mpq_class& c);

    bool is_zero() const { return num.is_zero(); }
    bool is_constant() const { return num.is_constant() && den.is_constant(); }
    mpq_class constant_value() const;
    bool is_integer() const;

    RatFunc operator+(const RatFunc& o) const;
    RatFunc operator-(const RatFunc& o) const;
    RatFunc operator*(const RatFunc& o) const;
    RatFunc operator/(const RatFunc& o) const;
    bool operator==(const RatFunc& o) const { return num == o.num && den == o.den; }

  private:
    void reduce();
};

// Expr <-> RatFunc bridges. to_ratfunc succeeds only for expressions built
// from numbers, parameter-like symbols, +, *, integer powers and ^-1 of such.
std::optional<RatFunc> to_ratfunc(const Expr& e);
Expr poly_to_expr(const Poly& p);
Expr ratfunc_to_expr(const RatFunc& r);

// univariate gcd over Q (monic); both inputs univariate in `var`
Poly univariate_gcd(const Poly& a, const Poly& b, const std::string& var);

} // namespace bvpsym
