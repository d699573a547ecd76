#include "bvpsym/poly.hpp"

#include <algorithm>
#include <stdexcept>

namespace bvpsym {

namespace {

Poly::Mono mono_mul(const Poly::Mono& a, const Poly::Mono& b) {
    Poly::Mono out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

bool mono_divides(const Poly::Mono& d, const Poly::Mono& m) {
    std::size_t j = 0;
    for (auto& [v, c] : d) {
        while (j < m.size() && m[j].first < v) ++j;
        if (j == m.size() || m[j].first != v || m[j].second < c) return false;
    }
    return true;
}

Poly::Mono mono_div(const Poly::Mono& m, const Poly::Mono& d) {
    Poly::Mono out;
    std::size_t j = 0;
    for (auto& [v, c] : m) {
        int dc = 0;
        for (auto& [dv, dcount] : d)
            if (dv == v) dc = dcount;
        (void)j;
        if (c - dc > 0) out.emplace_back(v, c - dc);
    }
    return out;
}

} // namespace

Poly::Poly(const mpq_class& c) {
    if (c != 0) terms[{}] = c;
}

Poly Poly::variable(const std::string& name) {
    Poly p;
    p.terms[{{name, 1}}] = 1;
    return p;
}

bool Poly::is_constant() const {
    return terms.empty() || (terms.size() == 1 && terms.begin()->first.empty());
}

mpq_class Poly::constant_value() const {
    if (terms.empty()) return 0;
    return terms.begin()->second;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (auto& [m, c] : o.terms) {
        auto it = r.terms.find(m);
        if (it == r.terms.end()) {
            r.terms[m] = c;
        } else {
            it->second += c;
            if (it->second == 0) r.terms.erase(it);
        }
    }
    return r;
}

Poly Poly::operator-() const {
    Poly r;
    for (auto& [m, c] : terms) r.terms[m] = -c;
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    for (auto& [m1, c1] : terms)
        for (auto& [m2, c2] : o.terms) {
            auto m = mono_mul(m1, m2);
            auto it = r.terms.find(m);
            if (it == r.terms.end()) {
                if (c1 * c2 != 0) r.terms[m] = c1 * c2;
            } else {
                it->second += c1 * c2;
                if (it->second == 0) r.terms.erase(it);
            }
        }
    return r;
}

Poly Poly::pow(unsigned n) const {
    Poly r(mpq_class(1));
    for (unsigned i = 0; i < n; ++i) r = r * (*this);
    return r;
}

std::optional<Poly> Poly::divide_exact(const Poly& d) const {
    if (d.is_zero()) return std::nullopt;
    Poly rem = *this, quot;
    // leading term of d under the map ordering (use rbegin: highest mono)
    auto lead = std::prev(d.terms.end());
    int guard = 0;
    while (!rem.is_zero()) {
        if (++guard > 2000) return std::nullopt;
        auto rl = std::prev(rem.terms.end());
        if (!mono_divides(lead->first, rl->first)) return std::nullopt;
        Poly t;
        t.terms[mono_div(rl->first, lead->first)] = rl->second / lead->second;
        quot = quot + t;
        rem = rem - t * d;
    }
    return quot;
}

mpq_class Poly::content_signed() const {
    if (terms.empty()) return 1;
    mpz_class g = 0, l = 1;
    for (auto& [m, c] : terms) {
        mpz_class n = abs(c.get_num());
        mpz_class d = c.get_den();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
    }
    mpq_class content(g, l);
    content.canonicalize();
    if (content == 0) content = 1;
    if (std::prev(terms.end())->second < 0) content = -content;
    return content;
}

std::optional<std::string> Poly::single_variable() const {
    std::optional<std::string> var;
    for (auto& [m, c] : terms)
        for (auto& [v, e] : m) {
            if (!var) {
                var = v;
            } else if (*var != v) {
                return std::nullopt;
            }
        }
    return var;
}

int Poly::degree(const std::string& var) const {
    int d = 0;
    for (auto& [m, c] : terms)
        for (auto& [v, e] : m)
            if (v == var) d = std::max(d, e);
    return d;
}

Poly univariate_gcd(const Poly& a, const Poly& b, const std::string& var) {
    // Euclid with exact rational arithmetic; inputs univariate in var.
    auto deg = [&](const Poly& p) { return p.is_zero() ? -1 : p.degree(var); };
    auto coeff_of = [&](const Poly& p, int d) -> mpq_class {
        for (auto& [m, c] : p.terms) {
            int e = m.empty() ? 0 : m[0].second;
            if ((m.empty() && d == 0) || (!m.empty() && e == d)) return c;
        }
        return 0;
    };
    Poly x = a, y = b;
    while (!y.is_zero()) {
        // remainder of x by y
        Poly r = x;
        while (!r.is_zero() && deg(r) >= deg(y)) {
            int dd = deg(r) - deg(y);
            mpq_class q = coeff_of(r, deg(r)) / coeff_of(y, deg(y));
            Poly t;
            if (dd == 0)
                t.terms[{}] = q;
            else
                t.terms[{{var, dd}}] = q;
            r = r - t * y;
        }
        x = y;
        y = r;
    }
    // normalize monic-ish: divide by signed content
    mpq_class c = x.content_signed();
    Poly out;
    for (auto& [m, v] : x.terms) out.terms[m] = v / c;
    return out;
}

RatFunc::RatFunc(Poly n, Poly d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw std::domain_error("RatFunc: zero denominator");
    reduce();
}

RatFunc RatFunc::constant(const mpq_class& c) { return RatFunc(Poly(c), Poly(mpq_class(1))); }

mpq_class RatFunc::constant_value() const { return num.constant_value() / den.constant_value(); }

bool RatFunc::is_integer() const {
    return is_constant() && constant_value().get_den() == 1;
}

void RatFunc::reduce() {
    if (num.is_zero()) {
        den = Poly(mpq_class(1));
        return;
    }
    // full gcd when both sides are univariate in the same parameter
    auto vn = num.single_variable();
    auto vd = den.single_variable();
    if (vd && (!vn || *vn == *vd) && !den.is_constant()) {
        std::string v = *vd;
        Poly g = univariate_gcd(num, den, v);
        if (!(g.is_constant())) {
            if (auto qn = num.divide_exact(g))
                if (auto qd = den.divide_exact(g)) {
                    num = *qn;
                    den = *qd;
                }
        }
    } else {
        if (auto q = num.divide_exact(den)) {
            num = *q;
            den = Poly(mpq_class(1));
        } else if (auto q2 = den.divide_exact(num)) {
            // num/den = 1/(den/num)
            Poly one(mpq_class(1));
            num = one;
            den = *q2;
        }
    }
    // canonical scaling: den content +1
    mpq_class c = den.content_signed();
    if (c != 1) {
        Poly n2, d2;
        for (auto& [m, v] : num.terms) n2.terms[m] = v / c;
        for (auto& [m, v] : den.terms) d2.terms[m] = v / c;
        num = n2;
        den = d2;
    }
}

RatFunc RatFunc::operator+(const RatFunc& o) const {
    return RatFunc(num * o.den + o.num * den, den * o.den);
}
RatFunc RatFunc::operator-(const RatFunc& o) const {
    return RatFunc(num * o.den - o.num * den, den * o.den);
}
RatFunc RatFunc::operator*(const RatFunc& o) const { return RatFunc(num * o.num, den * o.den); }
RatFunc RatFunc::operator/(const RatFunc& o) const {
    if (o.num.is_zero()) throw std::domain_error("RatFunc: division by zero");
    return RatFunc(num * o.den, den * o.num);
}

std::optional<RatFunc> to_ratfunc(const Expr& e) {
    switch (e->kind) {
    case Kind::Number:
        return RatFunc::constant(e->value);
    case Kind::Symbol:
        return RatFunc(Poly::variable(e->name), Poly(mpq_class(1)));
    case Kind::Sum: {
        RatFunc r = RatFunc::constant(0);
        for (auto& k : e->kids) {
            auto t = to_ratfunc(k);
            if (!t) return std::nullopt;
            r = r + *t;
        }
        return r;
    }
    case Kind::Product: {
        RatFunc r = RatFunc::constant(1);
        for (auto& k : e->kids) {
            auto t = to_ratfunc(k);
            if (!t) return std::nullopt;
            r = r * *t;
        }
        return r;
    }
    case Kind::Power: {
        auto b = to_ratfunc(e->kids[0]);
        if (!b) return std::nullopt;
        if (e->kids[1]->kind != Kind::Number || e->kids[1]->value.get_den() != 1) return std::nullopt;
        long n = e->kids[1]->value.get_num().get_si();
        if (n > 64 || n < -64) return std::nullopt;
        RatFunc r = RatFunc::constant(1);
        RatFunc base = n >= 0 ? *b : RatFunc::constant(1) / *b;
        for (long i = 0; i < (n >= 0 ? n : -n); ++i) r = r * base;
        return r;
    }
    default:
        return std::nullopt;
    }
}

Expr poly_to_expr(const Poly& p) {
    if (p.is_zero()) return num(0);
    std::vector<Expr> terms;
    for (auto& [m, c] : p.terms) {
        std::vector<Expr> fs;
        if (c != 1 || m.empty()) fs.push_back(num(c));
        for (auto& [v, e] : m) {
            if (e == 1)
                fs.push_back(sym(v));
            else
                fs.push_back(pow_(sym(v), num(e)));
        }
        terms.push_back(fs.size() == 1 ? fs[0] : prod(fs));
    }
    return terms.size() == 1 ? terms[0] : sum(terms);
}

Expr ratfunc_to_expr(const RatFunc& r) {
    if (r.den.is_constant()) {
        if (r.den.constant_value() == 1) return poly_to_expr(r.num);
        Poly scaled;
        for (auto& [m, c] : r.num.terms) scaled.terms[m] = c / r.den.constant_value();
        return poly_to_expr(scaled);
    }
    return prod({poly_to_expr(r.num), pow_(poly_to_expr(r.den), num(-1))});
}

} // namespace bvpsym
