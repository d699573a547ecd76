#include "bvpsym/eval.hpp"
#include "bvpsym/calculus.hpp"
#include "bvpsym/normalize.hpp"

#include <cmath>
#include <functional>

namespace bvpsym {

namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;

std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

long double unit(std::uint64_t v) { return (long double)(v >> 11) / (long double)(1ULL << 53); }

// smooth opaque-function family: f(x) = a0 + a1*sin(sum b_i x_i + c);
// derivatives are exact, so total-derivative identities hold at sample points
long double func_value(const std::string& name, const std::vector<int>& orders,
                       const std::vector<long double>& args, std::uint64_t fseed) {
    std::uint64_t h = fseed ^ std::hash<std::string>{}(name);
    long double a0 = 1.2L + unit(splitmix(h));
    long double a1 = 0.3L + 0.6L * unit(splitmix(h));
    long double c = 2 * kPi * unit(splitmix(h));
    long double phase = c, slope = a1;
    int total = 0;
    for (std::size_t i = 0; i < args.size(); ++i) {
        long double bi = 0.7L + 0.6L * unit(splitmix(h));
        phase += bi * args[i];
        for (int k = 0; k < orders[i]; ++k) slope *= bi;
        total += orders[i];
    }
    long double v = slope * sinl(phase + total * kPi / 2);
    if (total == 0) v += a0;
    return v;
}

} // namespace

long double eval_expr(const Expr& e, const NumPoint& p, const VariableContext& ctx) {
    switch (e->kind) {
    case Kind::Number:
        return (long double)e->value.get_d();
    case Kind::Symbol: {
        auto it = p.syms.find(e->name);
        if (it == p.syms.end()) throw Error("eval: no value for symbol " + e->name);
        return it->second;
    }
    case Kind::Deriv: {
        auto it = p.jets.find(to_string(e));
        if (it == p.jets.end()) throw Error("eval: no value for jet " + to_string(e));
        return it->second;
    }
    case Kind::Func: {
        std::vector<long double> args;
        args.reserve(e->kids.size());
        for (auto& a : e->kids) args.push_back(eval_expr(a, p, ctx));
        return func_value(e->name, e->orders, args, p.fseed);
    }
    case Kind::Sum: {
        long double s = 0;
        for (auto& k : e->kids) s += eval_expr(k, p, ctx);
        return s;
    }
    case Kind::Product: {
        long double s = 1;
        for (auto& k : e->kids) s *= eval_expr(k, p, ctx);
        return s;
    }
    case Kind::Power: {
        long double b = eval_expr(e->kids[0], p, ctx);
        long double x = eval_expr(e->kids[1], p, ctx);
        if (b > 0) return expl(x * logl(b));
        long double r = roundl(x);
        if (fabsl(x - r) < 1e-12L) {
            if (b == 0 && r <= 0) throw SingularEval("0 to nonpositive power");
            return powl(b, r);
        }
        if (b == 0) {
            if (x > 0) return 0;
            throw SingularEval("0 to negative power");
        }
        throw SingularEval("negative base with non-integer exponent");
    }
    case Kind::Unary: {
        long double a = eval_expr(e->kids[0], p, ctx);
        switch (e->op) {
        case UnaryOp::Exp: return expl(a);
        case UnaryOp::Log:
            if (a <= 0) throw SingularEval("log of non-positive value");
            return logl(a);
        case UnaryOp::Sin: return sinl(a);
        case UnaryOp::Cos: return cosl(a);
        case UnaryOp::Tan:
            if (fabsl(cosl(a)) < 1e-12L) throw SingularEval("tan pole");
            return tanl(a);
        case UnaryOp::Atan: return atanl(a);
        }
        return 0;
    }
    }
    return 0;
}

namespace {

long double sample_symbol(const std::string& name, const VariableContext& ctx,
                          std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const auto& as = ctx.assumptions_for(name);
    for (int attempt = 0; attempt < 200; ++attempt) {
        long double v;
        bool ranged = false;
        for (auto& a : as) {
            if (a.type == Assumption::OpenRange) {
                long double lo = (long double)a.a.get_d(), hi = (long double)a.b.get_d();
                long double margin = (hi - lo) * 0.05L;
                v = lo + margin + (hi - lo - 2 * margin) * (long double)u01(rng);
                ranged = true;
                break;
            }
            if (a.type == Assumption::Positive) {
                v = 0.4L + 1.6L * (long double)u01(rng);
                ranged = true;
                break;
            }
            if (a.type == Assumption::Negative) {
                v = -(0.4L + 1.6L * (long double)u01(rng));
                ranged = true;
                break;
            }
        }
        if (!ranged) {
            v = 0.3L + 1.7L * (long double)u01(rng);
            if (u01(rng) < 0.5) v = -v;
        }
        bool ok = true;
        for (auto& a : as)
            if (a.type == Assumption::NotEqual && fabsl(v - (long double)a.a.get_d()) < 0.05L)
                ok = false;
        if (ok) return v;
    }
    throw Error("sample: could not satisfy assumptions for " + name);
}

} // namespace

NumPoint sample_point(const std::vector<Expr>& exprs, const VariableContext& ctx,
                      std::mt19937_64& rng) {
    NumPoint p;
    p.fseed = rng();
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Expr> symbols, jets;
    for (auto& e : exprs) {
        collect(e, Kind::Symbol, symbols);
        collect(e, Kind::Deriv, jets);
    }
    for (auto& s : symbols) {
        int slot;
        if (is_func_slot(s, slot)) continue;
        if (!p.syms.count(s->name)) p.syms[s->name] = sample_symbol(s->name, ctx, rng);
    }
    for (auto& j : jets) {
        std::string key = to_string(j);
        if (p.jets.count(key)) continue;
        if (j->midx.empty() && ctx.assumed_positive(j->name)) {
            p.jets[key] = 0.5L + 1.5L * (long double)u01(rng);
        } else {
            long double v = 0.3L + 1.7L * (long double)u01(rng);
            if (u01(rng) < 0.5) v = -v;
            p.jets[key] = v;
        }
    }
    return p;
}

EquivResult equivalent(const Expr& a, const Expr& b, const VariableContext& ctx,
                       std::uint64_t seed, int n_points) {
    if (is_zero(a - b, ctx)) return {EquivResult::Equal, 0};
    Expr diff = normalize(a - b, ctx);
    std::mt19937_64 rng(seed);
    int done = 0;
    for (int i = 0; i < n_points; ++i) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 100)
                return {EquivResult::Indeterminate, done};
            NumPoint p = sample_point({diff, a}, ctx, rng);
            try {
                long double va = eval_expr(a, p, ctx);
                long double vd = eval_expr(diff, p, ctx);
                if (fabsl(vd) >= 1e-9L * (1 + fabsl(va))) return {EquivResult::NotEqual, done};
                ++done;
                break;
            } catch (const SingularEval&) {
                continue;
            }
        }
    }
    return {EquivResult::ProbablyEqual, done};
}

EquivResult equivalent_up_to_scale(const Expr& a, const Expr& b, const VariableContext& ctx,
                                   std::uint64_t seed) {
    Expr na = normalize(a, ctx), nb = normalize(b, ctx);
    if (is_zero_number(na) && is_zero_number(nb)) return {EquivResult::Equal, 0};
    if (is_zero_number(na) || is_zero_number(nb)) return {EquivResult::NotEqual, 0};
    // scale from the leading monomials, then exact comparison
    auto [ca, fa] = monomial_parts(na->kind == Kind::Sum ? na->kids[0] : na);
    auto [cb, fb] = monomial_parts(nb->kind == Kind::Sum ? nb->kids[0] : nb);
    (void)fa;
    (void)fb;
    Expr scaled = normalize(prod({num(cb), nb}) - prod({num(ca), na}), ctx);
    if (is_zero(scaled, ctx)) return {EquivResult::Equal, 0};
    // fall back to a sampled ratio test
    std::mt19937_64 rng(seed);
    int done = 0;
    long double ratio = 0;
    for (int i = 0; i < 40; ++i) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 100) return {EquivResult::Indeterminate, done};
            NumPoint p = sample_point({na, nb}, ctx, rng);
            try {
                long double va = eval_expr(na, p, ctx);
                long double vb = eval_expr(nb, p, ctx);
                if (fabsl(vb) < 1e-12L) continue;
                long double r = va / vb;
                if (i == 0) {
                    ratio = r;
                } else if (fabsl(r - ratio) > 1e-7L * (1 + fabsl(ratio))) {
                    return {EquivResult::NotEqual, done};
                }
                ++done;
                break;
            } catch (const SingularEval&) {
                continue;
            }
        }
    }
    return {EquivResult::ProbablyEqual, done};
}

int sampled_sign(const Expr& e, const VariableContext& ctx, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    int sign = 0;
    for (int i = 0; i < 12; ++i) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 50) return 0;
            NumPoint p = sample_point({e}, ctx, rng);
            try {
                long double v = eval_expr(e, p, ctx);
                int s = v > 1e-12L ? 1 : (v < -1e-12L ? -1 : 0);
                if (s == 0) return 0;
                if (sign == 0) sign = s;
                if (sign != s) return 0;
                break;
            } catch (const SingularEval&) {
                continue;
            }
        }
    }
    return sign;
}

// ---------------------------------------------------------------------------
// symbolic power counting for limits

namespace {

struct Val {
    bool known = false;
    RatFunc ord; // growth order in the vanishing variable
};

// order of e as `var`->0+, other listed vanishing vars held generic nonzero
Val valuation0(const Expr& e, const std::string& var, const VariableContext& ctx) {
    switch (e->kind) {
    case Kind::Number:
        return {true, RatFunc::constant(0)};
    case Kind::Symbol:
        return {true, e->name == var ? RatFunc::constant(1) : RatFunc::constant(0)};
    case Kind::Deriv:
        return {true, RatFunc::constant(0)};
    case Kind::Func:
        for (auto& a : e->kids)
            if (contains(a, sym(var))) return {};
        return {true, RatFunc::constant(0)};
    case Kind::Sum: {
        bool first = true;
        RatFunc m;
        for (auto& k : e->kids) {
            Val v = valuation0(k, var, ctx);
            if (!v.known) return {};
            if (first) {
                m = v.ord;
                first = false;
            } else if (!(m == v.ord)) {
                // dominant term = smaller order; needs a sign decision
                Expr d = ratfunc_to_expr(v.ord - m);
                int s = sampled_sign(d, ctx, 7);
                if (s == 0) return {};
                if (s < 0) m = v.ord;
            }
        }
        return {true, m};
    }
    case Kind::Product: {
        RatFunc s = RatFunc::constant(0);
        for (auto& k : e->kids) {
            Val v = valuation0(k, var, ctx);
            if (!v.known) return {};
            s = s + v.ord;
        }
        return {true, s};
    }
    case Kind::Power: {
        Val b = valuation0(e->kids[0], var, ctx);
        if (!b.known) return {};
        auto r = to_ratfunc(e->kids[1]);
        if (!r) return {};
        return {true, b.ord * *r};
    }
    case Kind::Unary: {
        Val a = valuation0(e->kids[0], var, ctx);
        if (!a.known) return {};
        bool zero_arg = false;
        if (!(a.ord == RatFunc::constant(0))) {
            int s = sampled_sign(ratfunc_to_expr(a.ord), ctx, 11);
            if (s > 0) zero_arg = true;       // argument vanishes
            else if (s < 0) return {};        // argument blows up
            else return {};
        }
        switch (e->op) {
        case UnaryOp::Exp:
        case UnaryOp::Cos:
            return {true, RatFunc::constant(0)};
        case UnaryOp::Sin:
        case UnaryOp::Tan:
        case UnaryOp::Atan:
            return zero_arg ? a : Val{true, RatFunc::constant(0)};
        case UnaryOp::Log:
            return zero_arg ? Val{} : Val{true, RatFunc::constant(0)};
        }
        return {};
    }
    }
    return {};
}

// degree of e as var->+inf (dominant growth)
Val valuation_inf(const Expr& e, const std::string& var, const VariableContext& ctx) {
    switch (e->kind) {
    case Kind::Number:
    case Kind::Deriv:
        return {true, RatFunc::constant(0)};
    case Kind::Symbol:
        return {true, e->name == var ? RatFunc::constant(1) : RatFunc::constant(0)};
    case Kind::Func:
        for (auto& a : e->kids)
            if (contains(a, sym(var))) return {};
        return {true, RatFunc::constant(0)};
    case Kind::Sum: {
        bool first = true;
        RatFunc m;
        for (auto& k : e->kids) {
            Val v = valuation_inf(k, var, ctx);
            if (!v.known) return {};
            if (first) {
                m = v.ord;
                first = false;
            } else if (!(m == v.ord)) {
                Expr d = ratfunc_to_expr(v.ord - m);
                int s = sampled_sign(d, ctx, 7);
                if (s == 0) return {};
                if (s > 0) m = v.ord; // larger degree dominates at infinity
            }
        }
        return {true, m};
    }
    case Kind::Product: {
        RatFunc s = RatFunc::constant(0);
        for (auto& k : e->kids) {
            Val v = valuation_inf(k, var, ctx);
            if (!v.known) return {};
            s = s + v.ord;
        }
        return {true, s};
    }
    case Kind::Power: {
        Val b = valuation_inf(e->kids[0], var, ctx);
        if (!b.known) return {};
        auto r = to_ratfunc(e->kids[1]);
        if (!r) return {};
        return {true, b.ord * *r};
    }
    case Kind::Unary: {
        Val a = valuation_inf(e->kids[0], var, ctx);
        if (!a.known) return {};
        if (a.ord == RatFunc::constant(0)) return {true, RatFunc::constant(0)};
        int s = sampled_sign(ratfunc_to_expr(a.ord), ctx, 11);
        if (e->op == UnaryOp::Sin || e->op == UnaryOp::Cos || e->op == UnaryOp::Atan)
            return {true, RatFunc::constant(0)}; // bounded, possibly oscillatory
        if (s < 0) return {true, RatFunc::constant(0)};
        return {};
    }
    }
    return {};
}

LimitReport sampled_limit(const Expr& e, const std::vector<std::string>& vars, bool to_zero,
                          const VariableContext& ctx, std::uint64_t seed) {
    LimitReport rep;
    std::mt19937_64 rng(seed ^ 0xabcdefULL);
    std::vector<long double> mags;
    std::vector<int> signs;
    for (int attempt = 0; attempt < 20 && mags.empty(); ++attempt) {
        NumPoint base = sample_point({e}, ctx, rng);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::map<std::string, long double> dir;
        for (auto& v : vars) dir[v] = 0.5L + 1.5L * (long double)u01(rng);
        mags.clear();
        signs.clear();
        bool bad = false;
        for (int j = 3; j <= 24; ++j) {
            long double r = to_zero ? powl(2.0L, -(long double)j) : powl(2.0L, (long double)j);
            NumPoint p = base;
            for (auto& v : vars) p.syms[v] = dir[v] * r;
            try {
                long double val = eval_expr(e, p, ctx);
                mags.push_back(fabsl(val));
                signs.push_back(val > 0 ? 1 : (val < 0 ? -1 : 0));
            } catch (const SingularEval&) {
                bad = true;
                break;
            }
        }
        if (bad) mags.clear();
    }
    if (mags.size() < 6) {
        rep.cls = LimitClass::Unknown;
        rep.note = "sampling failed";
        return rep;
    }
    // discrete log-slope over the last half of the ray
    int n = (int)mags.size();
    long double slope = 0;
    int cnt = 0;
    for (int i = n / 2; i + 1 < n; ++i) {
        long double a = mags[i] > 1e-300L ? logl(mags[i]) : -700.0L;
        long double b = mags[i + 1] > 1e-300L ? logl(mags[i + 1]) : -700.0L;
        slope += (b - a) / logl(2.0L);
        ++cnt;
    }
    slope /= cnt > 0 ? cnt : 1;
    // growth exponent p: f ~ r^p along the ray
    long double p_exp = to_zero ? -slope : slope;
    for (int i = n / 2; i + 1 < n; ++i)
        if (signs[i] * signs[i + 1] < 0 && mags[i + 1] > 0.5L * mags[i]) rep.oscillatory = true;
    bool vanishes = to_zero ? (p_exp > 0.1L) : (p_exp < -0.1L);
    bool blows_up = to_zero ? (p_exp < -0.1L) : (p_exp > 0.1L);
    if (vanishes && mags.back() < 1e-2L)
        rep.cls = LimitClass::Zero;
    else if (blows_up || mags.back() > 1e8L)
        rep.cls = LimitClass::Diverges;
    else
        rep.cls = LimitClass::Bounded;
    rep.note = "sampled";
    return rep;
}

} // namespace

LimitReport limit_at_zero(const Expr& e, const std::vector<std::string>& vanishing,
                          const VariableContext& ctx, std::uint64_t seed) {
    Expr n = normalize(e, ctx);
    if (is_zero_number(n)) return {LimitClass::Zero, false, "identically zero"};
    std::vector<Expr> monos = n->kind == Kind::Sum ? n->kids : std::vector<Expr>{n};
    bool all_zero = true, all_bounded = true, known = true;
    for (auto& m : monos) {
        bool pos_total = false, any_sym = false;
        for (auto& v : vanishing) {
            Val val = valuation0(m, v, ctx);
            if (!val.known) {
                known = false;
                break;
            }
            Expr oe = ratfunc_to_expr(val.ord);
            int s;
            if (val.ord.is_constant())
                s = val.ord.constant_value() > 0 ? 1 : (val.ord.constant_value() < 0 ? -1 : 0);
            else
                s = sampled_sign(oe, ctx, seed + 13);
            if (s < 0) {
                all_bounded = false;
                all_zero = false;
            } else if (s > 0) {
                pos_total = true;
            } else if (!val.ord.is_constant()) {
                known = false;
                break;
            }
            any_sym = true;
        }
        if (!known) break;
        if (!any_sym || !pos_total) all_zero = false;
    }
    if (known) {
        if (all_zero) return {LimitClass::Zero, false, "power counting"};
        if (all_bounded) return {LimitClass::Bounded, false, "power counting"};
    }
    return sampled_limit(n, vanishing, true, ctx, seed);
}

LimitReport limit_at_infinity(const Expr& e, const std::string& var, const VariableContext& ctx,
                              std::uint64_t seed) {
    Expr n = normalize(e, ctx);
    if (is_zero_number(n)) return {LimitClass::Zero, false, "identically zero"};
    Val v = valuation_inf(n, var, ctx);
    if (v.known) {
        int s;
        if (v.ord.is_constant())
            s = v.ord.constant_value() > 0 ? 1 : (v.ord.constant_value() < 0 ? -1 : 0);
        else
            s = sampled_sign(ratfunc_to_expr(v.ord), ctx, seed + 17);
        if (s < 0) return {LimitClass::Zero, false, "power counting"};
        if (s == 0 && v.ord.is_constant()) {
            LimitReport rep = sampled_limit(n, {var}, false, ctx, seed);
            if (rep.cls == LimitClass::Unknown) rep.cls = LimitClass::Bounded;
            return rep;
        }
        if (s > 0) return {LimitClass::Diverges, false, "power counting"};
    }
    return sampled_limit(n, {var}, false, ctx, seed);
}

} // namespace bvpsym
