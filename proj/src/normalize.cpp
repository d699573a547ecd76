#include "bvpsym/normalize.hpp"
#include "bvpsym/poly.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace bvpsym {

namespace {

bool fits_long(const mpq_class& q) {
    return q.get_den() == 1 && q.get_num().fits_slong_p();
}

mpq_class rational_int_pow(const mpq_class& b, long e) {
    mpq_class r(1);
    mpq_class base = e >= 0 ? b : mpq_class(1) / b;
    long n = e >= 0 ? e : -e;
    for (long i = 0; i < n; ++i) r *= base;
    return r;
}

// exact n-th root of a positive integer, if it exists
bool exact_root(const mpz_class& v, unsigned long n, mpz_class& out) {
    if (v < 0) return false;
    mpz_class r;
    int exactp = mpz_root(r.get_mpz_t(), v.get_mpz_t(), n);
    if (exactp) {
        out = r;
        return true;
    }
    return false;
}

class Normalizer {
  public:
    Normalizer(const VariableContext& ctx, int limit) : ctx_(ctx), limit_(limit) {}

    Expr run(const Expr& e) {
        auto it = memo_.find(e.get());
        if (it != memo_.end()) return it->second.second;
        Expr r = dispatch(e);
        // the key shared_ptr is stored too: node addresses must not be reused
        memo_.emplace(e.get(), std::make_pair(e, r));
        return r;
    }

  private:
    const VariableContext& ctx_;
    int limit_;
    std::unordered_map<const ExprNode*, std::pair<Expr, Expr>> memo_;

    Expr dispatch(const Expr& e) {
        switch (e->kind) {
        case Kind::Number:
        case Kind::Symbol:
        case Kind::Deriv:
            return e;
        case Kind::Func: {
            std::vector<Expr> args;
            args.reserve(e->kids.size());
            for (auto& a : e->kids) args.push_back(run(a));
            return func(e->name, e->orders, std::move(args));
        }
        case Kind::Unary:
            return norm_unary(e->op, run(e->kids[0]));
        case Kind::Power:
            return norm_pow(run(e->kids[0]), run(e->kids[1]));
        case Kind::Product: {
            std::vector<Expr> fs;
            fs.reserve(e->kids.size());
            for (auto& k : e->kids) fs.push_back(run(k));
            return norm_product(std::move(fs));
        }
        case Kind::Sum: {
            std::vector<Expr> ts;
            ts.reserve(e->kids.size());
            for (auto& k : e->kids) ts.push_back(run(k));
            return norm_sum(std::move(ts));
        }
        }
        return e;
    }

    // -- exponent arithmetic (canonical via RatFunc when possible) ---------

    Expr exp_combine(const std::vector<Expr>& parts) {
        RatFunc acc = RatFunc::constant(0);
        bool ok = true;
        for (auto& p : parts) {
            auto r = to_ratfunc(p);
            if (!r) {
                ok = false;
                break;
            }
            acc = acc + *r;
        }
        if (ok) return run(ratfunc_to_expr(acc));
        return norm_sum(parts);
    }

    Expr exp_scale(const Expr& a, const Expr& b) {
        auto ra = to_ratfunc(a);
        auto rb = to_ratfunc(b);
        if (ra && rb) return run(ratfunc_to_expr(*ra * *rb));
        return norm_product({a, b});
    }

    bool leading_negative(const Expr& a) {
        const Expr* t = &a;
        if (a->kind == Kind::Sum) t = &a->kids[0];
        if ((*t)->kind == Kind::Number) return (*t)->value < 0;
        if ((*t)->kind == Kind::Product && !(*t)->kids.empty() &&
            (*t)->kids[0]->kind == Kind::Number)
            return (*t)->kids[0]->value < 0;
        return false;
    }

    Expr negate(const Expr& a) { return norm_product({num(-1), a}); }

    Expr norm_unary(UnaryOp op, Expr a) {
        switch (op) {
        case UnaryOp::Exp:
            if (is_zero_number(a)) return num(1);
            if (a->kind == Kind::Unary && a->op == UnaryOp::Log) return a->kids[0];
            return unary(UnaryOp::Exp, a);
        case UnaryOp::Log:
            if (is_one_number(a)) return num(0);
            if (a->kind == Kind::Unary && a->op == UnaryOp::Exp) return a->kids[0];
            if (a->kind == Kind::Power && positivity(a->kids[0], ctx_) == Positivity::Positive)
                return norm_product({a->kids[1], norm_unary(UnaryOp::Log, a->kids[0])});
            if (a->kind == Kind::Product) {
                bool all_pos = true;
                for (auto& f : a->kids) all_pos &= positivity(f, ctx_) == Positivity::Positive;
                if (all_pos) {
                    std::vector<Expr> ls;
                    for (auto& f : a->kids) ls.push_back(norm_unary(UnaryOp::Log, f));
                    return norm_sum(std::move(ls));
                }
            }
            return unary(UnaryOp::Log, a);
        case UnaryOp::Sin:
        case UnaryOp::Tan:
        case UnaryOp::Atan:
            if (is_zero_number(a)) return num(0);
            if (leading_negative(a)) return negate(unary(op, negate(a)));
            return unary(op, a);
        case UnaryOp::Cos:
            if (is_zero_number(a)) return num(1);
            if (leading_negative(a)) return unary(UnaryOp::Cos, negate(a));
            return unary(UnaryOp::Cos, a);
        }
        return unary(op, a);
    }

    // extract the signed numeric content of a canonical sum; first term
    // becomes +content-free
    std::pair<mpq_class, Expr> sum_content(const Expr& s) {
        if (s->kind != Kind::Sum) return {mpq_class(1), s};
        mpz_class g = 0, l = 1;
        for (auto& t : s->kids) {
            auto [c, fs] = monomial_parts(t);
            mpz_class n = abs(c.get_num());
            mpz_class d = c.get_den();
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
        }
        mpq_class content(g, l);
        content.canonicalize();
        if (content == 0) return {mpq_class(1), s};
        auto [c0, f0] = monomial_parts(s->kids[0]);
        if (c0 < 0) content = -content;
        if (content == 1) return {mpq_class(1), s};
        std::vector<Expr> ts;
        for (auto& t : s->kids) ts.push_back(norm_product({num(mpq_class(1) / content), t}));
        return {content, norm_sum(std::move(ts))};
    }

    Expr norm_pow(Expr b, Expr e) {
        // exponents live in Q(params) whenever possible; one canonical shape
        if (!is_number(e))
            if (auto r = to_ratfunc(e)) e = run(ratfunc_to_expr(*r));
        if (is_zero_number(e)) return num(1);
        if (is_one_number(e)) return b;
        if (is_one_number(b)) return num(1);
        if (is_zero_number(b)) {
            if (e->kind == Kind::Number && e->value > 0) return num(0);
            return pow_(b, e); // 0^negative: left alone, evaluator reports singular
        }
        if (b->kind == Kind::Number && e->kind == Kind::Number) {
            if (fits_long(e->value)) return num(rational_int_pow(b->value, e->value.get_num().get_si()));
            // rational exponent p/q on a positive rational base: try exact roots
            if (b->value > 0 && e->value.get_den().fits_ulong_p()) {
                unsigned long q = e->value.get_den().get_ui();
                mpz_class rn, rd;
                if (exact_root(b->value.get_num(), q, rn) && exact_root(b->value.get_den(), q, rd)) {
                    mpq_class root(rn, rd);
                    root.canonicalize();
                    if (fits_long(mpq_class(e->value.get_num())))
                        return num(rational_int_pow(root, e->value.get_num().get_si()));
                }
            }
            return pow_(b, e);
        }
        if (b->kind == Kind::Power) {
            bool ok = (e->kind == Kind::Number && e->value.get_den() == 1) ||
                      positivity(b->kids[0], ctx_) == Positivity::Positive;
            if (ok) return norm_pow(b->kids[0], exp_scale(b->kids[1], e));
            return pow_(b, e);
        }
        if (b->kind == Kind::Product) {
            bool int_exp = e->kind == Kind::Number && e->value.get_den() == 1;
            bool all_pos = true;
            for (auto& f : b->kids) all_pos &= positivity(f, ctx_) == Positivity::Positive;
            if (int_exp || all_pos) {
                std::vector<Expr> fs;
                for (auto& f : b->kids) fs.push_back(norm_pow(f, e));
                return norm_product(std::move(fs));
            }
            return pow_(b, e);
        }
        if (b->kind == Kind::Unary && b->op == UnaryOp::Exp)
            return norm_unary(UnaryOp::Exp, exp_scale(b->kids[0], e));
        // even cos powers canonicalize through sin so that sin^2+cos^2 folds
        if (b->kind == Kind::Unary && b->op == UnaryOp::Cos && e->kind == Kind::Number &&
            e->value.get_den() == 1 && e->value >= 2 && fits_long(e->value)) {
            long n = e->value.get_num().get_si();
            Expr one_minus = norm_sum({num(1), negate(norm_pow(sin_(b->kids[0]), num(2)))});
            Expr head = norm_pow(one_minus, num(n / 2));
            return n % 2 ? norm_product({head, b}) : head;
        }
        if (b->kind == Kind::Sum && e->kind == Kind::Number && e->value.get_den() == 1 &&
            fits_long(e->value)) {
            long n = e->value.get_num().get_si();
            auto [content, body] = sum_content(b);
            if (n >= 2 && n <= limit_) {
                Expr acc = body;
                for (long i = 1; i < n; ++i) acc = norm_product({acc, body});
                if (content != 1) acc = norm_product({num(rational_int_pow(content, n)), acc});
                return acc;
            }
            if (content != 1)
                return norm_product({num(rational_int_pow(content, n)), pow_(body, e)});
            return pow_(b, e);
        }
        return pow_(b, e);
    }

    Expr norm_product(std::vector<Expr> fs) {
        mpq_class coeff(1);
        std::vector<std::pair<Expr, std::vector<Expr>>> bases; // base -> exponent parts
        std::vector<Expr> exp_args;                            // exp() arguments
        std::vector<Expr> sums;                                // sum factors to distribute

        auto add_base = [&](const Expr& base, const Expr& exponent) {
            for (auto& [b, parts] : bases)
                if (identical(b, base)) {
                    parts.push_back(exponent);
                    return;
                }
            bases.push_back({base, {exponent}});
        };

        std::vector<Expr> work(fs.rbegin(), fs.rend());
        int guard = 0;
        while (!work.empty()) {
            if (++guard > 10000) throw Error("normalize: product loop guard tripped");
            Expr f = work.back();
            work.pop_back();
            switch (f->kind) {
            case Kind::Number:
                coeff *= f->value;
                if (coeff == 0) return num(0);
                break;
            case Kind::Product:
                for (auto& k : f->kids) work.push_back(k);
                break;
            case Kind::Power:
                if (f->kids[0]->kind == Kind::Unary && f->kids[0]->op == UnaryOp::Exp)
                    exp_args.push_back(exp_scale(f->kids[0]->kids[0], f->kids[1]));
                else
                    add_base(f->kids[0], f->kids[1]);
                break;
            case Kind::Unary:
                if (f->op == UnaryOp::Exp)
                    exp_args.push_back(f->kids[0]);
                else
                    add_base(f, num(1));
                break;
            case Kind::Sum:
                sums.push_back(f);
                break;
            default:
                add_base(f, num(1));
                break;
            }

            if (work.empty()) {
                // combine and re-examine: folding may produce new work
                std::vector<Expr> regenerated;
                std::vector<std::pair<Expr, std::vector<Expr>>> kept;
                for (auto& [base, parts] : bases) {
                    Expr e = parts.size() == 1 ? parts[0] : exp_combine(parts);
                    if (is_zero_number(e)) continue;
                    Expr pe = norm_pow(base, e);
                    if (pe->kind == Kind::Power && identical(pe->kids[0], base)) {
                        kept.push_back({base, {pe->kids[1]}});
                    } else if (identical(pe, base) && base->kind != Kind::Sum) {
                        kept.push_back({base, {num(1)}});
                    } else if (!is_one_number(pe)) {
                        regenerated.push_back(pe);
                    }
                }
                bases = std::move(kept);
                for (auto& r : regenerated) work.push_back(r);
            }
        }

        // merged exponential factor
        if (!exp_args.empty()) {
            Expr ea = exp_combine(exp_args);
            exp_args.clear();
            if (!is_zero_number(ea)) {
                Expr ex = norm_unary(UnaryOp::Exp, ea);
                if (ex->kind == Kind::Unary)
                    bases.push_back({ex, {num(1)}});
                else if (ex->kind == Kind::Number)
                    coeff *= ex->value;
                else
                    bases.push_back({ex, {num(1)}}); // e.g. log collapsed to atom
            }
        }

        std::vector<Expr> factors;
        for (auto& [base, parts] : bases) {
            Expr e = parts.size() == 1 ? parts[0] : exp_combine(parts);
            if (is_zero_number(e)) continue;
            factors.push_back(is_one_number(e) ? base : pow_(base, e));
        }
        std::sort(factors.begin(), factors.end(), [](const Expr& a, const Expr& b) {
            const Expr& ba = a->kind == Kind::Power ? a->kids[0] : a;
            const Expr& bb = b->kind == Kind::Power ? b->kids[0] : b;
            if (int c = compare(ba, bb)) return c < 0;
            return compare(a, b) < 0;
        });

        if (!sums.empty()) {
            // distribute: (sum1)(sum2)... * monomial
            std::vector<Expr> acc = {num(1)};
            for (auto& s : sums) {
                std::vector<Expr> next;
                const std::vector<Expr> terms =
                    s->kind == Kind::Sum ? s->kids : std::vector<Expr>{s};
                for (auto& a : acc)
                    for (auto& t : terms) next.push_back(norm_product({a, t}));
                acc = std::move(next);
            }
            std::vector<Expr> rest = factors;
            if (coeff != 1 || rest.empty()) rest.insert(rest.begin(), num(coeff));
            Expr mono = rest.size() == 1 ? rest[0] : prod(rest);
            std::vector<Expr> out;
            for (auto& a : acc) out.push_back(norm_product({a, mono}));
            return norm_sum(std::move(out));
        }

        if (factors.empty()) return num(coeff);
        if (coeff == 1 && factors.size() == 1) return factors[0];
        std::vector<Expr> out;
        if (coeff != 1) out.push_back(num(coeff));
        for (auto& f : factors) out.push_back(f);
        return out.size() == 1 ? out[0] : prod(std::move(out));
    }

    Expr norm_sum(std::vector<Expr> ts) {
        std::vector<std::pair<Expr, mpq_class>> groups; // key -> coeff
        std::vector<Expr> work(ts.rbegin(), ts.rend());
        while (!work.empty()) {
            Expr t = work.back();
            work.pop_back();
            if (t->kind == Kind::Sum) {
                for (auto& k : t->kids) work.push_back(k);
                continue;
            }
            auto [c, fs] = monomial_parts(t);
            if (c == 0) continue;
            Expr key = fs.empty() ? num(1) : (fs.size() == 1 ? fs[0] : prod(fs));
            bool found = false;
            for (auto& [k, acc] : groups)
                if (identical(k, key)) {
                    acc += c;
                    found = true;
                    break;
                }
            if (!found) groups.push_back({key, c});
        }
        std::vector<Expr> terms;
        for (auto& [key, c] : groups) {
            if (c == 0) continue;
            if (is_one_number(key))
                terms.push_back(num(c));
            else if (c == 1)
                terms.push_back(key);
            else if (key->kind == Kind::Product) {
                std::vector<Expr> fs = {num(c)};
                for (auto& f : key->kids) fs.push_back(f);
                terms.push_back(prod(std::move(fs)));
            } else {
                terms.push_back(prod({num(c), key}));
            }
        }
        std::sort(terms.begin(), terms.end(), [](const Expr& a, const Expr& b) {
            auto ka = monomial_parts(a);
            auto kb = monomial_parts(b);
            Expr key_a = ka.second.empty() ? num(1) : (ka.second.size() == 1 ? ka.second[0] : prod(ka.second));
            Expr key_b = kb.second.empty() ? num(1) : (kb.second.size() == 1 ? kb.second[0] : prod(kb.second));
            if (int c = compare(key_a, key_b)) return c < 0;
            return false;
        });
        if (terms.empty()) return num(0);
        if (terms.size() == 1) return terms[0];
        return sum(std::move(terms));
    }
};

} // namespace

std::pair<mpq_class, std::vector<Expr>> monomial_parts(const Expr& term) {
    if (term->kind == Kind::Number) return {term->value, {}};
    if (term->kind == Kind::Product) {
        mpq_class c(1);
        std::vector<Expr> fs;
        for (auto& f : term->kids) {
            if (f->kind == Kind::Number)
                c *= f->value;
            else
                fs.push_back(f);
        }
        return {c, fs};
    }
    return {mpq_class(1), {term}};
}

Expr normalize(const Expr& e, const VariableContext& ctx, int expand_limit) {
    Normalizer n(ctx, expand_limit);
    return n.run(e);
}

Positivity positivity(const Expr& e, const VariableContext& ctx) {
    if (ctx.positive_expr(e)) return Positivity::Positive;
    switch (e->kind) {
    case Kind::Number:
        if (e->value > 0) return Positivity::Positive;
        if (e->value == 0) return Positivity::NonNegative;
        return Positivity::Unknown;
    case Kind::Symbol:
        return ctx.assumed_positive(e->name) ? Positivity::Positive : Positivity::Unknown;
    case Kind::Deriv:
        if (e->midx.empty() && ctx.assumed_positive(e->name)) return Positivity::Positive;
        return Positivity::Unknown;
    case Kind::Func:
        return ctx.assumed_positive(e->name) ? Positivity::Positive : Positivity::Unknown;
    case Kind::Unary:
        return e->op == UnaryOp::Exp ? Positivity::Positive : Positivity::Unknown;
    case Kind::Power: {
        auto pb = positivity(e->kids[0], ctx);
        if (pb == Positivity::Positive) return Positivity::Positive;
        if (e->kids[1]->kind == Kind::Number && e->kids[1]->value.get_den() == 1 &&
            mpz_even_p(e->kids[1]->value.get_num().get_mpz_t()))
            return Positivity::NonNegative;
        return Positivity::Unknown;
    }
    case Kind::Product: {
        bool all_pos = true, all_nonneg = true;
        for (auto& f : e->kids) {
            auto p = positivity(f, ctx);
            if (p != Positivity::Positive) all_pos = false;
            if (p == Positivity::Unknown) all_nonneg = false;
        }
        if (all_pos) return Positivity::Positive;
        if (all_nonneg) return Positivity::NonNegative;
        return Positivity::Unknown;
    }
    case Kind::Sum: {
        bool any_pos = false, all_nonneg = true;
        for (auto& t : e->kids) {
            auto p = positivity(t, ctx);
            if (p == Positivity::Positive) any_pos = true;
            if (p == Positivity::Unknown) all_nonneg = false;
        }
        if (all_nonneg && any_pos) return Positivity::Positive;
        if (all_nonneg) return Positivity::NonNegative;
        return Positivity::Unknown;
    }
    }
    return Positivity::Unknown;
}

namespace {

// gather sum bases raised to negative integer powers at monomial level
void collect_denominator_sums(const Expr& n, std::map<std::string, std::pair<Expr, long>>& out) {
    auto visit_mono = [&](const Expr& mono) {
        auto [c, fs] = monomial_parts(mono);
        (void)c;
        for (auto& f : fs) {
            if (f->kind == Kind::Power && f->kids[0]->kind == Kind::Sum &&
                f->kids[1]->kind == Kind::Number && f->kids[1]->value.get_den() == 1 &&
                f->kids[1]->value < 0 && f->kids[1]->value.get_num().fits_slong_p()) {
                long need = -f->kids[1]->value.get_num().get_si();
                std::string key = to_string(f->kids[0]);
                auto it = out.find(key);
                if (it == out.end())
                    out[key] = {f->kids[0], need};
                else
                    it->second.second = std::max(it->second.second, need);
            }
        }
    };
    if (n->kind == Kind::Sum) {
        for (auto& t : n->kids) visit_mono(t);
    } else {
        visit_mono(n);
    }
}

} // namespace

bool is_zero(const Expr& e, const VariableContext& ctx) {
    Expr n = normalize(e, ctx);
    if (is_zero_number(n)) return true;
    for (int round = 0; round < 4; ++round) {
        std::map<std::string, std::pair<Expr, long>> dens;
        collect_denominator_sums(n, dens);
        if (dens.empty()) break;
        // multiply every monomial by each denominator base to its clearing
        // power, folding the exponent shift in at the factor level so the
        // positive and negative powers meet before any distribution happens
        std::vector<Expr> monos = n->kind == Kind::Sum ? n->kids : std::vector<Expr>{n};
        std::vector<Expr> rebuilt;
        for (auto& mono : monos) {
            auto [c, fs] = monomial_parts(mono);
            std::vector<Expr> nf;
            nf.push_back(num(c));
            std::map<std::string, bool> seen;
            for (auto& f : fs) {
                Expr base = f->kind == Kind::Power ? f->kids[0] : f;
                Expr ex = f->kind == Kind::Power ? f->kids[1] : num(1);
                std::string key = to_string(base);
                auto it = dens.find(key);
                if (it != dens.end() && base->kind == Kind::Sum) {
                    seen[key] = true;
                    nf.push_back(pow_(base, normalize(ex + num(it->second.second), ctx)));
                } else {
                    nf.push_back(f);
                }
            }
            for (auto& [key, be] : dens)
                if (!seen.count(key)) nf.push_back(pow_(be.first, num(be.second)));
            rebuilt.push_back(prod(nf));
        }
        n = normalize(sum(rebuilt), ctx, 64);
        if (is_zero_number(n)) return true;
    }
    return is_zero_number(n);
}

bool equal_normalized(const Expr& a, const Expr& b, const VariableContext& ctx) {
    return is_zero(a - b, ctx);
}

} // namespace bvpsym
