#include "bvpsym/calculus.hpp"
#include "bvpsym/normalize.hpp"

#include <algorithm>

namespace bvpsym {

namespace {

Expr unary_chain(UnaryOp op, const Expr& arg) {
    switch (op) {
    case UnaryOp::Exp: return exp_(arg);
    case UnaryOp::Log: return pow_(arg, num(-1));
    case UnaryOp::Sin: return cos_(arg);
    case UnaryOp::Cos: return -sin_(arg);
    case UnaryOp::Tan: return num(1) + pow_(tan_(arg), num(2));
    case UnaryOp::Atan: return pow_(num(1) + pow_(arg, num(2)), num(-1));
    }
    return num(0);
}

template <typename LeafRule>
Expr differentiate(const Expr& e, const VariableContext& ctx, LeafRule&& leaf) {
    switch (e->kind) {
    case Kind::Number:
        return num(0);
    case Kind::Symbol:
    case Kind::Deriv:
        return leaf(e);
    case Kind::Func: {
        if (auto direct = leaf(e); direct != nullptr) return direct;
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
            Expr da = differentiate(e->kids[i], ctx, leaf);
            if (is_zero_number(da)) continue;
            auto ords = e->orders;
            ords[i] += 1;
            terms.push_back(func(e->name, ords, e->kids) * da);
        }
        return sum(std::move(terms));
    }
    case Kind::Sum: {
        std::vector<Expr> terms;
        for (auto& k : e->kids) {
            Expr d = differentiate(k, ctx, leaf);
            if (!is_zero_number(d)) terms.push_back(d);
        }
        return sum(std::move(terms));
    }
    case Kind::Product: {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
            Expr d = differentiate(e->kids[i], ctx, leaf);
            if (is_zero_number(d)) continue;
            std::vector<Expr> fs;
            for (std::size_t j = 0; j < e->kids.size(); ++j) fs.push_back(j == i ? d : e->kids[j]);
            terms.push_back(prod(std::move(fs)));
        }
        return sum(std::move(terms));
    }
    case Kind::Power: {
        const Expr& b = e->kids[0];
        const Expr& x = e->kids[1];
        Expr db = differentiate(b, ctx, leaf);
        Expr dx = differentiate(x, ctx, leaf);
        std::vector<Expr> terms;
        if (!is_zero_number(db)) terms.push_back(x * pow_(b, x - num(1)) * db);
        if (!is_zero_number(dx)) terms.push_back(pow_(b, x) * log_(b) * dx);
        return sum(std::move(terms));
    }
    case Kind::Unary: {
        Expr da = differentiate(e->kids[0], ctx, leaf);
        if (is_zero_number(da)) return num(0);
        return unary_chain(e->op, e->kids[0]) * da;
    }
    }
    return num(0);
}

} // namespace

Expr total_derivative(const Expr& e, const std::string& v, const VariableContext& ctx) {
    if (!ctx.is_independent(v)) throw Error("total_derivative: not an independent variable: " + v);
    auto leaf = [&](const Expr& a) -> Expr {
        if (a->kind == Kind::Symbol) return a->name == v ? num(1) : num(0);
        if (a->kind == Kind::Deriv) return deriv(a->name, midx_plus(a->midx, v));
        return nullptr; // Func: chain through arguments
    };
    return differentiate(e, ctx, leaf);
}

Expr total_derivative(const Expr& e, const std::vector<std::pair<std::string, int>>& midx,
                      const VariableContext& ctx) {
    Expr r = e;
    for (auto& [v, c] : midx)
        for (int i = 0; i < c; ++i) r = total_derivative(r, v, ctx);
    return r;
}

Expr jet_partial(const Expr& e, const Expr& atom, const VariableContext& ctx) {
    auto leaf = [&](const Expr& a) -> Expr {
        if (identical(a, atom)) return num(1);
        if (a->kind == Kind::Func) {
            if (atom->kind == Kind::Func && a->name == atom->name && a->orders == atom->orders)
                return nullptr; // different args: chain through them
            return nullptr;     // chain through arguments in all cases
        }
        return num(0);
    };
    if (atom->kind == Kind::Func) {
        // exact-atom semantics: identical applications vary, others chain
        auto leaf2 = [&](const Expr& a) -> Expr {
            if (identical(a, atom)) return num(1);
            if (a->kind == Kind::Func) return nullptr;
            return num(0);
        };
        return differentiate(e, ctx, leaf2);
    }
    return differentiate(e, ctx, leaf);
}

void Bindings::bind(const Expr& atom, const Expr& replacement) {
    if (atom->kind != Kind::Symbol && atom->kind != Kind::Deriv && atom->kind != Kind::Func)
        throw Error("substitute: binding key is not an atom: " + to_string(atom));
    items.emplace_back(atom, replacement);
}

Expr substitute(const Expr& e, const Bindings& b) {
    for (auto& [k, v] : b.items)
        if (identical(e, k)) return v;
    if (e->kids.empty()) return e;
    std::vector<Expr> kids;
    kids.reserve(e->kids.size());
    bool changed = false;
    for (auto& k : e->kids) {
        Expr nk = substitute(k, b);
        changed |= (nk.get() != k.get());
        kids.push_back(nk);
    }
    if (!changed) return e;
    switch (e->kind) {
    case Kind::Func: return func(e->name, e->orders, std::move(kids));
    case Kind::Sum: return sum(std::move(kids));
    case Kind::Product: return prod(std::move(kids));
    case Kind::Power: return pow_(kids[0], kids[1]);
    case Kind::Unary: return unary(e->op, kids[0]);
    default: return e;
    }
}

Expr apply_definition(const Expr& e, const std::string& fname, const VariableContext& ctx) {
    const FuncDecl& decl = ctx.function(fname);
    if (!decl.definition) throw Error("apply_definition: no definition for " + fname);
    std::function<Expr(const Expr&)> walk = [&](const Expr& n) -> Expr {
        std::vector<Expr> kids;
        kids.reserve(n->kids.size());
        for (auto& k : n->kids) kids.push_back(walk(k));
        Expr rebuilt;
        switch (n->kind) {
        case Kind::Func: rebuilt = func(n->name, n->orders, kids); break;
        case Kind::Sum: rebuilt = sum(kids); break;
        case Kind::Product: rebuilt = prod(kids); break;
        case Kind::Power: rebuilt = pow_(kids[0], kids[1]); break;
        case Kind::Unary: rebuilt = unary(n->op, kids[0]); break;
        default: rebuilt = n; break;
        }
        if (rebuilt->kind == Kind::Func && rebuilt->name == fname) {
            // differentiate the closed form w.r.t. its slots, then plug in args
            Expr body = *decl.definition;
            for (std::size_t i = 0; i < rebuilt->orders.size(); ++i)
                for (int d = 0; d < rebuilt->orders[i]; ++d) body = jet_partial(body, func_slot(int(i) + 1), ctx);
            Bindings b;
            for (std::size_t i = 0; i < rebuilt->kids.size(); ++i)
                b.bind(func_slot(int(i) + 1), rebuilt->kids[i]);
            return substitute(body, b);
        }
        return rebuilt;
    };
    return walk(e);
}

Expr apply_all_definitions(const Expr& e, const VariableContext& ctx) {
    Expr r = e;
    for (auto& [name, decl] : ctx.functions())
        if (decl.definition) r = apply_definition(r, name, ctx);
    return r;
}

Expr RewriteSystem::apply_once(const Expr& e, const VariableContext& ctx, bool& changed) const {
    std::vector<Expr> kids;
    kids.reserve(e->kids.size());
    for (auto& k : e->kids) kids.push_back(apply_once(k, ctx, changed));
    Expr rebuilt;
    switch (e->kind) {
    case Kind::Func: rebuilt = func(e->name, e->orders, kids); break;
    case Kind::Sum: rebuilt = sum(kids); break;
    case Kind::Product: rebuilt = prod(kids); break;
    case Kind::Power: rebuilt = pow_(kids[0], kids[1]); break;
    case Kind::Unary: rebuilt = unary(e->op, kids[0]); break;
    default: rebuilt = e; break;
    }
    if (rebuilt->kind != Kind::Func) return rebuilt;
    for (auto& r : rules_) {
        if (rebuilt->name != r.name || rebuilt->orders.size() != r.base_orders.size()) continue;
        bool ge = true;
        for (std::size_t i = 0; i < r.base_orders.size(); ++i)
            ge &= rebuilt->orders[i] >= r.base_orders[i];
        if (!ge) continue;
        bool args_match = rebuilt->kids.size() == r.args.size();
        for (std::size_t i = 0; args_match && i < r.args.size(); ++i)
            args_match = identical(rebuilt->kids[i], r.args[i]);
        if (!args_match) continue;
        Expr rhs = r.rhs;
        for (std::size_t i = 0; i < r.base_orders.size(); ++i) {
            int excess = rebuilt->orders[i] - r.base_orders[i];
            for (int d = 0; d < excess; ++d) rhs = total_derivative(rhs, r.args[i]->name, ctx);
        }
        changed = true;
        return rhs;
    }
    return rebuilt;
}

Expr RewriteSystem::apply(const Expr& e, const VariableContext& ctx) const {
    if (rules_.empty()) return e;
    Expr cur = e;
    for (int i = 0; i < 24; ++i) {
        bool changed = false;
        cur = apply_once(cur, ctx, changed);
        if (!changed) return cur;
    }
    throw Error("rewrite system did not reach a fixpoint");
}

std::optional<Expr> solve_linear_for(const Expr& rel, const Expr& atom, const VariableContext& ctx) {
    Expr a = normalize(jet_partial(rel, atom, ctx), ctx);
    if (is_zero_number(a) || contains(a, atom)) return std::nullopt;
    Bindings zero;
    zero.bind(atom, num(0));
    Expr b = normalize(substitute(rel, zero), ctx);
    return normalize(-b / a, ctx);
}

std::vector<Expr> derivative_atoms(const Expr& e) {
    std::vector<Expr> out;
    collect(e, Kind::Deriv, out);
    return out;
}

std::optional<Expr> highest_derivative(const Expr& e, const VariableContext& ctx) {
    (void)ctx;
    std::optional<Expr> best;
    for (auto& d : derivative_atoms(e)) {
        if (!best) {
            best = d;
            continue;
        }
        int od = midx_order(d->midx), ob = midx_order((*best)->midx);
        if (od > ob || (od == ob && d->midx > (*best)->midx)) best = d;
    }
    return best;
}

Expr eliminate_time_derivatives(const Expr& e, const Expr& F, const VariableContext& ctx,
                                const std::string& tname) {
    Bindings b;
    for (auto& d : derivative_atoms(e)) {
        int tc = midx_count(d->midx, tname);
        if (tc == 0) continue;
        if (tc > 1) throw Error("restriction: unexpected repeated time derivative " + to_string(d));
        std::vector<std::pair<std::string, int>> spatial;
        for (auto& [v, c] : d->midx)
            if (v != tname) spatial.emplace_back(v, c);
        b.bind(d, total_derivative(F, spatial, ctx));
    }
    if (b.items.empty()) return e;
    return substitute(e, b);
}

} // namespace bvpsym
