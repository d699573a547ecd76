#pragma once

#include "bvpsym/calculus.hpp"
#include "bvpsym/context.hpp"
#include "bvpsym/expr.hpp"

#include <map>
#include <string>
#include <vector>

namespace bvpsym {

// Symmetry operator  X = xi^0 d/dt + xi^i d/dx_i + eta d/du.
// Lie form: xi's independent of u; conditional (Q) form may depend on u.
struct VectorField {
    std::vector<Expr> xi; // aligned with ctx.independents()
    Expr eta;
    bool conditional = false;

    static VectorField zero(const VariableContext& ctx);
    bool is_zero_field(const VariableContext& ctx) const;

    // action on a function of (t, x, u): xi.grad f + eta f_u
    Expr apply(const Expr& f, const VariableContext& ctx) const;

    VectorField scaled(const Expr& c, const VariableContext& ctx) const;
    VectorField plus(const VectorField& o, const VariableContext& ctx) const;

    // checks the Lie-form restriction (xi independent of u)
    bool lie_form(const VariableContext& ctx) const;

    std::string describe(const VariableContext& ctx) const;
};

// k-th prolongation: sigma coefficients for the jet slots. Pure spatial
// multi-indices up to the order plus the single u_t slot (evolution form
// never needs the repeated-time slots).
struct ProlongedField {
    VectorField base;
    int order = 1;
    // key: derivative atom (Deriv expr of the dependent), value: sigma
    std::vector<std::pair<Expr, Expr>> sigma;

    const Expr* sigma_for(const Expr& deriv_atom) const;
};

ProlongedField prolong(const VectorField& X, int order, const VariableContext& ctx);

// Lie-derivative action of the prolonged field on a jet-space expression
Expr apply_prolonged(const ProlongedField& Xk, const Expr& e, const VariableContext& ctx);

} // namespace bvpsym
