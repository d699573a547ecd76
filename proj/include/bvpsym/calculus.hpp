#pragma once

#include "bvpsym/context.hpp"
#include "bvpsym/expr.hpp"

#include <map>
#include <optional>
#include <vector>

namespace bvpsym {

// D_v: total derivative, dependent variables treated as functions of the
// independent ones; opaque symbols get their per-argument order bumped.
Expr total_derivative(const Expr& e, const std::string& v, const VariableContext& ctx);
Expr total_derivative(const Expr& e, const std::vector<std::pair<std::string, int>>& midx,
                      const VariableContext& ctx);

// partial derivative in jet coordinates: the atom (symbol, derivative node or
// opaque application) varies, every other atom is held fixed
Expr jet_partial(const Expr& e, const Expr& atom, const VariableContext& ctx);

// simultaneous replacement of atoms; keys must be Symbol/Deriv/Func nodes
struct Bindings {
    std::vector<std::pair<Expr, Expr>> items;
    void bind(const Expr& atom, const Expr& replacement);
};
Expr substitute(const Expr& e, const Bindings& b);

// replace every application of a defined opaque symbol by (derivatives of)
// its closed form; other functions untouched
Expr apply_definition(const Expr& e, const std::string& fname, const VariableContext& ctx);
Expr apply_all_definitions(const Expr& e, const VariableContext& ctx);

// oriented rewrite rules on opaque symbols, closed under differentiation
// (e.g. Cauchy-Riemann pairs, Laplacian rules like h_{x2 x2} -> h^2 - h_{x1 x1})
struct RewriteRule {
    std::string name;
    std::vector<int> base_orders;
    std::vector<Expr> args; // declared argument variables
    Expr rhs;
};

class RewriteSystem {
  public:
    void add(RewriteRule r) { rules_.push_back(std::move(r)); }
    bool empty() const { return rules_.empty(); }
    const std::vector<RewriteRule>& rules() const { return rules_; }
    // bottom-up rewriting to a fixpoint (bounded)
    Expr apply(const Expr& e, const VariableContext& ctx) const;

  private:
    std::vector<RewriteRule> rules_;
    Expr apply_once(const Expr& e, const VariableContext& ctx, bool& changed) const;
};

// rel == 0 solved for `atom` when rel is linear in it: atom = -B/A.
std::optional<Expr> solve_linear_for(const Expr& rel, const Expr& atom, const VariableContext& ctx);

// highest-order derivative atom of the dependent variable(s), spatial bias:
// ties broken toward lexicographically larger multi-index
std::optional<Expr> highest_derivative(const Expr& e, const VariableContext& ctx);

// replace u_{t J} -> D_J(F) and u_t -> F (evolution-form restriction)
Expr eliminate_time_derivatives(const Expr& e, const Expr& F, const VariableContext& ctx,
                                const std::string& tname);

// all derivative atoms present in e
std::vector<Expr> derivative_atoms(const Expr& e);

} // namespace bvpsym
