#pragma once

#include "bvpsym/context.hpp"
#include "bvpsym/expr.hpp"

namespace bvpsym {

enum class Positivity { Positive, NonNegative, Unknown };

// Canonical form: sums of monomials with rational coefficients, like terms
// collected, same-base powers combined (exponents canonicalized as rational
// functions of the parameters), integer powers of sums expanded up to
// `expand_limit`. Idempotent.
Expr normalize(const Expr& e, const VariableContext& ctx, int expand_limit = 8);

Positivity positivity(const Expr& e, const VariableContext& ctx);

// Symbolic zero test: normalize, then clear integer-power sum denominators
// and re-collect. A `false` only means "not proven zero symbolically".
bool is_zero(const Expr& e, const VariableContext& ctx);

// a - b proven zero symbolically
bool equal_normalized(const Expr& a, const Expr& b, const VariableContext& ctx);

// splits a canonical expression into (rational coefficient, remaining factors)
std::pair<mpq_class, std::vector<Expr>> monomial_parts(const Expr& term);

} // namespace bvpsym
