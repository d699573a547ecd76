#pragma once

#include "bvpsym/context.hpp"
#include "bvpsym/expr.hpp"
#include "bvpsym/poly.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bvpsym {

struct SingularEval : Error {
    using Error::Error;
};

// one numeric sample: values for symbols and jet coordinates; opaque symbols
// evaluate through a fixed smooth family seeded by `fseed`, with derivatives
// taken exactly, so identities that rely on the chain rule survive sampling
struct NumPoint {
    std::map<std::string, long double> syms;
    std::map<std::string, long double> jets; // keyed by to_string of the Deriv atom
    std::uint64_t fseed = 0;
};

long double eval_expr(const Expr& e, const NumPoint& p, const VariableContext& ctx);

// draws admissible values for every free symbol/jet of the given expressions
NumPoint sample_point(const std::vector<Expr>& exprs, const VariableContext& ctx,
                      std::mt19937_64& rng);

struct EquivResult {
    enum Verdict { Equal, ProbablyEqual, NotEqual, Indeterminate } verdict;
    int trials = 0;
    bool ok() const { return verdict == Equal || verdict == ProbablyEqual; }
};

// symbolic zero test first; randomized evaluation fallback at N points with
// relative tolerance 1e-9
EquivResult equivalent(const Expr& a, const Expr& b, const VariableContext& ctx,
                       std::uint64_t seed = 1, int n_points = 50);

// a ~ c*b for some nonzero rational-function scale c (used to compare
// equations that are only defined up to a factor)
EquivResult equivalent_up_to_scale(const Expr& a, const Expr& b, const VariableContext& ctx,
                                   std::uint64_t seed = 1);

enum class LimitClass { Zero, Bounded, Diverges, Unknown };

struct LimitReport {
    LimitClass cls = LimitClass::Unknown;
    bool oscillatory = false;
    std::string note;
};

// limit of e as the listed variables tend to 0+ jointly (all directions);
// symbolic power counting first, sampled rays with extrapolation as fallback
LimitReport limit_at_zero(const Expr& e, const std::vector<std::string>& vanishing,
                          const VariableContext& ctx, std::uint64_t seed = 1);

// limit of e as var -> +infinity
LimitReport limit_at_infinity(const Expr& e, const std::string& var, const VariableContext& ctx,
                              std::uint64_t seed = 1);

// sign of a parameter expression under the context assumptions (sampled);
// +1 / -1 / 0(indeterminate)
int sampled_sign(const Expr& e, const VariableContext& ctx, std::uint64_t seed = 1);

} // namespace bvpsym
