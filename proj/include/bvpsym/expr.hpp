#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace bvpsym {

// Immutable symbolic expression tree. Nodes are shared and never mutated
// after construction; structural equality is decided by compare().
enum class Kind : std::uint8_t {
    Number,   // exact rational
    Symbol,   // parameter or independent variable (role lives in the context)
    Deriv,    // dependent variable derivative; empty multi-index is the variable itself
    Func,     // opaque function symbol with per-argument derivative orders
    Sum,
    Product,
    Power,    // kids = {base, exponent}
    Unary,    // exp, log, trig
};

enum class UnaryOp : std::uint8_t { Exp, Log, Sin, Cos, Tan, Atan };

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

class ExprNode {
  public:
    Kind kind;
    mpq_class value;                                    // Number
    std::string name;                                   // Symbol, Deriv (dep var), Func
    std::vector<std::pair<std::string, int>> midx;      // Deriv: sorted (var, count), count >= 1
    std::vector<int> orders;                            // Func: derivative order per argument
    UnaryOp op = UnaryOp::Exp;                          // Unary
    std::vector<Expr> kids;                             // Sum/Product terms, Power {b,e}, Unary {arg}, Func args
    std::size_t hash = 0;

    ExprNode(Kind k) : kind(k) {}
};

// -- constructors -----------------------------------------------------------

Expr num(long n);
Expr num(long n, long d);
Expr num(const mpq_class& q);
Expr sym(const std::string& name);
Expr deriv(const std::string& dep, std::vector<std::pair<std::string, int>> midx);
Expr func(const std::string& name, std::vector<int> orders, std::vector<Expr> args);
Expr sum(std::vector<Expr> terms);
Expr prod(std::vector<Expr> factors);
Expr pow_(Expr base, Expr exponent);
Expr unary(UnaryOp op, Expr arg);

inline Expr exp_(Expr a) { return unary(UnaryOp::Exp, std::move(a)); }
inline Expr log_(Expr a) { return unary(UnaryOp::Log, std::move(a)); }
inline Expr sin_(Expr a) { return unary(UnaryOp::Sin, std::move(a)); }
inline Expr cos_(Expr a) { return unary(UnaryOp::Cos, std::move(a)); }
inline Expr tan_(Expr a) { return unary(UnaryOp::Tan, std::move(a)); }
inline Expr atan_(Expr a) { return unary(UnaryOp::Atan, std::move(a)); }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

// -- queries -----------------------------------------------------------------

bool is_number(const Expr& e);
bool is_zero_number(const Expr& e);
bool is_one_number(const Expr& e);
bool is_integer_number(const Expr& e);

// total structural order; 0 iff structurally identical
int compare(const Expr& a, const Expr& b);
inline bool identical(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

// raise/lower a derivative multi-index by one in `var`
std::vector<std::pair<std::string, int>> midx_plus(const std::vector<std::pair<std::string, int>>& m,
                                                   const std::string& var);
int midx_count(const std::vector<std::pair<std::string, int>>& m, const std::string& var);
int midx_order(const std::vector<std::pair<std::string, int>>& m);

// collect atoms of interest (pre-order, deduplicated)
void collect(const Expr& e, Kind k, std::vector<Expr>& out);
bool contains(const Expr& e, const Expr& atom);
bool contains_kind(const Expr& e, Kind k);

// plain debug/round-trip printing (DSL-compatible; see dsl.hpp for stanzas)
std::string to_string(const Expr& e);

} // namespace bvpsym
