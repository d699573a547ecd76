#pragma once

#include "bvpsym/expr.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvpsym {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Constraint attached to a symbol (or to the dependent variable).
struct Assumption {
    enum Type { Positive, Negative, Nonzero, NotEqual, OpenRange } type = Nonzero;
    mpq_class a, b; // NotEqual uses a; OpenRange uses (a,b)

    static Assumption positive() { return {Positive, 0, 0}; }
    static Assumption negative() { return {Negative, 0, 0}; }
    static Assumption nonzero() { return {Nonzero, 0, 0}; }
    static Assumption not_equal(const mpq_class& v) { return {NotEqual, v, 0}; }
    static Assumption open_range(const mpq_class& lo, const mpq_class& hi) { return {OpenRange, lo, hi}; }
};

struct FuncDecl {
    std::string name;
    std::vector<Expr> args;            // declared argument expressions, e.g. d(u), q(t), A(x1,x2)
    std::optional<Expr> definition;    // closed form in a fresh slot symbol per argument ($1, $2, ...)
};

// Registry of every symbol an Expression under analysis may mention.
class VariableContext {
  public:
    void add_independent(const std::string& name);
    void add_dependent(const std::string& name);
    void add_parameter(const std::string& name);
    void declare_function(const std::string& name, std::vector<Expr> args);
    void define_function(const std::string& name, const Expr& body_in_slots);

    void assume(const std::string& symbol, Assumption a);
    void assume_positive_expr(const Expr& normalized_key);

    bool is_independent(const std::string& n) const;
    bool is_dependent(const std::string& n) const;
    bool is_parameter(const std::string& n) const;
    bool has_function(const std::string& n) const;
    const FuncDecl& function(const std::string& n) const;

    const std::vector<std::string>& independents() const { return indep_; }
    const std::vector<std::string>& dependents() const { return deps_; }
    const std::string& dependent() const;
    const std::set<std::string>& parameters() const { return params_; }
    const std::map<std::string, FuncDecl>& functions() const { return funcs_; }

    const std::vector<Assumption>& assumptions_for(const std::string& symbol) const;
    bool assumed_positive(const std::string& symbol) const;
    bool assumed_nonzero(const std::string& symbol) const;
    bool positive_expr(const Expr& e) const; // registered whole-expression positivity

    // throws Error naming the first unregistered symbol, if any
    void validate(const Expr& e) const;

  private:
    std::vector<std::string> indep_;
    std::vector<std::string> deps_;
    std::set<std::string> params_;
    std::map<std::string, FuncDecl> funcs_;
    std::map<std::string, std::vector<Assumption>> assumptions_;
    std::vector<Expr> positive_exprs_;
};

// argument slot symbols for function definitions
Expr func_slot(int i);
bool is_func_slot(const Expr& e, int& idx_out);

} // namespace bvpsym
