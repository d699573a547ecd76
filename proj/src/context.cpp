#include "bvpsym/context.hpp"

#include <algorithm>

namespace bvpsym {

void VariableContext::add_independent(const std::string& name) {
    if (std::find(indep_.begin(), indep_.end(), name) == indep_.end()) indep_.push_back(name);
}

void VariableContext::add_dependent(const std::string& name) {
    if (std::find(deps_.begin(), deps_.end(), name) == deps_.end()) deps_.push_back(name);
}

void VariableContext::add_parameter(const std::string& name) { params_.insert(name); }

void VariableContext::declare_function(const std::string& name, std::vector<Expr> args) {
    FuncDecl d;
    d.name = name;
    d.args = std::move(args);
    funcs_[name] = std::move(d);
}

void VariableContext::define_function(const std::string& name, const Expr& body) {
    auto it = funcs_.find(name);
    if (it == funcs_.end()) throw Error("define: function not declared: " + name);
    it->second.definition = body;
}

void VariableContext::assume(const std::string& symbol, Assumption a) {
    assumptions_[symbol].push_back(a);
}

void VariableContext::assume_positive_expr(const Expr& key) { positive_exprs_.push_back(key); }

bool VariableContext::is_independent(const std::string& n) const {
    return std::find(indep_.begin(), indep_.end(), n) != indep_.end();
}
bool VariableContext::is_dependent(const std::string& n) const {
    return std::find(deps_.begin(), deps_.end(), n) != deps_.end();
}
bool VariableContext::is_parameter(const std::string& n) const { return params_.count(n) > 0; }
bool VariableContext::has_function(const std::string& n) const { return funcs_.count(n) > 0; }

const FuncDecl& VariableContext::function(const std::string& n) const {
    auto it = funcs_.find(n);
    if (it == funcs_.end()) throw Error("unknown function: " + n);
    return it->second;
}

const std::string& VariableContext::dependent() const {
    if (deps_.empty()) throw Error("context has no dependent variable");
    return deps_.front();
}

const std::vector<Assumption>& VariableContext::assumptions_for(const std::string& symbol) const {
    static const std::vector<Assumption> none;
    auto it = assumptions_.find(symbol);
    return it == assumptions_.end() ? none : it->second;
}

bool VariableContext::assumed_positive(const std::string& symbol) const {
    for (auto& a : assumptions_for(symbol)) {
        if (a.type == Assumption::Positive) return true;
        if (a.type == Assumption::OpenRange && a.a >= 0) return true;
    }
    return false;
}

bool VariableContext::assumed_nonzero(const std::string& symbol) const {
    for (auto& a : assumptions_for(symbol)) {
        if (a.type == Assumption::Positive || a.type == Assumption::Negative ||
            a.type == Assumption::Nonzero)
            return true;
        if (a.type == Assumption::NotEqual && a.a == 0) return true;
        if (a.type == Assumption::OpenRange && (a.a >= 0 || a.b <= 0)) return true;
    }
    return false;
}

bool VariableContext::positive_expr(const Expr& e) const {
    for (auto& p : positive_exprs_)
        if (identical(p, e)) return true;
    return false;
}

void VariableContext::validate(const Expr& e) const {
    switch (e->kind) {
    case Kind::Symbol: {
        int slot;
        if (is_func_slot(e, slot)) break;
        if (!is_independent(e->name) && !is_parameter(e->name))
            throw Error("unregistered symbol: " + e->name);
        break;
    }
    case Kind::Deriv:
        if (!is_dependent(e->name)) throw Error("unregistered dependent variable: " + e->name);
        for (auto& [v, c] : e->midx)
            if (!is_independent(v)) throw Error("derivative w.r.t. non-independent variable: " + v);
        break;
    case Kind::Func:
        if (!has_function(e->name)) throw Error("unregistered function symbol: " + e->name);
        break;
    default:
        break;
    }
    for (auto& k : e->kids) validate(k);
}

Expr func_slot(int i) { return sym("$" + std::to_string(i)); }

bool is_func_slot(const Expr& e, int& idx_out) {
    if (e->kind != Kind::Symbol || e->name.empty() || e->name[0] != '$') return false;
    idx_out = std::stoi(e->name.substr(1));
    return true;
}

} // namespace bvpsym
