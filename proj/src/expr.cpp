#include "bvpsym/expr.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bvpsym {

namespace {

std::size_t hash_combine(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t node_hash(const ExprNode& n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 0x100000001b3ULL;
    switch (n.kind) {
    case Kind::Number: {
        h = hash_combine(h, std::hash<std::string>{}(n.value.get_str()));
        break;
    }
    case Kind::Symbol:
        h = hash_combine(h, std::hash<std::string>{}(n.name));
        break;
    case Kind::Deriv:
        h = hash_combine(h, std::hash<std::string>{}(n.name));
        for (auto& [v, c] : n.midx) {
            h = hash_combine(h, std::hash<std::string>{}(v));
            h = hash_combine(h, static_cast<std::size_t>(c));
        }
        break;
    case Kind::Func:
        h = hash_combine(h, std::hash<std::string>{}(n.name));
        for (int o : n.orders) h = hash_combine(h, static_cast<std::size_t>(o + 1));
        break;
    case Kind::Unary:
        h = hash_combine(h, static_cast<std::size_t>(n.op));
        break;
    default:
        break;
    }
    for (auto& k : n.kids) h = hash_combine(h, k->hash);
    return h;
}

Expr finish(std::shared_ptr<ExprNode> n) {
    n->hash = node_hash(*n);
    return n;
}

} // namespace

Expr num(long n) { return num(mpq_class(n)); }
Expr num(long n, long d) {
    mpq_class q(n, d);
    q.canonicalize();
    return num(q);
}
Expr num(const mpq_class& q) {
    auto n = std::make_shared<ExprNode>(Kind::Number);
    n->value = q;
    n->value.canonicalize();
    return finish(n);
}

Expr sym(const std::string& name) {
    auto n = std::make_shared<ExprNode>(Kind::Symbol);
    n->name = name;
    return finish(n);
}

Expr deriv(const std::string& dep, std::vector<std::pair<std::string, int>> midx) {
    auto n = std::make_shared<ExprNode>(Kind::Deriv);
    n->name = dep;
    std::sort(midx.begin(), midx.end());
    // merge duplicates, drop zero counts
    std::vector<std::pair<std::string, int>> m;
    for (auto& [v, c] : midx) {
        if (c == 0) continue;
        if (c < 0) throw std::invalid_argument("negative derivative count");
        if (!m.empty() && m.back().first == v)
            m.back().second += c;
        else
            m.emplace_back(v, c);
    }
    n->midx = std::move(m);
    return finish(n);
}

Expr func(const std::string& name, std::vector<int> orders, std::vector<Expr> args) {
    if (orders.size() != args.size()) throw std::invalid_argument("func: orders/args size mismatch");
    auto n = std::make_shared<ExprNode>(Kind::Func);
    n->name = name;
    n->orders = std::move(orders);
    n->kids = std::move(args);
    return finish(n);
}

Expr sum(std::vector<Expr> terms) {
    if (terms.empty()) return num(0);
    if (terms.size() == 1) return terms[0];
    auto n = std::make_shared<ExprNode>(Kind::Sum);
    n->kids = std::move(terms);
    return finish(n);
}

Expr prod(std::vector<Expr> factors) {
    if (factors.empty()) return num(1);
    if (factors.size() == 1) return factors[0];
    auto n = std::make_shared<ExprNode>(Kind::Product);
    n->kids = std::move(factors);
    return finish(n);
}

Expr pow_(Expr base, Expr exponent) {
    auto n = std::make_shared<ExprNode>(Kind::Power);
    n->kids = {std::move(base), std::move(exponent)};
    return finish(n);
}

Expr unary(UnaryOp op, Expr arg) {
    auto n = std::make_shared<ExprNode>(Kind::Unary);
    n->op = op;
    n->kids = {std::move(arg)};
    return finish(n);
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, prod({num(-1), b})}); }
Expr operator-(const Expr& a) { return prod({num(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return prod({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return prod({a, pow_(b, num(-1))}); }

bool is_number(const Expr& e) { return e->kind == Kind::Number; }
bool is_zero_number(const Expr& e) { return e->kind == Kind::Number && e->value == 0; }
bool is_one_number(const Expr& e) { return e->kind == Kind::Number && e->value == 1; }
bool is_integer_number(const Expr& e) {
    return e->kind == Kind::Number && e->value.get_den() == 1;
}

int compare(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    switch (a->kind) {
    case Kind::Number:
        return cmp(a->value, b->value) < 0 ? -1 : (cmp(a->value, b->value) > 0 ? 1 : 0);
    case Kind::Symbol:
        return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
    case Kind::Deriv: {
        if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
        if (a->midx != b->midx) return a->midx < b->midx ? -1 : 1;
        return 0;
    }
    case Kind::Func: {
        if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
        if (a->orders != b->orders) return a->orders < b->orders ? -1 : 1;
        break;
    }
    case Kind::Unary:
        if (a->op != b->op) return a->op < b->op ? -1 : 1;
        break;
    default:
        break;
    }
    if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (int c = compare(a->kids[i], b->kids[i])) return c;
    return 0;
}

std::vector<std::pair<std::string, int>> midx_plus(const std::vector<std::pair<std::string, int>>& m,
                                                   const std::string& var) {
    auto out = m;
    for (auto& [v, c] : out)
        if (v == var) {
            ++c;
            return out;
        }
    out.emplace_back(var, 1);
    std::sort(out.begin(), out.end());
    return out;
}

int midx_count(const std::vector<std::pair<std::string, int>>& m, const std::string& var) {
    for (auto& [v, c] : m)
        if (v == var) return c;
    return 0;
}

int midx_order(const std::vector<std::pair<std::string, int>>& m) {
    int n = 0;
    for (auto& [v, c] : m) n += c;
    return n;
}

void collect(const Expr& e, Kind k, std::vector<Expr>& out) {
    if (e->kind == k) {
        bool seen = false;
        for (auto& o : out)
            if (identical(o, e)) {
                seen = true;
                break;
            }
        if (!seen) out.push_back(e);
    }
    for (auto& c : e->kids) collect(c, k, out);
}

bool contains(const Expr& e, const Expr& atom) {
    if (identical(e, atom)) return true;
    for (auto& c : e->kids)
        if (contains(c, atom)) return true;
    return false;
}

bool contains_kind(const Expr& e, Kind k) {
    if (e->kind == k) return true;
    for (auto& c : e->kids)
        if (contains_kind(c, k)) return true;
    return false;
}

// -- printing ----------------------------------------------------------------

namespace {

// precedence: sum 1, product 2, unary-minus 2, power 3, atom 4
void print(std::ostream& os, const Expr& e, int parent_prec);

void print_paren(std::ostream& os, const Expr& e, int prec, int parent_prec) {
    if (prec < parent_prec) {
        os << '(';
        print(os, e, 0);
        os << ')';
    } else {
        print(os, e, prec);
    }
}

bool is_neg_one_pow(const Expr& e) {
    return e->kind == Kind::Power && e->kids[1]->kind == Kind::Number && e->kids[1]->value == -1;
}

void print(std::ostream& os, const Expr& e, int parent_prec) {
    switch (e->kind) {
    case Kind::Number: {
        if (e->value < 0 && parent_prec > 1) {
            os << '(' << e->value << ')';
        } else {
            os << e->value;
        }
        return;
    }
    case Kind::Symbol:
        os << e->name;
        return;
    case Kind::Deriv: {
        os << e->name;
        if (!e->midx.empty()) {
            int total = 0;
            for (auto& [v, c] : e->midx) total += c;
            bool brace = e->midx.size() > 1 || total > 1;
            os << '_';
            if (brace) os << '{';
            bool first = true;
            for (auto& [v, c] : e->midx)
                for (int i = 0; i < c; ++i) {
                    if (!first) os << ' ';
                    os << v;
                    first = false;
                }
            if (brace) os << '}';
        }
        return;
    }
    case Kind::Func: {
        os << e->name;
        bool all_zero = true;
        for (int o : e->orders) all_zero &= (o == 0);
        if (!all_zero) {
            if (e->orders.size() == 1 && e->orders[0] <= 3) {
                for (int i = 0; i < e->orders[0]; ++i) os << '\'';
            } else {
                os << "^(";
                for (std::size_t i = 0; i < e->orders.size(); ++i) {
                    if (i) os << ',';
                    os << e->orders[i];
                }
                os << ')';
            }
        }
        os << '(';
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
            if (i) os << ", ";
            print(os, e->kids[i], 0);
        }
        os << ')';
        return;
    }
    case Kind::Unary: {
        switch (e->op) {
        case UnaryOp::Exp: os << "exp"; break;
        case UnaryOp::Log: os << "log"; break;
        case UnaryOp::Sin: os << "sin"; break;
        case UnaryOp::Cos: os << "cos"; break;
        case UnaryOp::Tan: os << "tan"; break;
        case UnaryOp::Atan: os << "atan"; break;
        }
        os << '(';
        print(os, e->kids[0], 0);
        os << ')';
        return;
    }
    case Kind::Power: {
        if (parent_prec > 3) os << '(';
        print_paren(os, e->kids[0], 4, 4); // base always tight
        os << '^';
        print_paren(os, e->kids[1], 4, 4);
        if (parent_prec > 3) os << ')';
        return;
    }
    case Kind::Product: {
        // render leading -1 as unary minus, x^-1 factors as division
        std::vector<Expr> numer, denom;
        mpq_class c(1);
        for (auto& f : e->kids) {
            if (f->kind == Kind::Number)
                c *= f->value;
            else if (is_neg_one_pow(f))
                denom.push_back(f->kids[0]);
            else
                numer.push_back(f);
        }
        bool neg = c < 0;
        if (neg) c = -c;
        if (parent_prec > 2 && neg) os << '(';
        if (neg) os << '-';
        bool printed = false;
        if (c != 1 || numer.empty()) {
            if (c.get_den() == 1) {
                os << c.get_num();
            } else {
                os << c.get_num() << '/' << c.get_den();
            }
            printed = true;
        }
        for (auto& f : numer) {
            if (printed) os << '*';
            print_paren(os, f, f->kind == Kind::Sum ? 1 : (f->kind == Kind::Product ? 2 : 3), 3);
            printed = true;
        }
        for (auto& f : denom) {
            os << '/';
            print_paren(os, f, f->kind == Kind::Sum || f->kind == Kind::Product ? 1 : 3, 3);
        }
        if (parent_prec > 2 && neg) os << ')';
        return;
    }
    case Kind::Sum: {
        if (parent_prec > 1) os << '(';
        bool first = true;
        for (auto& t : e->kids) {
            // pull sign out of the term for readable output
            bool neg = false;
            Expr body = t;
            if (t->kind == Kind::Number && t->value < 0) {
                neg = true;
                body = num(-t->value);
            } else if (t->kind == Kind::Product && !t->kids.empty() && t->kids[0]->kind == Kind::Number &&
                       t->kids[0]->value < 0) {
                neg = true;
                std::vector<Expr> ks = t->kids;
                mpq_class v = -ks[0]->value;
                if (v == 1 && ks.size() > 1)
                    ks.erase(ks.begin());
                else
                    ks[0] = num(v);
                body = prod(ks);
            }
            if (first) {
                if (neg) os << '-';
            } else {
                os << (neg ? " - " : " + ");
            }
            print(os, body, 2);
            first = false;
        }
        if (parent_prec > 1) os << ')';
        return;
    }
    }
}

} // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    print(os, e, 0);
    return os.str();
}

} // namespace bvpsym
