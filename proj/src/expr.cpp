#include "canard/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "canard/errors.hpp"
#include "canard/format.hpp"

namespace canard {

enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow };

struct RealExpr::Node {
    Kind kind = Kind::Const;
    double value = 0.0;
    int exponent = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const RealExpr::Node>;

NodePtr make_const(double v) {
    auto n = std::make_shared<RealExpr::Node>();
    n->kind = Kind::Const;
    n->value = v;
    return n;
}

NodePtr make_var() {
    auto n = std::make_shared<RealExpr::Node>();
    n->kind = Kind::Var;
    return n;
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Const && n->value == v; }

// Constructors below fold constants and drop neutral elements so that repeated
// differentiation keeps trees small.
NodePtr make_binary(Kind kind, NodePtr a, NodePtr b) {
    if (a->kind == Kind::Const && b->kind == Kind::Const) {
        switch (kind) {
            case Kind::Add: return make_const(a->value + b->value);
            case Kind::Sub: return make_const(a->value - b->value);
            case Kind::Mul: return make_const(a->value * b->value);
            case Kind::Div:
                if (b->value != 0.0) return make_const(a->value / b->value);
                break;
            default: break;
        }
    }
    switch (kind) {
        case Kind::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case Kind::Sub:
            if (is_const(b, 0.0)) return a;
            break;
        case Kind::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            break;
        case Kind::Div:
            if (is_const(a, 0.0) && !(b->kind == Kind::Const && b->value == 0.0)) return make_const(0.0);
            if (is_const(b, 1.0)) return a;
            break;
        default: break;
    }
    auto n = std::make_shared<RealExpr::Node>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a) {
    if (a->kind == Kind::Const) return make_const(-a->value);
    if (a->kind == Kind::Neg) return a->lhs;
    auto n = std::make_shared<RealExpr::Node>();
    n->kind = Kind::Neg;
    n->lhs = std::move(a);
    return n;
}

double ipow(double base, int k) {
    double result = 1.0;
    for (int i = 0; i < k; ++i) result *= base;
    return result;
}

NodePtr make_pow(NodePtr base, int k) {
    if (k == 0) return make_const(1.0);
    if (k == 1) return base;
    if (base->kind == Kind::Const) return make_const(ipow(base->value, k));
    auto n = std::make_shared<RealExpr::Node>();
    n->kind = Kind::Pow;
    n->exponent = k;
    n->lhs = std::move(base);
    return n;
}

double eval(const RealExpr::Node& n, double x) {
    switch (n.kind) {
        case Kind::Const: return n.value;
        case Kind::Var: return x;
        case Kind::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
        case Kind::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
        case Kind::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
        case Kind::Div: {
            const double den = eval(*n.rhs, x);
            if (den == 0.0) throw SingularityError("division by zero evaluating expression at x = " + format_real(x));
            return eval(*n.lhs, x) / den;
        }
        case Kind::Neg: return -eval(*n.lhs, x);
        case Kind::Pow: return ipow(eval(*n.lhs, x), n.exponent);
    }
    return 0.0;
}

NodePtr differentiate(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Const: return make_const(0.0);
        case Kind::Var: return make_const(1.0);
        case Kind::Add: return make_binary(Kind::Add, differentiate(n->lhs), differentiate(n->rhs));
        case Kind::Sub: return make_binary(Kind::Sub, differentiate(n->lhs), differentiate(n->rhs));
        case Kind::Mul:
            return make_binary(Kind::Add, make_binary(Kind::Mul, differentiate(n->lhs), n->rhs),
                               make_binary(Kind::Mul, n->lhs, differentiate(n->rhs)));
        case Kind::Div: {
            // (u/v)' = u'/v - u v' / v^2
            auto first = make_binary(Kind::Div, differentiate(n->lhs), n->rhs);
            auto second = make_binary(Kind::Div, make_binary(Kind::Mul, n->lhs, differentiate(n->rhs)),
                                      make_pow(n->rhs, 2));
            return make_binary(Kind::Sub, first, second);
        }
        case Kind::Neg: return make_neg(differentiate(n->lhs));
        case Kind::Pow:
            return make_binary(Kind::Mul,
                               make_binary(Kind::Mul, make_const(n->exponent), make_pow(n->lhs, n->exponent - 1)),
                               differentiate(n->lhs));
    }
    return make_const(0.0);
}

void print(const RealExpr::Node& n, std::string& out) {
    switch (n.kind) {
        case Kind::Const:
            if (n.value < 0.0 || std::signbit(n.value)) {
                out += "(";
                out += format_real(n.value);
                out += ")";
            } else {
                out += format_real(n.value);
            }
            return;
        case Kind::Var: out += "x"; return;
        case Kind::Neg:
            out += "(-";
            print(*n.lhs, out);
            out += ")";
            return;
        case Kind::Pow:
            out += "(";
            print(*n.lhs, out);
            out += ")^";
            out += std::to_string(n.exponent);
            return;
        default: break;
    }
    const char* op = n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - " : n.kind == Kind::Mul ? " * " : " / ";
    out += "(";
    print(*n.lhs, out);
    out += op;
    print(*n.rhs, out);
    out += ")";
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        auto e = expression();
        skip_space();
        if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) lhs = make_binary(Kind::Add, lhs, term());
            else if (accept('-')) lhs = make_binary(Kind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make_binary(Kind::Mul, lhs, unary());
            else if (accept('/')) {
                const std::size_t at = pos_;
                auto rhs = unary();
                if (is_const(rhs, 0.0)) throw ParseError("division by literal zero", at);
                lhs = make_binary(Kind::Div, lhs, rhs);
            } else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make_neg(unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (!accept('^')) return base;
        skip_space();
        const std::size_t start = pos_;
        int k = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), k);
        if (ec != std::errc() || k < 0) throw ParseError("exponent must be a nonnegative integer literal", start);
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
            throw ParseError("exponent must be a nonnegative integer literal", start);
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '^') throw ParseError("chained '^' is not supported", pos_);
        return make_pow(base, k);
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = expression();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (c == 'x') {
            ++pos_;
            return make_var();
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
            if (ec != std::errc()) throw ParseError("malformed number", pos_);
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            return make_const(v);
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

RealExpr::RealExpr() : node_(make_const(0.0)) {}

RealExpr RealExpr::parse(std::string_view text) { return RealExpr(Parser(text).parse()); }
RealExpr RealExpr::constant(double value) { return RealExpr(make_const(value)); }
RealExpr RealExpr::variable() { return RealExpr(make_var()); }

double RealExpr::operator()(double x) const { return eval(*node_, x); }
RealExpr RealExpr::derivative() const { return RealExpr(differentiate(node_)); }

std::string RealExpr::to_string() const {
    std::string out;
    print(*node_, out);
    return out;
}

bool RealExpr::is_constant() const { return node_->kind == Kind::Const; }
double RealExpr::constant_value() const { return node_->value; }

RealExpr operator+(const RealExpr& a, const RealExpr& b) { return RealExpr(make_binary(Kind::Add, a.node_, b.node_)); }
RealExpr operator-(const RealExpr& a, const RealExpr& b) { return RealExpr(make_binary(Kind::Sub, a.node_, b.node_)); }
RealExpr operator*(const RealExpr& a, const RealExpr& b) { return RealExpr(make_binary(Kind::Mul, a.node_, b.node_)); }
RealExpr operator/(const RealExpr& a, const RealExpr& b) { return RealExpr(make_binary(Kind::Div, a.node_, b.node_)); }
RealExpr operator-(const RealExpr& a) { return RealExpr(make_neg(a.node_)); }
RealExpr pow(const RealExpr& base, int exponent) {
    if (exponent < 0) throw RangeError("negative exponent");
    return RealExpr(make_pow(base.node_, exponent));
}

}  // namespace canard
