#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace canard {

/// Immutable arithmetic expression in one variable `x`.
///
/// Grammar: numbers, `x`, `+ - * /`, unary minus, parentheses and `^` with a
/// nonnegative integer literal exponent. Nodes are shared, so copies are cheap
/// and instances may be read concurrently.
class RealExpr {
public:
    struct Node;

    RealExpr();  // the constant 0

    static RealExpr parse(std::string_view text);
    static RealExpr constant(double value);
    static RealExpr variable();

    /// Throws SingularityError on division by zero.
    double operator()(double x) const;

    RealExpr derivative() const;

    /// Canonical text form; `parse(to_string())` evaluates identically.
    std::string to_string() const;

    bool is_constant() const;
    /// Only meaningful when is_constant().
    double constant_value() const;

    friend RealExpr operator+(const RealExpr& a, const RealExpr& b);
    friend RealExpr operator-(const RealExpr& a, const RealExpr& b);
    friend RealExpr operator*(const RealExpr& a, const RealExpr& b);
    friend RealExpr operator/(const RealExpr& a, const RealExpr& b);
    friend RealExpr operator-(const RealExpr& a);
    friend RealExpr pow(const RealExpr& base, int exponent);

private:
    explicit RealExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

}  // namespace canard
