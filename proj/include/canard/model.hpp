#pragma once

#include <optional>
#include <string>
#include <vector>

#include "canard/expr.hpp"

namespace canard {

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Vanishing orders at the origin of the critical curve f and of p.
struct ContactOrders {
    int n = 0;  ///< contact order (order of f at 0)
    int m = 0;  ///< singularity order (order of p at 0)
    bool n_finite = true;
    bool m_finite = true;
};

/// Highest derivative order probed by detect_orders.
inline constexpr int kMaxOrder = 12;

/// Order of the zero of `e` at x = 0 (smallest k with e^(k)(0) != 0), or
/// nullopt when no nonzero derivative is found up to kMaxOrder. Derivatives
/// are symbolic; if a derivative cannot be evaluated at 0 the order is
/// estimated from the scaling of |e(h)| as h decreases.
std::optional<int> order_at_zero(const RealExpr& e);

ContactOrders detect_orders(const RealExpr& f, const RealExpr& p);

/// Planar slow-fast Liénard system
///
///   x' = y - f(x),   y' = eps * (lambda - p(x)).
///
/// Attracting branch of the critical curve y = f(x) is x > 0, repelling branch
/// is x < 0, contact point at the origin.
class LienardSystem {
public:
    LienardSystem(RealExpr f, RealExpr p, Interval domain);
    static LienardSystem from_text(const std::string& f, const std::string& p, double x_min, double x_max);

    const RealExpr& f() const { return f_; }
    const RealExpr& p() const { return p_; }
    const RealExpr& df() const { return df_; }
    const Interval& domain() const { return domain_; }
    const ContactOrders& orders() const { return orders_; }

    double f_at(double x) const { return f_(x); }
    double df_at(double x) const { return df_(x); }
    double p_at(double x) const { return p_(x); }
    /// g(x, lambda_0, 0) = -p(x).
    double g_at(double x) const { return -p_(x); }

    /// Top of the attracting / repelling branch heights, f(x_max) and f(x_min).
    double attracting_height() const { return f_(domain_.hi); }
    double repelling_height() const { return f_(domain_.lo); }

private:
    RealExpr f_;
    RealExpr p_;
    RealExpr df_;
    Interval domain_;
    ContactOrders orders_;
};

struct AssumptionCheck {
    std::string name;
    bool pass = false;
    std::optional<double> witness;  ///< x where the check failed, when pointwise
    std::string detail;
};

struct AssumptionReport {
    int n = 0;
    int m = 0;
    std::vector<AssumptionCheck> checks;

    bool all_pass() const;
    std::string to_text() const;
};

/// Grid-based check of the standing assumptions on `system`.
/// `grid_points` sample points are used on each side of the origin.
AssumptionReport validate(const LienardSystem& system, int grid_points = 512);

}  // namespace canard
