#include "canard/model.hpp"

#include <cmath>
#include <sstream>

#include "canard/errors.hpp"
#include "canard/format.hpp"

namespace canard {

namespace {

constexpr double kDerivativeZeroTol = 1e-10;

std::optional<double> try_eval(const RealExpr& e, double x) {
    try {
        const double v = e(x);
        if (std::isfinite(v)) return v;
    } catch (const SingularityError&) {
    }
    return std::nullopt;
}

// |e(h)| ~ c h^k for small h; read k off successive halvings.
std::optional<int> numeric_order(const RealExpr& e) {
    std::optional<int> last;
    int agreeing = 0;
    for (double h = 1e-1; h >= 1e-5; h *= 0.5) {
        const auto a = try_eval(e, h);
        const auto b = try_eval(e, 2.0 * h);
        if (!a || !b || *a == 0.0 || *b == 0.0) continue;
        const double k = std::log2(std::fabs(*b / *a));
        const int rounded = static_cast<int>(std::lround(k));
        if (std::fabs(k - rounded) < 0.05 && rounded >= 0) {
            agreeing = (last && *last == rounded) ? agreeing + 1 : 1;
            last = rounded;
            if (agreeing >= 3) return rounded <= kMaxOrder ? std::optional<int>(rounded) : std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<int> order_at_zero(const RealExpr& e) {
    RealExpr d = e;
    for (int k = 0; k <= kMaxOrder; ++k) {
        const auto v = try_eval(d, 0.0);
        if (!v) return numeric_order(e);
        if (std::fabs(*v) > kDerivativeZeroTol) return k;
        if (d.is_constant()) return std::nullopt;  // identically zero from here on
        d = d.derivative();
    }
    return std::nullopt;
}

ContactOrders detect_orders(const RealExpr& f, const RealExpr& p) {
    ContactOrders o;
    const auto n = order_at_zero(f);
    const auto m = order_at_zero(p);
    o.n_finite = n.has_value();
    o.m_finite = m.has_value();
    o.n = n.value_or(kMaxOrder);
    o.m = m.value_or(kMaxOrder);
    return o;
}

LienardSystem::LienardSystem(RealExpr f, RealExpr p, Interval domain)
    : f_(std::move(f)), p_(std::move(p)), df_(f_.derivative()), domain_(domain), orders_(detect_orders(f_, p_)) {}

LienardSystem LienardSystem::from_text(const std::string& f, const std::string& p, double x_min, double x_max) {
    return LienardSystem(RealExpr::parse(f), RealExpr::parse(p), Interval{x_min, x_max});
}

bool AssumptionReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string AssumptionReport::to_text() const {
    std::ostringstream os;
    os << "contact_order n = " << n << "\n";
    os << "singularity_order m = " << m << "\n";
    for (const auto& c : checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name;
        if (c.witness) os << " (witness x = " << format_real(*c.witness) << ")";
        if (!c.detail.empty()) os << " [" << c.detail << "]";
        os << "\n";
    }
    os << "accepted = " << (all_pass() ? "true" : "false") << "\n";
    return os.str();
}

AssumptionReport validate(const LienardSystem& system, int grid_points) {
    AssumptionReport report;
    const auto& orders = system.orders();
    report.n = orders.n;
    report.m = orders.m;
    const Interval dom = system.domain();
    auto add = [&](std::string name, bool pass, std::optional<double> witness = std::nullopt, std::string detail = {}) {
        report.checks.push_back({std::move(name), pass, witness, std::move(detail)});
    };

    const bool has_origin = dom.lo < 0.0 && 0.0 < dom.hi;
    add("domain contains 0 in its interior", has_origin, std::nullopt,
        "[" + format_real(dom.lo) + ", " + format_real(dom.hi) + "]");

    const auto f0 = try_eval(system.f(), 0.0);
    add("f(0) = 0", f0 && std::fabs(*f0) <= 1e-12, 0.0);
    const auto df0 = try_eval(system.df(), 0.0);
    add("f'(0) = 0", df0 && std::fabs(*df0) <= 1e-12, 0.0);

    // Pointwise sign checks on a uniform grid per side, endpoints included.
    auto scan = [&](const RealExpr& e, double end, double sign) -> std::optional<double> {
        for (int i = 1; i <= grid_points; ++i) {
            const double x = end * static_cast<double>(i) / grid_points;
            const auto v = try_eval(e, x);
            if (!v || !(sign * *v > 0.0)) return x;
        }
        return std::nullopt;
    };
    if (has_origin) {
        const auto w1 = scan(system.df(), dom.hi, 1.0);
        add("f' > 0 on (0, x_max] (attracting branch)", !w1, w1);
        const auto w2 = scan(system.df(), dom.lo, -1.0);
        add("f' < 0 on [x_min, 0) (repelling branch)", !w2, w2);
        const auto w3 = scan(system.p(), dom.hi, 1.0);
        const auto w4 = scan(system.p(), dom.lo, -1.0);
        add("p(x) has the sign of x (slow flow from attracting to repelling branch)", !w3 && !w4, w3 ? w3 : w4);
    }

    add("contact order n finite (<= 12)", orders.n_finite, std::nullopt, orders.n_finite ? "" : "order >= 12");
    add("contact order n even and >= 2", orders.n_finite && orders.n >= 2 && orders.n % 2 == 0);
    add("singularity order m finite (<= 12)", orders.m_finite, std::nullopt, orders.m_finite ? "" : "order >= 12");
    add("singularity order m odd", orders.m_finite && orders.m % 2 == 1);
    add("m < 2(n - 1)", orders.n_finite && orders.m_finite && orders.m < 2 * (orders.n - 1));
    return report;
}

}  // namespace canard
