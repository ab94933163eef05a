#include "canard/sdi.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "canard/errors.hpp"
#include "canard/format.hpp"

namespace canard {

namespace {

// 2^20 leaf intervals ~ 10^6 subdivisions.
constexpr unsigned kMaxQuadratureDepth = 20;

}  // namespace

SdiEvaluator::SdiEvaluator(LienardSystem system, QuadratureTolerance tol) : system_(std::move(system)), tol_(tol) {
    const auto report = validate(system_);
    if (!report.all_pass()) throw ValidationError("system fails standing assumptions:\n" + report.to_text());
}

SdiEvaluator::SdiEvaluator(const SdiEvaluator& other) : system_(other.system_), tol_(other.tol_) {
    std::lock_guard lock(other.mutex_);
    cache_minus_ = other.cache_minus_;
    cache_plus_ = other.cache_plus_;
}

double SdiEvaluator::max_height(Branch side) const {
    return side == Branch::attracting ? system_.attracting_height() : system_.repelling_height();
}

void SdiEvaluator::check_height(double s, Branch side) const {
    if (!(s >= 0.0) || s > max_height(side))
        throw RangeError("height " + format_real(s) + " outside the " +
                         (side == Branch::attracting ? std::string("attracting") : std::string("repelling")) +
                         " branch range [0, " + format_real(max_height(side)) + "]");
}

double SdiEvaluator::branch_root(double s, Branch side) const {
    check_height(s, side);
    if (s == 0.0) return 0.0;
    // f - s is increasing on [0, x_max] and decreasing on [x_min, 0].
    double lo = side == Branch::attracting ? 0.0 : system_.domain().lo;
    double hi = side == Branch::attracting ? system_.domain().hi : 0.0;
    const double dir = side == Branch::attracting ? 1.0 : -1.0;
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (dir * (system_.f_at(mid) - s) < 0.0) lo = mid;
        else hi = mid;
    }
    return std::fabs(system_.f_at(lo) - s) <= std::fabs(system_.f_at(hi) - s) ? lo : hi;
}

double SdiEvaluator::integrand(double x) const {
    if (x == 0.0) return 0.0;
    const double g = system_.g_at(x);
    if (g == 0.0) throw SingularityError("g(x) = 0 at x = " + format_real(x) + " away from the contact point");
    const double d = system_.df_at(x);
    return d * d / g;
}

double SdiEvaluator::integral_from_zero(double x) const {
    if (x == 0.0) return 0.0;
    auto h = [this](double t) { return integrand(t); };
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        h, 0.0, x, kMaxQuadratureDepth, tol_.rel_tol, &error, &l1);
    if (!(error <= std::max(tol_.abs_tol, tol_.rel_tol * std::fabs(value))))
        throw NumericError("quadrature did not converge on [0, " + format_real(x) + "]: error estimate " +
                           format_real(error));
    return value;
}

double SdiEvaluator::cached(double s, Branch side) const {
    auto& cache = side == Branch::attracting ? cache_minus_ : cache_plus_;
    const auto key = std::bit_cast<std::uint64_t>(s);
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    // I_- = -int_{omega}^{0} h = int_0^{omega} h;  I_+ = -int_0^{alpha} h.
    const double x = branch_root(s, side);
    const double value = side == Branch::attracting ? integral_from_zero(x) : -integral_from_zero(x);
    std::lock_guard lock(mutex_);
    if (cache.size() >= kCacheLimit) cache.clear();
    cache.emplace(key, value);
    return value;
}

double SdiEvaluator::minus(double s) const {
    check_height(s, Branch::attracting);
    return s == 0.0 ? 0.0 : cached(s, Branch::attracting);
}

double SdiEvaluator::plus(double s) const {
    check_height(s, Branch::repelling);
    return s == 0.0 ? 0.0 : cached(s, Branch::repelling);
}

double SdiEvaluator::derivative(double s, Branch side) const {
    if (!(s > 0.0)) throw RangeError("derivative requires s > 0");
    const double x = branch_root(s, side);
    const double ratio = system_.df_at(x) / system_.g_at(x);
    return side == Branch::attracting ? ratio : -ratio;
}

}  // namespace canard
