#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "canard/model.hpp"

namespace canard {

enum class Branch { attracting, repelling };

struct QuadratureTolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
};

/// Slow divergence integrals of a Liénard system along its two branches.
///
/// For a height s > 0, omega(s) > 0 and alpha(s) < 0 are the points of the
/// attracting / repelling branch with f = s, and
///
///   I_-(s) = -int_{omega(s)}^{0} f'(x)^2 / g(x) dx  < 0,
///   I_+(s) = -int_{0}^{alpha(s)} f'(x)^2 / g(x) dx  > 0,   g = -p.
///
/// Quadrature results are memoized per evaluator keyed by the exact value of s.
/// Concurrent calls are safe and return the same values as sequential calls.
class SdiEvaluator {
public:
    /// Throws ValidationError if `system` does not pass validate().
    explicit SdiEvaluator(LienardSystem system, QuadratureTolerance tol = {});

    SdiEvaluator(const SdiEvaluator& other);
    SdiEvaluator& operator=(const SdiEvaluator&) = delete;

    const LienardSystem& system() const { return system_; }
    const QuadratureTolerance& tolerance() const { return tol_; }

    /// Largest admissible height on a branch: f(x_max) or f(x_min).
    double max_height(Branch side) const;

    /// Unique x on the branch with f(x) = s, by bisection. s = 0 gives 0.
    double branch_root(double s, Branch side) const;

    /// (f'(x))^2 / g(x), continuously extended by 0 at the contact point.
    double integrand(double x) const;

    double minus(double s) const;
    double plus(double s) const;
    double total(double s) const { return minus(s) + plus(s); }

    /// Closed-form derivative: I_-'(s) = f'(omega)/g(omega), I_+'(s) = -f'(alpha)/g(alpha).
    double derivative(double s, Branch side) const;

    /// Same integrals as minus/plus, bypassing the cache and root finding:
    /// int_0^{x} of the integrand (x > 0 gives I_- at s = f(x)).
    double integral_from_zero(double x) const;

private:
    double cached(double s, Branch side) const;
    void check_height(double s, Branch side) const;

    static constexpr std::size_t kCacheLimit = 1 << 20;

    LienardSystem system_;
    QuadratureTolerance tol_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::uint64_t, double> cache_minus_;
    mutable std::unordered_map<std::uint64_t, double> cache_plus_;
};

}  // namespace canard
