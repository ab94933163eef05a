#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "canard/sdi.hpp"

namespace canard {

/// Which defining identity the single-section relation uses.
/// `first`:  I_-(s) + I_+(S(s)) = 0   (chosen when -I_-(s0) <= I_+(s0))
/// `second`: I_-(S(s)) + I_+(s) = 0
enum class Orientation { first, second };

/// tunnel: -I_-(s_c^-) <= I_+(s_c^+); funnel otherwise (a buffer point exists).
enum class TransitCase { tunnel, funnel };

const char* to_string(Orientation o);
const char* to_string(TransitCase c);

/// Smallest s in [0, hi] with I_+(s) = target (target >= 0), by bisection to
/// adjacent doubles. Throws RangeError if target > I_+(hi).
double invert_plus(const SdiEvaluator& sdi, double target, double hi);
/// Same for I_-(s) = target (target <= 0).
double invert_minus(const SdiEvaluator& sdi, double target, double hi);

/// Buffer point: the root of I_-(s) + I_+(s_c^+) = 0 on (0, s_c^-), present
/// only in the funnel case.
std::optional<double> buffer_point(const SdiEvaluator& sdi, double s_c_minus, double s_c_plus);

/// Slow relation (entry-exit) function of a Liénard system.
///
/// Single-section mode solves S on [0, s0]. Two-section mode solves
/// S0 : L -> T between an entry height scale and an exit height scale,
/// together with the buffer point and the limit map of the funnel regime.
class SlowRelation {
public:
    static SlowRelation single_section(std::shared_ptr<const SdiEvaluator> sdi, double s0);
    static SlowRelation two_section(std::shared_ptr<const SdiEvaluator> sdi, double s_c_minus, double s_c_plus,
                                    Interval entry);

    const SdiEvaluator& sdi() const { return *sdi_; }
    std::shared_ptr<const SdiEvaluator> sdi_ptr() const { return sdi_; }
    bool is_two_section() const { return two_section_; }

    // --- single-section ---
    double s0() const { return s0_; }
    Orientation orientation() const { return orientation_; }
    /// S(s) for s in [0, s0]; S(0) = 0.
    double operator()(double s) const;
    /// +1 when sign(I(s)) = sign(s - S(s)), -1 when the mirrored law holds.
    int sign_law() const { return orientation_ == Orientation::first ? 1 : -1; }

    // --- two-section ---
    double s_c_minus() const { return s_c_minus_; }
    double s_c_plus() const { return s_c_plus_; }
    const Interval& entry_interval() const { return entry_; }
    TransitCase transit_case() const { return case_; }
    std::optional<double> buffer() const { return buffer_; }

    /// S0(s^-), defined wherever the required repelling height exists.
    double two_section(double s_minus) const;
    /// S0^{-1}(s^+) for s^+ in T = S0(L).
    double inverse(double s_plus) const;
    /// S0 below the buffer point, the constant s_c^+ from it on (funnel case);
    /// S0 itself in the tunnel case.
    double limit_map(double s_minus) const;
    /// T = S0(L), clipped to the part of L where S0 is defined.
    Interval exit_interval() const;
    /// Largest entry height whose S0 image still lies on the repelling branch.
    double max_entry_height() const;

private:
    SlowRelation() = default;

    std::shared_ptr<const SdiEvaluator> sdi_;
    bool two_section_ = false;
    double s0_ = 0.0;
    Orientation orientation_ = Orientation::first;
    double s_c_minus_ = 0.0;
    double s_c_plus_ = 0.0;
    Interval entry_;
    TransitCase case_ = TransitCase::tunnel;
    std::optional<double> buffer_;
};

/// Multiplicity estimate of a zero of I: exactly 1, or "at least 2".
struct Multiplicity {
    int value = 1;
    bool at_least = false;
    std::string to_string() const;
};

struct DetectedZero {
    double s = 0.0;
    Multiplicity multiplicity;
    bool tangential_candidate = false;
};

struct ZeroScan {
    bool identically_zero = false;
    double max_abs = 0.0;
    std::vector<DetectedZero> zeros;
};

struct ZeroScanOptions {
    int grid_points = 2000;
    double refine_tol = 1e-12;
    double simple_derivative_tol = 1e-8;
    double identically_zero_tol = 1e-12;
    double tangential_tol = 1e-10;
};

/// Zeros of I = I_- + I_+ on [a, b] (a > 0): sign changes on a uniform grid,
/// refined by bisection, plus tangential candidates.
ZeroScan find_zeros(const SdiEvaluator& sdi, Interval range, const ZeroScanOptions& options = {});

/// Invariant probability measures of the slow relation on [0, s0]: the convex
/// hull of Dirac masses at 0 and at each fixed point (zero of I).
struct MeasureClass {
    bool every_measure_invariant = false;  ///< I vanishes identically (S is the identity)
    std::vector<double> atoms;             ///< [0, s_1, ..., s_k]
    std::vector<Multiplicity> multiplicities;  ///< one per nonzero atom
    std::vector<bool> tangential;
    bool uniquely_ergodic = false;

    std::size_t zero_count() const { return atoms.empty() ? 0 : atoms.size() - 1; }
    std::string to_text() const;
};

MeasureClass classify_invariant_measures(const SdiEvaluator& sdi, Interval range, const ZeroScanOptions& options = {});

struct CyclicityReport {
    double s = 0.0;
    double sdi_value = 0.0;
    std::optional<int> bound;  ///< empty when no finite bound follows
    std::string stability;     ///< attracting / repelling / undetermined
    std::string regime;
    std::string note;
    std::string to_text() const;
};

CyclicityReport cyclicity_report(const SdiEvaluator& sdi, const MeasureClass& measures, double s);

struct OrbitResult {
    double limit = 0.0;
    int steps = 0;
    bool converged = false;
    bool monotone = true;
    std::vector<double> trajectory;  ///< s, S(s), S^2(s), ...
    std::string diagnostic;
};

/// Iterates S from s until successive iterates differ by less than `tol`.
OrbitResult iterate_orbit(const SlowRelation& relation, double s, int max_iter = 100000, double tol = 1e-12);

}  // namespace canard
