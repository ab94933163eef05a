#include "canard/relation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "canard/errors.hpp"
#include "canard/format.hpp"

namespace canard {

const char* to_string(Orientation o) { return o == Orientation::first ? "first" : "second"; }
const char* to_string(TransitCase c) { return c == TransitCase::tunnel ? "tunnel" : "funnel"; }

namespace {

// Root of F on the bracket spanned by x_neg (F < 0) and x_pos (F > 0), which
// need not be ordered. Newton steps with dF, falling back to bisection when a
// step leaves the bracket or does not halve the residual.
template <class F, class D>
double newton_bisect(F&& fn, D&& dfn, double x_neg, double x_pos) {
    double x = 0.5 * (x_neg + x_pos);
    double step_old = std::abs(x_pos - x_neg);
    double step = step_old;
    for (int i = 0; i < 400; ++i) {
        const double fx = fn(x);
        if (fx == 0.0) return x;
        (fx < 0.0 ? x_neg : x_pos) = x;
        const double lo = std::min(x_neg, x_pos), hi = std::max(x_neg, x_pos);
        const double d = dfn(x);
        double next = d != 0.0 ? x - fx / d : NAN;
        if (!(next > lo && next < hi) || std::abs(2.0 * fx) > std::abs(step_old * d)) {
            next = lo + 0.5 * (hi - lo);
            if (next <= lo || next >= hi) return std::abs(fn(lo)) <= std::abs(fn(hi)) ? lo : hi;
        }
        step_old = step;
        step = std::abs(next - x);
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next) || next == x) return next;
        x = next;
    }
    return x;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

double invert_plus(const SdiEvaluator& sdi, double target, double hi) {
    if (!(target >= 0.0)) throw RangeError("I_+ target must be nonnegative, got " + format_real(target));
    if (target == 0.0) return 0.0;
    const double top = sdi.plus(hi);
    if (target > top) {
        if (near(target, top, 1e-14)) return hi;
        throw RangeError("I_+ never reaches " + format_real(target) + " below height " + format_real(hi) +
                         " (maximum " + format_real(top) + ")");
    }
    if (target == top) return hi;
    // In the branch variable: I_+(f(x)) = -int_0^x h for x < 0.
    const double a = sdi.branch_root(hi, Branch::repelling);
    const double x = newton_bisect([&](double v) { return -sdi.integral_from_zero(v) - target; },
                                   [&](double v) { return -sdi.integrand(v); }, 0.0, a);
    return std::min(sdi.system().f_at(x), hi);
}

double invert_minus(const SdiEvaluator& sdi, double target, double hi) {
    if (!(target <= 0.0)) throw RangeError("I_- target must be nonpositive, got " + format_real(target));
    if (target == 0.0) return 0.0;
    const double bottom = sdi.minus(hi);
    if (target < bottom) {
        if (near(target, bottom, 1e-14)) return hi;
        throw RangeError("I_- never reaches " + format_real(target) + " below height " + format_real(hi) +
                         " (minimum " + format_real(bottom) + ")");
    }
    if (target == bottom) return hi;
    // I_-(f(x)) = int_0^x h for x > 0, decreasing in x.
    const double w = sdi.branch_root(hi, Branch::attracting);
    const double x = newton_bisect([&](double v) { return sdi.integral_from_zero(v) - target; },
                                   [&](double v) { return sdi.integrand(v); }, w, 0.0);
    return std::min(sdi.system().f_at(x), hi);
}

std::optional<double> buffer_point(const SdiEvaluator& sdi, double s_c_minus, double s_c_plus) {
    const double in = -sdi.minus(s_c_minus);
    const double out = sdi.plus(s_c_plus);
    if (in <= out) return std::nullopt;
    return invert_minus(sdi, -out, s_c_minus);
}

SlowRelation SlowRelation::single_section(std::shared_ptr<const SdiEvaluator> sdi, double s0) {
    if (!sdi) throw ValidationError("slow relation needs an evaluator");
    const double cap = std::min(sdi->max_height(Branch::attracting), sdi->max_height(Branch::repelling));
    if (!(s0 > 0.0) || s0 > cap)
        throw RangeError("section height s0 = " + format_real(s0) + " outside (0, " + format_real(cap) + "]");
    SlowRelation r;
    r.sdi_ = std::move(sdi);
    r.s0_ = s0;
    r.orientation_ = -r.sdi_->minus(s0) <= r.sdi_->plus(s0) ? Orientation::first : Orientation::second;
    return r;
}

SlowRelation SlowRelation::two_section(std::shared_ptr<const SdiEvaluator> sdi, double s_c_minus,
                                       double s_c_plus, Interval entry) {
    if (!sdi) throw ValidationError("slow relation needs an evaluator");
    const double top_minus = sdi->max_height(Branch::attracting);
    const double top_plus = sdi->max_height(Branch::repelling);
    if (!(s_c_minus > 0.0) || s_c_minus > top_minus)
        throw RangeError("s_c^- = " + format_real(s_c_minus) + " outside (0, " + format_real(top_minus) + "]");
    if (!(s_c_plus > 0.0) || s_c_plus > top_plus)
        throw RangeError("s_c^+ = " + format_real(s_c_plus) + " outside (0, " + format_real(top_plus) + "]");
    if (!(entry.lo > 0.0) || !(entry.lo < entry.hi) || entry.hi > s_c_minus)
        throw ValidationError("entry interval [" + format_real(entry.lo) + ", " + format_real(entry.hi) +
                              "] must satisfy 0 < lo < hi <= s_c^-");
    SlowRelation r;
    r.sdi_ = std::move(sdi);
    r.two_section_ = true;
    r.s_c_minus_ = s_c_minus;
    r.s_c_plus_ = s_c_plus;
    r.entry_ = entry;
    r.buffer_ = buffer_point(*r.sdi_, s_c_minus, s_c_plus);
    r.case_ = r.buffer_ ? TransitCase::funnel : TransitCase::tunnel;
    return r;
}

double SlowRelation::operator()(double s) const {
    if (two_section_) return two_section(s);
    if (!(s >= 0.0) || s > s0_) throw RangeError("s = " + format_real(s) + " outside [0, " + format_real(s0_) + "]");
    if (s == 0.0) return 0.0;
    if (orientation_ == Orientation::first) return invert_plus(*sdi_, -sdi_->minus(s), s0_);
    return invert_minus(*sdi_, -sdi_->plus(s), s0_);
}

double SlowRelation::two_section(double s_minus) const {
    const double top = sdi_->max_height(Branch::attracting);
    if (!(s_minus >= 0.0) || s_minus > top)
        throw RangeError("s^- = " + format_real(s_minus) + " outside [0, " + format_real(top) + "]");
    return invert_plus(*sdi_, -sdi_->minus(s_minus), sdi_->max_height(Branch::repelling));
}

double SlowRelation::max_entry_height() const {
    const double reach = sdi_->plus(sdi_->max_height(Branch::repelling));
    if (-sdi_->minus(entry_.hi) <= reach) return entry_.hi;
    return invert_minus(*sdi_, -reach, entry_.hi);
}

Interval SlowRelation::exit_interval() const {
    return {two_section(entry_.lo), two_section(std::max(entry_.lo, max_entry_height()))};
}

double SlowRelation::inverse(double s_plus) const {
    const Interval t = exit_interval();
    const double slack = 1e-12 * std::max(1.0, t.hi);
    if (!(s_plus >= t.lo - slack) || s_plus > t.hi + slack)
        throw RangeError("s^+ = " + format_real(s_plus) + " outside T = [" + format_real(t.lo) + ", " +
                         format_real(t.hi) + "]");
    return invert_minus(*sdi_, -sdi_->plus(s_plus), sdi_->max_height(Branch::attracting));
}

double SlowRelation::limit_map(double s_minus) const {
    if (buffer_ && s_minus >= *buffer_) return s_c_plus_;
    return two_section(s_minus);
}

std::string Multiplicity::to_string() const {
    return at_least ? ">=" + std::to_string(value) : std::to_string(value);
}

ZeroScan find_zeros(const SdiEvaluator& sdi, Interval range, const ZeroScanOptions& opt) {
    if (!(range.lo > 0.0) || !(range.lo < range.hi))
        throw ValidationError("zero scan needs 0 < a < b, got [" + format_real(range.lo) + ", " +
                              format_real(range.hi) + "]");
    const int n = std::max(opt.grid_points, 3);
    std::vector<double> s(n), v(n);
    for (int i = 0; i < n; ++i) {
        s[i] = i == n - 1 ? range.hi : range.lo + (range.hi - range.lo) * i / (n - 1);
        v[i] = sdi.total(s[i]);
    }
    ZeroScan scan;
    for (double x : v) scan.max_abs = std::max(scan.max_abs, std::abs(x));
    if (scan.max_abs < opt.identically_zero_tol) {
        scan.identically_zero = true;
        return scan;
    }

    auto classify = [&](double z) {
        const double d = sdi.derivative(z, Branch::attracting) + sdi.derivative(z, Branch::repelling);
        return std::abs(d) > opt.simple_derivative_tol ? Multiplicity{1, false} : Multiplicity{2, true};
    };

    for (int i = 0; i < n; ++i) {
        if (v[i] == 0.0) {
            scan.zeros.push_back({s[i], classify(s[i]), false});
            continue;
        }
        if (i + 1 < n && v[i + 1] != 0.0 && (v[i] < 0.0) != (v[i + 1] < 0.0)) {
            double lo = s[i], hi = s[i + 1];
            const bool rising = v[i] < 0.0;
            while (hi - lo > opt.refine_tol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double fm = sdi.total(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                ((fm < 0.0) == rising ? lo : hi) = mid;
            }
            const double z = 0.5 * (lo + hi);
            scan.zeros.push_back({z, classify(z), false});
            continue;
        }
        // Touching zero: a local minimum of |I| that stays tiny without a sign change.
        if (i > 0 && i + 1 < n && std::abs(v[i]) < opt.tangential_tol && std::abs(v[i]) <= std::abs(v[i - 1]) &&
            std::abs(v[i]) <= std::abs(v[i + 1]) && (v[i - 1] < 0.0) == (v[i] < 0.0) &&
            (v[i + 1] < 0.0) == (v[i] < 0.0)) {
            scan.zeros.push_back({s[i], Multiplicity{2, true}, true});
        }
    }
    return scan;
}

MeasureClass classify_invariant_measures(const SdiEvaluator& sdi, Interval range, const ZeroScanOptions& opt) {
    const ZeroScan scan = find_zeros(sdi, range, opt);
    MeasureClass mc;
    mc.every_measure_invariant = scan.identically_zero;
    mc.atoms.push_back(0.0);
    for (const auto& z : scan.zeros) {
        mc.atoms.push_back(z.s);
        mc.multiplicities.push_back(z.multiplicity);
        mc.tangential.push_back(z.tangential_candidate);
    }
    mc.uniquely_ergodic = !scan.identically_zero && scan.zeros.empty();
    return mc;
}

std::string MeasureClass::to_text() const {
    std::ostringstream os;
    if (every_measure_invariant) {
        os << "slow divergence integral vanishes identically: S is the identity\n"
           << "every Borel probability measure on [0, s0] is invariant\n";
        return os.str();
    }
    os << "invariant probability measures: convex hull of";
    for (std::size_t i = 0; i < atoms.size(); ++i) os << (i ? ", " : " ") << "delta_" << format_real(atoms[i]);
    os << '\n';
    os << "zeros of I: " << zero_count() << '\n';
    for (std::size_t i = 0; i < multiplicities.size(); ++i) {
        os << "  s_" << i + 1 << " = " << format_real(atoms[i + 1]) << "  multiplicity " << multiplicities[i].to_string()
           << (tangential[i] ? "  (tangential candidate)" : "") << '\n';
    }
    os << "uniquely ergodic: " << (uniquely_ergodic ? "yes" : "no") << '\n';
    return os.str();
}

CyclicityReport cyclicity_report(const SdiEvaluator& sdi, const MeasureClass& mc, double s) {
    CyclicityReport rep;
    rep.s = s;
    const auto orders = sdi.system().orders();
    const bool hopf = orders.n == 2 && orders.m == 1;
    rep.regime = hopf ? "slow-fast Hopf point (n, m) = (2, 1)"
                      : "turning point (n, m) = (" + std::to_string(orders.n) + ", " + std::to_string(orders.m) + ")";
    if (mc.every_measure_invariant) {
        rep.sdi_value = 0.0;
        rep.stability = "undetermined";
        rep.note = "I vanishes identically: no finite cyclicity bound follows";
        return rep;
    }
    rep.sdi_value = sdi.total(s);
    for (std::size_t i = 0; i < mc.multiplicities.size(); ++i) {
        if (std::abs(mc.atoms[i + 1] - s) <= 1e-9 * std::max(1.0, s)) {
            rep.s = mc.atoms[i + 1];
            rep.stability = "undetermined";
            if (!mc.multiplicities[i].at_least) {
                rep.bound = 2;
                rep.note = "simple zero of I: at most two limit cycles bifurcate from this canard cycle";
            } else {
                rep.note = "zero of I of multiplicity >= 2: cyclicity at least 3, no sharper bound determined";
            }
            break;
        }
    }
    if (rep.stability.empty()) {
        rep.bound = 1;
        rep.stability = rep.sdi_value < 0.0 ? "attracting" : "repelling";
        rep.note = "I(s) != 0: at most one limit cycle, hyperbolic and " + rep.stability;
    }
    if (!hopf) {
        bool all_simple = true;
        for (const auto& m : mc.multiplicities) all_simple = all_simple && !m.at_least;
        if (all_simple && !mc.multiplicities.empty()) {
            rep.note += "; with " + std::to_string(mc.zero_count()) +
                        " simple zeros a control curve exists along which " + std::to_string(mc.zero_count() + 1) +
                        " hyperbolic limit cycles coexist";
        }
    }
    return rep;
}

std::string CyclicityReport::to_text() const {
    std::ostringstream os;
    os << "regime: " << regime << '\n'
       << "s = " << format_real(s) << "  I(s) = " << format_real(sdi_value) << '\n'
       << "cyclicity bound: " << (bound ? std::to_string(*bound) : std::string("none")) << '\n'
       << "stability: " << stability << '\n'
       << note << '\n';
    return os.str();
}

OrbitResult iterate_orbit(const SlowRelation& relation, double s, int max_iter, double tol) {
    OrbitResult out;
    out.trajectory.push_back(s);
    double cur = s;
    int direction = 0;
    for (int k = 0; k < max_iter; ++k) {
        const double next = relation(cur);
        out.trajectory.push_back(next);
        out.steps = k + 1;
        const int dir = next > cur ? 1 : (next < cur ? -1 : 0);
        if (dir != 0) {
            if (direction != 0 && dir != direction) out.monotone = false;
            direction = dir;
        }
        const double delta = std::abs(next - cur);
        cur = next;
        if (delta < tol) {
            out.converged = true;
            out.limit = cur;
            return out;
        }
    }
    out.limit = cur;
    out.diagnostic = "no convergence after " + std::to_string(max_iter) + " iterations; last iterate " +
                     format_real(cur);
    return out;
}

}  // namespace canard
