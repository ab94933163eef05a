#include "canard/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include <boost/numeric/odeint.hpp>

#include "canard/errors.hpp"
#include "canard/format.hpp"
#include "canard/sdi.hpp"

namespace canard {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

double SimConfig::time_budget() const {
    if (max_time) return *max_time;
    if (!(eps > 0.0)) throw ValidationError("a time budget is required when eps = 0");
    return 100.0 / eps;
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::crossed: return "crossed";
        case Outcome::escaped_right: return "escaped_right";
        case Outcome::escaped_down: return "escaped_down";
        case Outcome::budget_exhausted: return "budget_exhausted";
    }
    return "unknown";
}

std::pair<double, double> default_sections(const LienardSystem& system, double s_c_minus, double s_c_plus) {
    const SdiEvaluator sdi(system);
    const double top_minus = sdi.max_height(Branch::attracting);
    const double top_plus = sdi.max_height(Branch::repelling);
    if (!(s_c_minus > 0.0 && s_c_minus < top_minus))
        throw RangeError("s_c^- = " + format_real(s_c_minus) + " leaves no room for the entry section");
    if (!(s_c_plus > 0.0 && s_c_plus < top_plus))
        throw RangeError("s_c^+ = " + format_real(s_c_plus) + " leaves no room for the exit section");
    const double h_minus = std::min(1.5 * s_c_minus, 0.5 * (s_c_minus + top_minus));
    const double h_plus = std::min(1.2 * s_c_plus, 0.5 * (s_c_plus + top_plus));
    return {sdi.branch_root(h_minus, Branch::attracting), sdi.branch_root(h_plus, Branch::repelling)};
}

void check_config(const LienardSystem& system, const SimConfig& cfg, bool enforce_min_eps) {
    if (!(cfg.eps >= 0.0)) throw ValidationError("eps must be nonnegative");
    if (enforce_min_eps && cfg.eps < cfg.min_eps)
        throw ValidationError("eps = " + format_real(cfg.eps) + " is below the supported floor " +
                              format_real(cfg.min_eps) + "; the canard window is not resolvable in double precision");
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0)) throw ValidationError("integrator tolerances must be positive");
    if (!(cfg.max_step > 0.0)) throw ValidationError("max_step must be positive");
    if (cfg.max_time && !(*cfg.max_time > 0.0)) throw ValidationError("max_time must be positive");
    const Interval d = system.domain();
    if (!(cfg.x_sigma_minus > 0.0 && cfg.x_sigma_minus <= d.hi))
        throw ValidationError("entry section x = " + format_real(cfg.x_sigma_minus) + " must lie in (0, x_max]");
    if (!(cfg.x_sigma_plus < 0.0 && cfg.x_sigma_plus >= d.lo))
        throw ValidationError("exit section x = " + format_real(cfg.x_sigma_plus) + " must lie in [x_min, 0)");
}

CrossingResult integrate_to_section(const LienardSystem& system, const SimConfig& cfg, double lambda,
                                    State start) {
    check_config(system, cfg, false);
    const double budget = cfg.time_budget();
    const double xs = cfg.x_sigma_plus;
    const double x_right = system.domain().hi;
    const double y_floor = -std::max(system.attracting_height(), system.repelling_height());
    const double eps = cfg.eps;

    auto rhs = [&](const State& u, State& du, double) {
        du[0] = u[1] - system.f_at(u[0]);
        du[1] = eps * (lambda - system.p_at(u[0]));
    };
    auto stepper = odeint::make_dense_output(cfg.abs_tol, cfg.rel_tol, cfg.max_step, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(start, 0.0, std::min(cfg.max_step, 1e-3));

    CrossingResult res;
    State prev = start;
    bool visited_left = start[0] < 0.0;
    for (;;) {
        std::pair<double, double> span;
        try {
            span = stepper.do_step(rhs);
        } catch (const odeint::odeint_error& e) {
            throw StiffnessError(std::string("integrator failed: ") + e.what(), stepper.current_time(),
                                 stepper.current_state());
        }
        ++res.steps;
        const State cur = stepper.current_state();
        if (!std::isfinite(cur[0]) || !std::isfinite(cur[1]))
            throw StiffnessError("non-finite state", span.second, prev);
        if (!(span.second - span.first > 1e-14 * std::max(1.0, std::abs(span.second))))
            throw StiffnessError("step size underflow", span.second, cur);

        if (prev[0] > xs && cur[0] <= xs) {
            double lo = span.first, hi = span.second;
            State mid_state = cur;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                stepper.calc_state(mid, mid_state);
                (mid_state[0] > xs ? lo : hi) = mid;
            }
            stepper.calc_state(hi, mid_state);
            res.outcome = Outcome::crossed;
            res.t = hi;
            res.state = mid_state;
            res.s_plus = mid_state[1];
            return res;
        }
        if ((visited_left && prev[0] < 0.0 && cur[0] >= 0.0) || cur[0] > x_right) {
            res.outcome = Outcome::escaped_right;
            res.t = span.second;
            res.state = cur;
            return res;
        }
        if (cur[1] < y_floor) {
            res.outcome = Outcome::escaped_down;
            res.t = span.second;
            res.state = cur;
            return res;
        }
        if (span.second >= budget) {
            res.outcome = Outcome::budget_exhausted;
            res.t = span.second;
            res.state = cur;
            return res;
        }
        visited_left = visited_left || cur[0] < 0.0;
        prev = cur;
    }
}

CrossingResult transition_map(const LienardSystem& system, const SimConfig& cfg, double lambda, double s_minus) {
    return integrate_to_section(system, cfg, lambda, {cfg.x_sigma_minus, s_minus});
}

std::pair<double, double> default_bracket(double eps) { return {-2.0 * eps, eps}; }

ControlResult find_control_lambda(const LienardSystem& system, const SimConfig& cfg, double s_c_minus,
                                  double s_c_plus, std::pair<double, double> bracket, double height_tol,
                                  double width_tol) {
    check_config(system, cfg, true);
    auto [lo, hi] = bracket;
    if (!(lo < hi)) throw BracketError("lambda bracket must satisfy lo < hi");
    ControlResult out;
    auto low_side = [&](double lambda) {
        const auto r = transition_map(system, cfg, lambda, s_c_minus);
        ++out.iterations;
        if (r.outcome == Outcome::crossed) out.exit_height = r.s_plus;
        return r.outcome == Outcome::crossed && r.s_plus < s_c_plus ? std::optional<double>(r.s_plus)
                                                                     : std::nullopt;
    };
    const bool lo_low = low_side(lo).has_value();
    const bool hi_low = low_side(hi).has_value();
    if (!lo_low || hi_low)
        throw BracketError("lambda bracket [" + format_real(lo) + ", " + format_real(hi) +
                           "] does not straddle the control value (low end " + (lo_low ? "below" : "above") +
                           ", high end " + (hi_low ? "below" : "above") + ")");
    for (;;) {
        const double mid = lo + 0.5 * (hi - lo);
        if (hi - lo <= width_tol || mid <= lo || mid >= hi) break;
        const auto r = transition_map(system, cfg, mid, s_c_minus);
        ++out.iterations;
        if (r.outcome == Outcome::crossed) {
            out.exit_height = r.s_plus;
            if (std::abs(r.s_plus - s_c_plus) <= height_tol) {
                lo = hi = mid;
                break;
            }
        }
        const bool below = r.outcome == Outcome::crossed && r.s_plus < s_c_plus;
        (below ? lo : hi) = mid;
    }
    out.lambda_c = lo + 0.5 * (hi - lo);
    out.bracket_width = hi - lo;
    return out;
}

std::vector<double> EnsembleRun::exits() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        if (outcomes[i] == Outcome::crossed) out.push_back(exit_height[i]);
    return out;
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

EnsembleRun ensemble_transport(const LienardSystem& system, const SimConfig& cfg, double lambda_c,
                               const TransportMeasure& entry, std::size_t n, std::uint64_t seed, unsigned threads) {
    check_config(system, cfg, true);
    EnsembleRun run;
    run.eps = cfg.eps;
    run.lambda_c = lambda_c;
    run.entry = sample(entry, n, seed);
    run.outcomes.assign(n, Outcome::budget_exhausted);
    run.exit_height.assign(n, std::nan(""));
    std::vector<std::exception_ptr> errors(n);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                const auto r = transition_map(system, cfg, lambda_c, run.entry.values[i]);
                run.outcomes[i] = r.outcome;
                if (r.outcome == Outcome::crossed) run.exit_height[i] = r.s_plus;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::min<std::size_t>(resolve_threads(threads), n);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (auto o : run.outcomes) {
        if (o == Outcome::escaped_right) ++run.escaped_right;
        if (o == Outcome::escaped_down) ++run.escaped_down;
        if (o == Outcome::budget_exhausted) ++run.budget_exhausted;
    }
    return run;
}

}  // namespace canard
