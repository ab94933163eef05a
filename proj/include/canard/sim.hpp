#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "canard/measures.hpp"
#include "canard/model.hpp"

namespace canard {

struct SimConfig {
    double eps = 0.01;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double max_step = 1e-2;
    std::optional<double> max_time;  ///< fast-time budget; defaults to 100 / eps
    double x_sigma_minus = 0.0;      ///< entry section x = x_sigma_minus > 0
    double x_sigma_plus = 0.0;       ///< exit section x = x_sigma_plus < 0
    double min_eps = 1.0 / 400;      ///< below this double precision cannot resolve the canard window

    double time_budget() const;
};

/// Default section positions: the attracting branch point at height
/// min(1.5 s_c^-, (s_c^- + f(x_max)) / 2) and the repelling branch point at
/// min(1.2 s_c^+, (s_c^+ + f(x_min)) / 2).
std::pair<double, double> default_sections(const LienardSystem& system, double s_c_minus, double s_c_plus);

/// Checks tolerances, section placement and the eps floor.
void check_config(const LienardSystem& system, const SimConfig& cfg, bool enforce_min_eps = true);

enum class Outcome { crossed, escaped_right, escaped_down, budget_exhausted };
const char* to_string(Outcome o);

struct CrossingResult {
    Outcome outcome = Outcome::budget_exhausted;
    double s_plus = 0.0;  ///< y at the exit section (crossed only)
    double t = 0.0;       ///< time of the crossing or of the escape
    std::array<double, 2> state{};
    long steps = 0;
};

/// Integrates x' = y - f(x), y' = eps (lambda - p(x)) from `start` until the
/// orbit crosses x = x_sigma_plus with decreasing x, or escapes. Throws
/// StiffnessError when the step size collapses.
CrossingResult integrate_to_section(const LienardSystem& system, const SimConfig& cfg, double lambda,
                                    std::array<double, 2> start);

/// Orbit from (x_sigma_minus, s_minus).
CrossingResult transition_map(const LienardSystem& system, const SimConfig& cfg, double lambda, double s_minus);

struct ControlResult {
    double lambda_c = 0.0;
    int iterations = 0;
    double exit_height = 0.0;  ///< exit height of the last crossing orbit evaluated
    double bracket_width = 0.0;
};

/// Bisects lambda on the canard dichotomy: an orbit from s_c^- that crosses
/// the exit section below s_c^+ lies on the low side, any other outcome on the
/// high side. Stops when the exit height is within `height_tol` of s_c^+ or the
/// bracket is narrower than `width_tol`. Throws BracketError when both ends
/// fall on the same side.
ControlResult find_control_lambda(const LienardSystem& system, const SimConfig& cfg, double s_c_minus,
                                  double s_c_plus, std::pair<double, double> bracket, double height_tol = 1e-8,
                                  double width_tol = 1e-15);

/// [-2 eps, eps]: contains the control value of the Hopf-type systems at the
/// supported eps range.
std::pair<double, double> default_bracket(double eps);

struct EnsembleRun {
    double eps = 0.0;
    double lambda_c = 0.0;
    EmpiricalSample entry;
    std::vector<Outcome> outcomes;   ///< per entry sample
    std::vector<double> exit_height;  ///< per entry sample, NaN unless crossed
    std::size_t escaped_right = 0;
    std::size_t escaped_down = 0;
    std::size_t budget_exhausted = 0;

    std::size_t failures() const { return escaped_right + escaped_down + budget_exhausted; }
    /// Exit heights of the crossed orbits, in sample order.
    std::vector<double> exits() const;
    bool flagged() const { return failures() * 10 > entry.count(); }
};

/// Worker count: `requested` if positive, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Samples n entry heights and maps each through the transition map. Results
/// depend only on (entry, n, seed), not on the worker count.
EnsembleRun ensemble_transport(const LienardSystem& system, const SimConfig& cfg, double lambda_c,
                               const TransportMeasure& entry, std::size_t n, std::uint64_t seed,
                               unsigned threads = 0);

}  // namespace canard
