#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "canard/config.hpp"

namespace canard::cli {

/// Worker count from CANARD_LAB_THREADS (unset or 0 means automatic).
unsigned threads_from_env();

struct CompareRow {
    double eps = 0.0;
    double lambda_c = 0.0;
    int iterations = 0;
    double ks = 0.0;             ///< exits vs the limit exit measure
    double w1 = 0.0;
    double sup_gap = 0.0;        ///< max |S_eps - limit map| over the transition grid
    double funnel_spread = 0.0;  ///< std. deviation of exits from entries above the buffer point; NaN in the tunnel case
    std::size_t failures = 0;
};

/// Shooting, ensemble and distances for one eps.
CompareRow compare_at(const RunConfig& cfg, double eps, unsigned threads, int transition_grid = 20);

/// Entry point of the `canard-lab` binary. Exit codes: 0 success, 1 invalid
/// input or failed validation, 2 numeric failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace canard::cli
