#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "canard/measures.hpp"
#include "canard/sim.hpp"

namespace canard {

/// Flat `block.key = value` configuration shared by all subcommands.
///
///   system.f = x^2/2 + x^3/3      # expression in x
///   sections.s_c_minus = 1/20     # numeric values accept constant expressions
///   entry.kind = uniform
///
/// Unknown keys, repeated keys and malformed lines are rejected with the line
/// number attached.
struct RunConfig {
    // system
    std::string f;
    std::string p;
    std::optional<double> x_min;
    std::optional<double> x_max;

    // sections
    std::optional<double> s_c_minus;
    std::optional<double> s_c_plus;
    std::optional<double> x_sigma_minus;
    std::optional<double> x_sigma_plus;
    std::optional<double> entry_lo;  ///< L
    std::optional<double> entry_hi;
    std::optional<double> s0;        ///< single-section height

    // entry
    EntryKind entry_kind = EntryKind::uniform;
    std::optional<double> entry_support_lo;
    std::optional<double> entry_support_hi;
    std::optional<double> cauchy_location;
    std::optional<double> cauchy_scale;
    std::vector<double> entry_table;

    // sim
    std::optional<double> eps;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double max_step = 1e-2;
    std::optional<double> max_time;
    double min_eps = 1.0 / 400;
    std::optional<double> lambda_lo;
    std::optional<double> lambda_hi;
    std::size_t samples = 500;
    std::uint64_t seed = 1;
    int bins = 10;
    int grid = kDefaultGridNodes;

    // scan
    std::optional<double> scan_lo;
    std::optional<double> scan_hi;
    int scan_points = 2000;
    int csv_points = 201;

    std::string output_dir = ".";

    LienardSystem system() const;
    double s_c_minus_value() const;
    double s_c_plus_value() const;
    Interval entry_interval() const;
    /// Single-section height: `sections.s0`, else the largest height both branches reach.
    double s0_value(const SdiEvaluator& sdi) const;
    /// Zero-scan range: `scan.lo`/`scan.hi`, else [s0 / scan_points, s0].
    Interval scan_range(const SdiEvaluator& sdi) const;
    EntrySpec entry_spec() const;
    SimConfig sim_config(double eps) const;
    std::pair<double, double> lambda_bracket(double eps) const;
};

RunConfig parse_config(std::string_view text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace canard
