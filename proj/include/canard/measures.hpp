#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "canard/relation.hpp"

namespace canard {

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

/// Probability measure on the line: a piecewise-linear density tabulated on a
/// uniform grid over `support`, plus finitely many point masses.
class TransportMeasure {
public:
    TransportMeasure() = default;

    /// `values` are density values at equally spaced nodes spanning `support`
    /// (at least two). Negative values are rejected.
    TransportMeasure(Interval support, std::vector<double> values, std::vector<Atom> atoms = {});

    static TransportMeasure dirac(double location);

    bool has_density() const { return !values_.empty(); }
    const Interval& support() const { return support_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t node_count() const { return values_.size(); }
    double node(std::size_t i) const;

    double density(double s) const;
    double density_mass() const;
    double atom_mass() const;
    double total_mass() const { return density_mass() + atom_mass(); }

    /// Mass of (-inf, s]: right-continuous.
    double cdf(double s) const;
    /// Density mass of (-inf, s], atoms excluded.
    double density_cdf(double s) const;
    /// Mass of (-inf, s).
    double cdf_left(double s) const;
    /// Smallest s with cdf(s) >= u, for u in (0, 1].
    double quantile(double u) const;

    /// Smallest and largest point carrying mass.
    Interval hull() const;

    /// Same measure with density values and atom masses scaled by `factor`.
    TransportMeasure scaled(double factor) const;

private:
    Interval support_;
    std::vector<double> values_;
    std::vector<double> cumulative_;  ///< density mass up to each node
    std::vector<Atom> atoms_;         ///< sorted by location
};

enum class EntryKind { uniform, truncated_cauchy, table };

struct EntrySpec {
    EntryKind kind = EntryKind::uniform;
    Interval interval;
    double location = 0.0;       ///< truncated Cauchy
    double scale = 0.0;          ///< truncated Cauchy
    std::vector<double> table;   ///< density values at equally spaced nodes over `interval`
};

inline constexpr int kDefaultGridNodes = 2001;

/// Normalized entry density, no atoms. Throws ValidationError for empty or
/// non-normalizable input.
TransportMeasure make_entry(const EntrySpec& spec, int grid_nodes = kDefaultGridNodes);

/// Exit density of an entry density transported by S0, evaluated pointwise.
///
///   D_ex(s+) = -D_en(s-) I_+'(s+) / I_-'(s-),   s- = S0^{-1}(s+),
///
/// and equivalently f'(alpha(s+)) g(omega(s-)) / (f'(omega(s-)) g(alpha(s+))) D_en(s-).
/// Only the part of the entry density below `entry_cut` is transported.
class ExitDensity {
public:
    ExitDensity(const TransportMeasure& entry, const SlowRelation& relation, double entry_cut);

    const Interval& range() const { return range_; }
    const Interval& entry_range() const { return entry_range_; }

    double operator()(double s_plus) const;
    double lienard_form(double s_plus) const;
    /// Adaptive quadrature of the density over its range, split at the images
    /// of the entry density's kinks.
    double mass() const;

private:
    double preimage(double s_plus) const;

    TransportMeasure entry_;
    SlowRelation relation_;
    Interval entry_range_;
    Interval range_;
};

/// Push-forward of the entry density through S0, tabulated on `grid_nodes`
/// nodes over T = S0(support). Both algebraic forms are evaluated and must
/// agree to 1e-9. Throws RangeError when S0 is undefined on part of the support.
TransportMeasure pushforward_density(const TransportMeasure& entry, const SlowRelation& relation,
                                     int grid_nodes = kDefaultGridNodes);

struct PushforwardReport {
    TransportMeasure measure;
    double analytic_mass = 0.0;  ///< quadrature of the exit density plus the atom
    double table_mass = 0.0;     ///< trapezoid mass of the tabulated density plus the atom, before rescaling
};

/// Limit exit measure: the push-forward through S0 in the tunnel case; in the
/// funnel case the part of the entry below the buffer point goes through S0 and
/// the rest collapses into an atom at s_c^+. The tabulated density is rescaled
/// so the measure has total mass 1; the report keeps both raw masses.
PushforwardReport pushforward_report(const TransportMeasure& entry, const SlowRelation& relation,
                                     int grid_nodes = kDefaultGridNodes);

inline TransportMeasure pushforward_measure(const TransportMeasure& entry, const SlowRelation& relation,
                                            int grid_nodes = kDefaultGridNodes) {
    return pushforward_report(entry, relation, grid_nodes).measure;
}

/// Uniform variate in (0, 1) for stream `index` of `seed`. Pure function of its
/// arguments, so samples can be drawn in any order or on any thread.
double uniform_variate(std::uint64_t seed, std::uint64_t index);

struct EmpiricalSample {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::size_t count() const { return values.size(); }
};

/// Inverse-CDF sampling with one counter-based stream per index.
EmpiricalSample sample(const TransportMeasure& measure, std::size_t n, std::uint64_t seed);

/// Kolmogorov-Smirnov distance, taking both one-sided limits at sample points
/// and at atoms of the target.
double ks_distance(const std::vector<double>& samples, const TransportMeasure& target);

/// First Wasserstein distance via the quantile coupling.
double wasserstein1(const std::vector<double>& samples, const TransportMeasure& target);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
};

/// Equal-width bins over [min, max] of the data, last bin closed on the right.
/// All-equal data give one degenerate bin.
std::vector<HistogramBin> histogram(const std::vector<double>& samples, int bins = 10);

}  // namespace canard
