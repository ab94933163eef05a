#include "canard/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "canard/errors.hpp"
#include "canard/format.hpp"

namespace canard {

TransportMeasure::TransportMeasure(Interval support, std::vector<double> values, std::vector<Atom> atoms)
    : support_(support), values_(std::move(values)), atoms_(std::move(atoms)) {
    if (!values_.empty()) {
        if (values_.size() < 2) throw ValidationError("density table needs at least two nodes");
        if (!(support_.lo < support_.hi)) throw ValidationError("density support must have positive width");
        for (double v : values_)
            if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("density values must be finite and >= 0");
        const double h = support_.width() / static_cast<double>(values_.size() - 1);
        cumulative_.assign(values_.size(), 0.0);
        for (std::size_t i = 1; i < values_.size(); ++i)
            cumulative_[i] = cumulative_[i - 1] + 0.5 * h * (values_[i - 1] + values_[i]);
    }
    for (const auto& a : atoms_)
        if (!(a.mass >= 0.0) || !std::isfinite(a.location)) throw ValidationError("atoms need finite location, mass >= 0");
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
}

TransportMeasure TransportMeasure::dirac(double location) { return TransportMeasure({}, {}, {{location, 1.0}}); }

double TransportMeasure::node(std::size_t i) const {
    if (i + 1 == values_.size()) return support_.hi;
    return support_.lo + support_.width() * static_cast<double>(i) / static_cast<double>(values_.size() - 1);
}

double TransportMeasure::density(double s) const {
    if (values_.empty() || s < support_.lo || s > support_.hi) return 0.0;
    const double h = support_.width() / static_cast<double>(values_.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>((s - support_.lo) / h), values_.size() - 2);
    const double t = std::clamp((s - node(i)) / h, 0.0, 1.0);
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

double TransportMeasure::density_mass() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

double TransportMeasure::atom_mass() const {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.mass;
    return m;
}

double TransportMeasure::density_cdf(double s) const {
    if (values_.empty() || s <= support_.lo) return 0.0;
    if (s >= support_.hi) return cumulative_.back();
    const double h = support_.width() / static_cast<double>(values_.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>((s - support_.lo) / h), values_.size() - 2);
    const double t = std::clamp(s - node(i), 0.0, h);
    return cumulative_[i] + values_[i] * t + (values_[i + 1] - values_[i]) * t * t / (2.0 * h);
}

double TransportMeasure::cdf(double s) const {
    double m = density_cdf(s);
    for (const auto& a : atoms_)
        if (a.location <= s) m += a.mass;
    return std::min(m, 1.0);
}

double TransportMeasure::cdf_left(double s) const {
    double m = density_cdf(s);
    for (const auto& a : atoms_)
        if (a.location < s) m += a.mass;
    return std::min(m, 1.0);
}

Interval TransportMeasure::hull() const {
    double lo = INFINITY, hi = -INFINITY;
    if (!values_.empty()) {
        lo = support_.lo;
        hi = support_.hi;
    }
    for (const auto& a : atoms_) {
        if (a.mass <= 0.0) continue;
        lo = std::min(lo, a.location);
        hi = std::max(hi, a.location);
    }
    if (lo > hi) throw ValidationError("measure carries no mass");
    return {lo, hi};
}

double TransportMeasure::quantile(double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw RangeError("quantile level " + format_real(u) + " outside (0, 1]");
    for (const auto& a : atoms_)
        if (cdf_left(a.location) < u && u <= cdf(a.location)) return a.location;
    const Interval h = hull();
    double lo = h.lo, hi = h.hi;
    if (cdf(lo) >= u) return lo;
    if (cdf(hi) < u) return hi;
    for (int i = 0; i < 2000; ++i) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        (cdf(mid) >= u ? hi : lo) = mid;
    }
    return hi;
}

TransportMeasure TransportMeasure::scaled(double factor) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= factor;
    std::vector<Atom> a = atoms_;
    for (auto& x : a) x.mass *= factor;
    return TransportMeasure(support_, std::move(v), std::move(a));
}

namespace {

TransportMeasure normalized(Interval support, std::vector<double> values) {
    TransportMeasure raw(support, std::move(values));
    const double mass = raw.density_mass();
    if (!(mass > 0.0)) throw ValidationError("entry density is not normalizable (zero mass)");
    return raw.scaled(1.0 / mass);
}

}  // namespace

TransportMeasure make_entry(const EntrySpec& spec, int grid_nodes) {
    const Interval I = spec.interval;
    if (!(I.lo < I.hi)) throw ValidationError("entry interval must have positive width");
    if (grid_nodes < 2) throw ValidationError("entry grid needs at least two nodes");
    switch (spec.kind) {
        case EntryKind::uniform:
            return TransportMeasure(I, std::vector<double>(grid_nodes, 1.0 / I.width()));
        case EntryKind::truncated_cauchy: {
            if (!(spec.scale > 0.0)) throw ValidationError("Cauchy scale must be positive");
            std::vector<double> v(grid_nodes);
            for (int i = 0; i < grid_nodes; ++i) {
                const double s = i == grid_nodes - 1 ? I.hi : I.lo + I.width() * i / (grid_nodes - 1);
                const double z = (s - spec.location) / spec.scale;
                v[i] = 1.0 / (std::numbers::pi * spec.scale * (1.0 + z * z));
            }
            return normalized(I, std::move(v));
        }
        case EntryKind::table:
            if (spec.table.size() < 2) throw ValidationError("entry table needs at least two values");
            return normalized(I, spec.table);
    }
    throw ValidationError("unknown entry kind");
}

ExitDensity::ExitDensity(const TransportMeasure& entry, const SlowRelation& relation, double entry_cut)
    : entry_(entry), relation_(relation) {
    if (!relation.is_two_section()) throw ValidationError("exit density needs a two-section relation");
    if (!entry.has_density()) return;
    entry_range_ = {entry.support().lo, std::min(entry.support().hi, entry_cut)};
    if (!(entry_range_.lo < entry_range_.hi)) {
        entry_range_ = {};
        return;
    }
    range_ = {relation.two_section(entry_range_.lo), relation.two_section(entry_range_.hi)};
}

double ExitDensity::preimage(double s_plus) const {
    const auto& sdi = relation_.sdi();
    const double s = invert_minus(sdi, -sdi.plus(s_plus), sdi.max_height(Branch::attracting));
    return std::clamp(s, entry_range_.lo, entry_range_.hi);
}

double ExitDensity::operator()(double s_plus) const {
    if (!(range_.lo < range_.hi) || s_plus < range_.lo || s_plus > range_.hi) return 0.0;
    const double s_minus = preimage(s_plus);
    const double d = entry_.density(s_minus);
    if (d == 0.0) return 0.0;
    const auto& sdi = relation_.sdi();
    return -d * sdi.derivative(s_plus, Branch::repelling) / sdi.derivative(s_minus, Branch::attracting);
}

double ExitDensity::lienard_form(double s_plus) const {
    if (!(range_.lo < range_.hi) || s_plus < range_.lo || s_plus > range_.hi) return 0.0;
    const double s_minus = preimage(s_plus);
    const double d = entry_.density(s_minus);
    if (d == 0.0) return 0.0;
    const auto& sdi = relation_.sdi();
    const auto& sys = sdi.system();
    const double alpha = sdi.branch_root(s_plus, Branch::repelling);
    const double omega = sdi.branch_root(s_minus, Branch::attracting);
    return d * sys.df_at(alpha) * sys.g_at(omega) / (sys.df_at(omega) * sys.g_at(alpha));
}

double ExitDensity::mass() const {
    if (!(range_.lo < range_.hi)) return 0.0;
    // Kinks of the piecewise-linear entry density, mapped to the exit section.
    std::vector<double> cuts{entry_range_.lo};
    const auto& v = entry_.values();
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, x);
    std::vector<double> kinks;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double s = entry_.node(i);
        if (s <= entry_range_.lo || s >= entry_range_.hi) continue;
        if (std::abs(v[i + 1] - 2 * v[i] + v[i - 1]) > 1e-12 * vmax) kinks.push_back(s);
    }
    // Pieces free of kinks converge fast; with many kinks the pieces stay
    // coarse and the depth is capped.
    int depth = 15;
    if (kinks.size() <= 64) {
        cuts.insert(cuts.end(), kinks.begin(), kinks.end());
    } else {
        depth = 5;
        for (int k = 1; k < 64; ++k) cuts.push_back(entry_range_.lo + entry_range_.width() * k / 64);
    }
    cuts.push_back(entry_range_.hi);

    double total = 0.0;
    double prev = range_.lo;
    for (std::size_t k = 1; k < cuts.size(); ++k) {
        const double next = k + 1 == cuts.size() ? range_.hi : relation_.two_section(cuts[k]);
        if (next > prev) {
            double err = 0.0;
            total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                [this](double s) { return (*this)(s); }, prev, next, depth, 1e-13, &err);
        }
        prev = next;
    }
    return total;
}

namespace {

std::vector<double> tabulate(const ExitDensity& ed, int grid_nodes) {
    const Interval T = ed.range();
    std::vector<double> values(grid_nodes);
    for (int i = 0; i < grid_nodes; ++i) {
        const double s = i == grid_nodes - 1 ? T.hi : T.lo + T.width() * i / (grid_nodes - 1);
        const double a = ed(s);
        const double b = ed.lienard_form(s);
        if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a)))
            throw NumericError("exit density forms disagree at s+ = " + format_real(s) + ": " + format_real(a) +
                               " vs " + format_real(b));
        values[i] = a;
    }
    return values;
}

}  // namespace

TransportMeasure pushforward_density(const TransportMeasure& entry, const SlowRelation& relation, int grid_nodes) {
    if (!entry.has_density()) throw ValidationError("push-forward needs an entry density");
    const ExitDensity ed(entry, relation, entry.support().hi);
    TransportMeasure raw(ed.range(), tabulate(ed, grid_nodes));
    return raw.scaled(entry.density_mass() / raw.density_mass());
}

PushforwardReport pushforward_report(const TransportMeasure& entry, const SlowRelation& relation, int grid_nodes) {
    if (!relation.is_two_section()) throw ValidationError("push-forward needs a two-section relation");
    const auto cut = relation.buffer();
    const double entry_cut = cut ? *cut : INFINITY;

    std::vector<Atom> atoms;
    double funnel_mass = 0.0;
    for (const auto& a : entry.atoms()) {
        if (a.location >= entry_cut)
            funnel_mass += a.mass;
        else
            atoms.push_back({relation.two_section(a.location), a.mass});
    }
    PushforwardReport out;
    double tunnel_density_mass = 0.0;
    std::vector<double> values;
    Interval range;
    if (entry.has_density()) {
        const ExitDensity ed(entry, relation, entry_cut);
        tunnel_density_mass = entry.density_cdf(entry_cut);
        funnel_mass += entry.density_mass() - tunnel_density_mass;
        if (ed.range().lo < ed.range().hi) {
            range = ed.range();
            values = tabulate(ed, grid_nodes);
            out.analytic_mass += ed.mass();
        }
    }
    if (funnel_mass > 0.0) atoms.push_back({relation.s_c_plus(), funnel_mass});
    double atom_total = 0.0;
    for (const auto& a : atoms) atom_total += a.mass;
    out.analytic_mass += atom_total;

    TransportMeasure raw(range, std::move(values), atoms);
    out.table_mass = raw.total_mass();
    if (raw.has_density() && raw.density_mass() > 0.0) {
        std::vector<double> v = raw.values();
        const double factor = tunnel_density_mass / raw.density_mass();
        for (double& x : v) x *= factor;
        out.measure = TransportMeasure(range, std::move(v), atoms);
    } else {
        out.measure = TransportMeasure({}, {}, atoms);
    }
    return out;
}

double uniform_variate(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 engine(seq);
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1p-53;
}

EmpiricalSample sample(const TransportMeasure& measure, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ValidationError("sample size must be at least 1");
    EmpiricalSample out;
    out.seed = seed;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = measure.quantile(uniform_variate(seed, i));
    return out;
}

double ks_distance(const std::vector<double>& samples, const TransportMeasure& target) {
    if (samples.empty()) throw ValidationError("KS distance needs samples");
    std::vector<double> x = samples;
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size();) {
        std::size_t j = i;
        while (j < x.size() && x[j] == x[i]) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - target.cdf_left(x[i])));
        d = std::max(d, std::abs(static_cast<double>(j) / n - target.cdf(x[i])));
        i = j;
    }
    for (const auto& a : target.atoms()) {
        const auto below = std::lower_bound(x.begin(), x.end(), a.location) - x.begin();
        const auto upto = std::upper_bound(x.begin(), x.end(), a.location) - x.begin();
        d = std::max(d, std::abs(static_cast<double>(below) / n - target.cdf_left(a.location)));
        d = std::max(d, std::abs(static_cast<double>(upto) / n - target.cdf(a.location)));
    }
    return d;
}

double wasserstein1(const std::vector<double>& samples, const TransportMeasure& target) {
    if (samples.empty()) throw ValidationError("Wasserstein distance needs samples");
    std::vector<double> x = samples;
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    constexpr int kSub = 16;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < kSub; ++j) {
            const double u = (static_cast<double>(i) + (j + 0.5) / kSub) / static_cast<double>(n);
            acc += std::abs(x[i] - target.quantile(u));
        }
    return acc / static_cast<double>(n * kSub);
}

std::vector<HistogramBin> histogram(const std::vector<double>& samples, int bins) {
    if (bins < 1) throw ValidationError("histogram needs at least one bin");
    if (samples.empty()) return {};
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *mn, hi = *mx;
    if (lo == hi) return {{lo, hi, samples.size()}};
    std::vector<HistogramBin> out(bins);
    for (int b = 0; b < bins; ++b) {
        out[b].left = lo + (hi - lo) * b / bins;
        out[b].right = b + 1 == bins ? hi : lo + (hi - lo) * (b + 1) / bins;
    }
    for (double v : samples) {
        auto b = static_cast<int>((v - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        while (b > 0 && v < out[b].left) --b;
        while (b + 1 < bins && v >= out[b + 1].left) ++b;
        ++out[b].count;
    }
    return out;
}

}  // namespace canard
