#include "canard/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "canard/csv.hpp"
#include "canard/errors.hpp"
#include "canard/format.hpp"
#include "canard/relation.hpp"

namespace canard::cli {

namespace fs = std::filesystem;

unsigned threads_from_env() {
    const char* v = std::getenv("CANARD_LAB_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 0 || n > 4096)
        throw ValidationError(std::string("CANARD_LAB_THREADS must be a nonnegative integer, got '") + v + "'");
    return static_cast<unsigned>(n);
}

namespace {

struct Common {
    std::string config;
    std::string out;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "configuration file")->required();
    app->add_option("--out", c.out, "output directory (default: output.dir from the config)");
}

fs::path out_dir(const Common& c, const RunConfig& cfg) { return c.out.empty() ? fs::path(cfg.output_dir) : fs::path(c.out); }

std::vector<double> grid(Interval r, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = i == n - 1 ? r.hi : r.lo + r.width() * i / (n - 1);
    return g;
}

SlowRelation two_section_of(const RunConfig& cfg) {
    auto sdi = std::make_shared<const SdiEvaluator>(cfg.system());
    return SlowRelation::two_section(sdi, cfg.s_c_minus_value(), cfg.s_c_plus_value(), cfg.entry_interval());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return v.empty() ? std::nan("") : 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int cmd_validate(const Common& c, std::ostream& out) {
    const auto cfg = load_config(c.config);
    const auto report = validate(cfg.system());
    out << report.to_text();
    return report.all_pass() ? 0 : 1;
}

int cmd_sdi(const Common& c, std::optional<int> points, std::ostream& out) {
    const auto cfg = load_config(c.config);
    const SdiEvaluator sdi(cfg.system());
    const Interval r = cfg.scan_range(sdi);
    CsvTable t({"s", "I_minus", "I_plus", "I_total", "dI_minus", "dI_plus"});
    for (double s : grid(r, points.value_or(cfg.csv_points))) {
        t.add({cell(s), cell(sdi.minus(s)), cell(sdi.plus(s)), cell(sdi.total(s)),
               cell(sdi.derivative(s, Branch::attracting)), cell(sdi.derivative(s, Branch::repelling))});
    }
    const auto path = out_dir(c, cfg) / "sdi.csv";
    write_atomic(path, t.render());
    out << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_relation(const Common& c, std::optional<int> points, std::ostream& out) {
    const auto cfg = load_config(c.config);
    const auto rel = two_section_of(cfg);
    const double defined_up_to = rel.max_entry_height();
    CsvTable t({"s_minus", "S0", "tilde_S0"});
    for (double s : grid(rel.entry_interval(), points.value_or(cfg.csv_points))) {
        const double s0 = s <= defined_up_to ? rel.two_section(s) : std::nan("");
        t.add({cell(s), cell(s0), cell(rel.limit_map(s))});
    }
    const auto path = out_dir(c, cfg) / "relation.csv";
    write_atomic(path, t.render());
    out << "case: " << to_string(rel.transit_case()) << '\n';
    if (rel.buffer()) out << "buffer point s_b^-: " << format_real(*rel.buffer()) << '\n';
    if (defined_up_to < rel.entry_interval().hi)
        out << "S0 undefined above s^- = " << format_real(defined_up_to) << " (repelling branch too short)\n";
    out << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_ergodic(const Common& c, std::ostream& out) {
    const auto cfg = load_config(c.config);
    auto sdi = std::make_shared<const SdiEvaluator>(cfg.system());
    const double s0 = cfg.s0_value(*sdi);
    const Interval range = cfg.scan_range(*sdi);
    ZeroScanOptions opt;
    opt.grid_points = cfg.scan_points;
    const auto mc = classify_invariant_measures(*sdi, range, opt);
    const auto rel = SlowRelation::single_section(sdi, s0);

    std::ostringstream rep;
    const auto o = sdi->system().orders();
    rep << "system: f = " << cfg.f << ", p = " << cfg.p << "\n"
        << "orders: n = " << o.n << ", m = " << o.m << "\n"
        << "section height s0 = " << format_real(s0) << ", scan [" << format_real(range.lo) << ", "
        << format_real(range.hi) << "]\n"
        << "slow relation form: " << to_string(rel.orientation()) << "\n"
        << mc.to_text();
    std::vector<double> probes(mc.atoms.begin() + 1, mc.atoms.end());
    probes.push_back(0.5 * (range.lo + range.hi));
    for (double s : probes) rep << "\ncyclicity at s = " << format_real(s) << '\n' << cyclicity_report(*sdi, mc, s).to_text();
    out << rep.str();
    const auto path = out_dir(c, cfg) / "ergodic.txt";
    write_atomic(path, rep.str());
    return 0;
}

int cmd_density(const Common& c, std::ostream& out) {
    const auto cfg = load_config(c.config);
    const auto rel = two_section_of(cfg);
    const auto entry = make_entry(cfg.entry_spec(), cfg.grid);
    const auto rep = pushforward_report(entry, rel, cfg.grid);
    const fs::path dir = out_dir(c, cfg);

    CsvTable en({"s", "density"});
    for (std::size_t i = 0; i < entry.node_count(); ++i) en.add({cell(entry.node(i)), cell(entry.values()[i])});
    write_atomic(dir / "entry_density.csv", en.render());

    CsvTable ex({"s", "density", "atom_location", "atom_mass"});
    const auto& m = rep.measure;
    const auto& atoms = m.atoms();
    std::size_t rows = std::max(m.node_count(), atoms.size());
    for (std::size_t i = 0; i < rows; ++i) {
        std::vector<std::string> r(4);
        if (i < m.node_count()) {
            r[0] = cell(m.node(i));
            r[1] = cell(m.values()[i]);
        }
        if (i < atoms.size()) {
            r[2] = cell(atoms[i].location);
            r[3] = cell(atoms[i].mass);
        }
        ex.add(std::move(r));
    }
    write_atomic(dir / "exit_density.csv", ex.render());

    out << "case: " << to_string(rel.transit_case()) << '\n';
    if (rel.buffer()) out << "buffer point s_b^-: " << format_real(*rel.buffer()) << '\n';
    out << "exit mass (quadrature): " << format_real(rep.analytic_mass) << '\n'
        << "exit mass (table, before rescaling): " << format_real(rep.table_mass) << '\n';
    for (const auto& a : atoms) out << "atom at " << format_real(a.location) << " mass " << format_real(a.mass) << '\n';
    out << "wrote " << (dir / "entry_density.csv").string() << ", " << (dir / "exit_density.csv").string() << '\n';
    return 0;
}

int cmd_simulate(const Common& c, std::optional<double> eps_arg, std::optional<std::size_t> samples,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(c.config);
    const double eps = eps_arg ? *eps_arg : cfg.eps.value_or(0.01);
    const auto sys = cfg.system();
    const auto sim = cfg.sim_config(eps);
    check_config(sys, sim);
    const auto entry = make_entry(cfg.entry_spec(), cfg.grid);
    const std::size_t n = samples.value_or(cfg.samples);
    const std::uint64_t k = seed.value_or(cfg.seed);
    const unsigned threads = threads_from_env();

    const auto control = find_control_lambda(sys, sim, cfg.s_c_minus_value(), cfg.s_c_plus_value(), cfg.lambda_bracket(eps));
    const auto run = ensemble_transport(sys, sim, control.lambda_c, entry, n, k, threads);
    const fs::path dir = out_dir(c, cfg);

    CsvTable ct({"eps", "lambda_c", "iterations"});
    ct.add({cell(eps), cell(control.lambda_c), std::to_string(control.iterations)});
    write_atomic(dir / "control.csv", ct.render());

    CsvTable et({"sample_id", "s_entry", "s_exit", "outcome"});
    for (std::size_t i = 0; i < n; ++i)
        et.add({std::to_string(i), cell(run.entry.values[i]), cell(run.exit_height[i]), to_string(run.outcomes[i])});
    write_atomic(dir / "ensemble.csv", et.render());

    CsvTable ht({"bin_left", "bin_right", "count"});
    for (const auto& b : histogram(run.exits(), cfg.bins)) ht.add({cell(b.left), cell(b.right), std::to_string(b.count)});
    write_atomic(dir / "histogram.csv", ht.render());

    out << "eps = " << format_real(eps) << "  lambda_c = " << format_real(control.lambda_c) << "  ("
        << control.iterations << " shooting orbits)\n"
        << "crossed " << run.exits().size() << " of " << n << "; escaped_right " << run.escaped_right
        << ", escaped_down " << run.escaped_down << ", budget_exhausted " << run.budget_exhausted << '\n'
        << "wrote control.csv, ensemble.csv, histogram.csv in " << dir.string() << '\n';
    if (run.flagged()) err << "warning: more than 10% of the ensemble failed to reach the exit section\n";
    return 0;
}

int cmd_compare(const Common& c, const std::vector<double>& eps_list, std::optional<std::size_t> samples,
                std::optional<std::uint64_t> seed, std::ostream& out) {
    if (eps_list.size() < 2) throw ValidationError("compare needs at least two --eps values");
    auto cfg = load_config(c.config);
    if (samples) cfg.samples = *samples;
    if (seed) cfg.seed = *seed;
    const unsigned threads = threads_from_env();
    const auto rel = two_section_of(cfg);

    std::vector<CompareRow> rows;
    for (double e : eps_list) rows.push_back(compare_at(cfg, e, threads));

    CsvTable t({"eps", "lambda_c", "iterations", "ks", "w1", "sup_gap", "funnel_spread", "failures"});
    CsvTable ct({"eps", "lambda_c", "iterations"});
    for (const auto& r : rows) {
        t.add({cell(r.eps), cell(r.lambda_c), std::to_string(r.iterations), cell(r.ks), cell(r.w1), cell(r.sup_gap),
               cell(r.funnel_spread), std::to_string(r.failures)});
        ct.add({cell(r.eps), cell(r.lambda_c), std::to_string(r.iterations)});
    }
    const fs::path dir = out_dir(c, cfg);
    write_atomic(dir / "compare.csv", t.render());
    write_atomic(dir / "control.csv", ct.render());

    out << "case: " << to_string(rel.transit_case()) << ", samples " << cfg.samples << ", seed " << cfg.seed << '\n';
    out << "eps            lambda_c        KS          W1          sup|S_eps - limit|  funnel spread\n";
    for (const auto& r : rows) {
        out << format_real(r.eps) << "  " << format_real(r.lambda_c) << "  " << format_real(r.ks) << "  "
            << format_real(r.w1) << "  " << format_real(r.sup_gap) << "  " << cell(r.funnel_spread) << '\n';
    }
    // Rows are ordered as given; the convergence checks compare in order of decreasing eps.
    auto sorted = rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.eps > b.eps; });
    bool ks_ok = true, gap_ok = true;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        ks_ok = ks_ok && sorted[i].ks <= sorted[i - 1].ks;
        gap_ok = gap_ok && sorted[i].sup_gap <= sorted[i - 1].sup_gap;
    }
    out << "KS nonincreasing as eps decreases: " << (ks_ok ? "yes" : "no") << '\n'
        << "transition-map gap nonincreasing as eps decreases: " << (gap_ok ? "yes" : "no") << '\n';
    if (rel.buffer()) {
        bool spread_ok = true;
        for (std::size_t i = 1; i < sorted.size(); ++i) spread_ok = spread_ok && sorted[i].funnel_spread <= sorted[i - 1].funnel_spread;
        out << "funnel exit spread narrows as eps decreases: " << (spread_ok ? "yes" : "no") << '\n';
    }
    out << "wrote compare.csv, control.csv in " << dir.string() << '\n';
    return 0;
}

}  // namespace

CompareRow compare_at(const RunConfig& cfg, double eps, unsigned threads, int transition_grid) {
    const auto sys = cfg.system();
    const auto rel = two_section_of(cfg);
    const auto sim = cfg.sim_config(eps);
    const auto entry = make_entry(cfg.entry_spec(), cfg.grid);
    const auto limit = pushforward_measure(entry, rel, cfg.grid);

    CompareRow row;
    row.eps = eps;
    const auto control = find_control_lambda(sys, sim, cfg.s_c_minus_value(), cfg.s_c_plus_value(), cfg.lambda_bracket(eps));
    row.lambda_c = control.lambda_c;
    row.iterations = control.iterations;
    const auto run = ensemble_transport(sys, sim, control.lambda_c, entry, cfg.samples, cfg.seed, threads);
    row.failures = run.failures();
    const auto exits = run.exits();
    row.ks = exits.empty() ? 1.0 : ks_distance(exits, limit);
    row.w1 = exits.empty() ? std::nan("") : wasserstein1(exits, limit);

    for (double s : grid(rel.entry_interval(), transition_grid)) {
        const auto r = transition_map(sys, sim, control.lambda_c, s);
        if (r.outcome == Outcome::crossed) row.sup_gap = std::max(row.sup_gap, std::abs(r.s_plus - rel.limit_map(s)));
    }
    row.funnel_spread = std::nan("");
    if (const auto b = rel.buffer()) {
        std::vector<double> funnel;
        for (std::size_t i = 0; i < run.outcomes.size(); ++i)
            if (run.outcomes[i] == Outcome::crossed && run.entry.values[i] >= *b) funnel.push_back(run.exit_height[i]);
        row.funnel_spread = stddev(funnel);
    }
    return row;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"canard-lab: slow divergence integrals, slow relations and canard transport for Lienard systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "canard-lab 0.1.0");

    Common c_validate, c_sdi, c_relation, c_ergodic, c_density, c_simulate, c_compare;
    std::optional<int> sdi_points, relation_points;
    std::optional<double> sim_eps;
    std::optional<std::size_t> sim_samples, cmp_samples;
    std::optional<std::uint64_t> sim_seed, cmp_seed;
    std::vector<double> cmp_eps;

    auto* validate_cmd = app.add_subcommand("validate", "check the standing assumptions and report (n, m)");
    add_common(validate_cmd, c_validate);
    auto* sdi_cmd = app.add_subcommand("sdi", "tabulate the slow divergence integrals (sdi.csv)");
    add_common(sdi_cmd, c_sdi);
    sdi_cmd->add_option("--points", sdi_points, "grid size")->check(CLI::Range(2, 10000000));
    auto* relation_cmd = app.add_subcommand("relation", "tabulate S0 and its limit map over L (relation.csv)");
    add_common(relation_cmd, c_relation);
    relation_cmd->add_option("--points", relation_points, "grid size")->check(CLI::Range(2, 10000000));
    auto* ergodic_cmd = app.add_subcommand("ergodic", "invariant measures and cyclicity bounds (ergodic.txt)");
    add_common(ergodic_cmd, c_ergodic);
    auto* density_cmd = app.add_subcommand("density", "entry and limit exit densities (entry_density.csv, exit_density.csv)");
    add_common(density_cmd, c_density);
    auto* simulate_cmd = app.add_subcommand("simulate", "shoot for lambda_c and transport an entry ensemble");
    add_common(simulate_cmd, c_simulate);
    simulate_cmd->add_option("--eps", sim_eps, "time-scale ratio");
    simulate_cmd->add_option("--samples", sim_samples, "ensemble size")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", sim_seed, "sampling seed");
    auto* compare_cmd = app.add_subcommand("compare", "distance of ensemble exits to the limit measure across eps");
    add_common(compare_cmd, c_compare);
    compare_cmd->add_option("--eps", cmp_eps, "time-scale ratio (repeat, at least twice)")->required();
    compare_cmd->add_option("--samples", cmp_samples, "ensemble size")->check(CLI::PositiveNumber);
    compare_cmd->add_option("--seed", cmp_seed, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(c_validate, out);
        if (sdi_cmd->parsed()) return cmd_sdi(c_sdi, sdi_points, out);
        if (relation_cmd->parsed()) return cmd_relation(c_relation, relation_points, out);
        if (ergodic_cmd->parsed()) return cmd_ergodic(c_ergodic, out);
        if (density_cmd->parsed()) return cmd_density(c_density, out);
        if (simulate_cmd->parsed()) return cmd_simulate(c_simulate, sim_eps, sim_samples, sim_seed, out, err);
        if (compare_cmd->parsed()) return cmd_compare(c_compare, cmp_eps, cmp_samples, cmp_seed, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const RangeError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const StiffnessError& e) {
        err << "numeric failure: " << e.what() << " at t = " << format_real(e.time()) << ", state (" << format_real(e.state()[0])
            << ", " << format_real(e.state()[1]) << ")\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace canard::cli
