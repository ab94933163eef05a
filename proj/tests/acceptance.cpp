// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "canard/cli.hpp"
#include "canard/config.hpp"
#include "canard/measures.hpp"
#include "canard/relation.hpp"
#include "canard/sim.hpp"
#include "oracles.hpp"

#ifndef CANARD_CONFIG_DIR
#define CANARD_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace canard;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

fs::path config_path(const char* name) { return fs::path(CANARD_CONFIG_DIR) / name; }

int sgn(double v) { return (v > 0) - (v < 0); }

Verdict control_pair(double s_c_minus, double s_c_plus, double ref_100, double ref_200) {
    const auto sys = oracle::vdp();
    std::ostringstream d;
    bool ok = true;
    for (auto [eps, ref] : {std::pair{0.01, ref_100}, std::pair{0.005, ref_200}}) {
        SimConfig cfg;
        cfg.eps = eps;
        std::tie(cfg.x_sigma_minus, cfg.x_sigma_plus) = default_sections(sys, s_c_minus, s_c_plus);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = find_control_lambda(sys, cfg, s_c_minus, s_c_plus, default_bracket(eps));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double rel = std::abs(r.lambda_c - ref) / std::abs(ref);
        ok = ok && rel <= 0.05 && secs < 60.0;
        d << "eps=" << eps << " lambda_c=" << r.lambda_c << " rel.err=" << fmt("%.2e", rel)
          << " time=" << fmt("%.2fs", secs) << "; ";
    }
    return {ok, d.str()};
}

Verdict criterion1() { return control_pair(1.0 / 20, 1.0 / 10, -231.0 / 20000, -107135.0 / 20000000); }
Verdict criterion2() { return control_pair(1.0 / 10, 1.0 / 7, -2348.0 / 200000, -1071435.0 / 200000000); }

Verdict criterion3() {
    const auto b = buffer_point(*oracle::evaluator(oracle::vdp()), 1.0 / 10, 1.0 / 7);
    if (!b) return {false, "no buffer point"};
    return {std::abs(*b - 0.0651) <= 0.0005, "s_b=" + fmt("%.8f", *b)};
}

Verdict criterion4() {
    const auto mc = classify_invariant_measures(*oracle::evaluator(oracle::vdp()), {0.16 / 2000, 0.16});
    return {mc.uniquely_ergodic && mc.zero_count() == 0,
            "zeros=" + std::to_string(mc.zero_count()) + " uniquely_ergodic=" + (mc.uniquely_ergodic ? "true" : "false")};
}

Verdict criterion5() {
    auto q = oracle::evaluator(oracle::quartic());
    const double s0 = 0.9;
    const auto r = SlowRelation::single_section(q, s0);
    double gap = 0.0, sdi = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double s = s0 * i / 200;
        gap = std::max(gap, std::abs(r(s) - s));
        sdi = std::max(sdi, std::abs(q->total(s)));
    }
    const auto scan = find_zeros(*q, {s0 / 2000, s0});
    return {gap < 1e-9 && sdi < 1e-11 && scan.identically_zero,
            "max|S-s|=" + fmt("%.2e", gap) + " max|I|=" + fmt("%.2e", sdi) +
                " identically_zero=" + (scan.identically_zero ? "true" : "false")};
}

Verdict criterion6() {
    auto v = oracle::evaluator(oracle::vdp());
    double val = 0.0, der = 0.0;
    const double top = 0.16;
    for (int i = 1; i <= 100; ++i) {
        const double s = top * i / 101;
        val = std::max({val, std::abs(v->minus(s) - oracle::vdp_minus(s)), std::abs(v->plus(s) - oracle::vdp_plus(s))});
        const double h = 1e-6;
        const double fd_minus = (v->minus(s + h) - v->minus(s - h)) / (2 * h);
        const double fd_plus = (v->plus(s + h) - v->plus(s - h)) / (2 * h);
        der = std::max({der, std::abs(v->derivative(s, Branch::attracting) - fd_minus),
                        std::abs(v->derivative(s, Branch::repelling) - fd_plus)});
    }
    return {val <= 1e-10 && der <= 1e-6, "max value err=" + fmt("%.2e", val) + " max derivative err=" + fmt("%.2e", der)};
}

Verdict criterion7() {
    auto v = oracle::evaluator(oracle::vdp());
    std::ostringstream d;
    bool ok = true;
    struct Case {
        const char* name;
        double s_c_minus, s_c_plus;
        Interval entry;
    };
    for (const Case& c : {Case{"tunnel", 1.0 / 20, 1.0 / 10, {1.0 / 30 - 1.0 / 150, 1.0 / 20}},
                          Case{"funnel", 1.0 / 10, 1.0 / 7, {0.05, 0.08}}}) {
        const auto rel = SlowRelation::two_section(v, c.s_c_minus, c.s_c_plus, c.entry);
        const auto entry = make_entry({EntryKind::uniform, c.entry});
        const auto rep = pushforward_report(entry, rel);

        // Monte Carlo through S0 on the tunnel part only.
        const double cut = rel.buffer().value_or(c.entry.hi);
        const auto tunnel_entry = make_entry({EntryKind::uniform, {c.entry.lo, std::min(cut, c.entry.hi)}});
        const auto exit = pushforward_density(tunnel_entry, rel);
        const auto draws = sample(entry, 10000, 7);
        std::vector<double> mapped;
        for (double s : draws.values)
            if (s < cut) mapped.push_back(rel.two_section(s));
        const double ks = ks_distance(mapped, exit);
        const double mass_err = std::abs(rep.analytic_mass - 1.0);
        ok = ok && ks < 0.02 && mass_err <= 1e-8;
        d << c.name << ": KS=" << fmt("%.4f", ks) << " (n=" << mapped.size() << ") |mass-1|=" << fmt("%.1e", mass_err);
        if (!rep.measure.atoms().empty()) d << " atom=" << fmt("%.5f", rep.measure.atoms().front().mass);
        d << "; ";
    }
    return {ok, d.str()};
}

Verdict criterion8() {
    const unsigned threads = resolve_threads(cli::threads_from_env());
    std::ostringstream d;
    bool ok = true;
    for (const char* name : {"vdp.cfg", "vdp_funnel.cfg"}) {
        const auto cfg = load_config(config_path(name));
        const auto coarse = cli::compare_at(cfg, 0.01, threads);
        const auto fine = cli::compare_at(cfg, 0.005, threads);
        ok = ok && fine.ks <= coarse.ks && coarse.failures == 0 && fine.failures == 0;
        d << name << ": KS(1/100)=" << fmt("%.4f", coarse.ks) << " KS(1/200)=" << fmt("%.4f", fine.ks) << "; ";
    }
    return {ok, d.str()};
}

Verdict criterion9() {
    std::ostringstream d;
    bool ok = true;
    int checked = 0;

    // Literal law on the relation defined by I_-(s) + I_+(S(s)) = 0.
    auto v = oracle::evaluator(oracle::vdp());
    const double top = v->max_height(Branch::repelling);
    const auto wide = SlowRelation::two_section(v, 0.16, top, {1e-4, 0.16});
    const double hi = std::min(0.16, wide.max_entry_height());
    for (int i = 1; i <= 400; ++i) {
        const double s = hi * i / 400;
        const double I = v->total(s), gap = s - wide.two_section(s);
        if (std::abs(I) <= 1e-10 || std::abs(gap) <= 1e-10) continue;
        ++checked;
        if (sgn(I) != sgn(gap)) {
            ok = false;
            d << "literal law fails at s=" << s << "; ";
        }
    }

    // Single-section relations, orbits and atoms.
    struct Case {
        const char* name;
        canard::LienardSystem sys;
        double s0;
    };
    for (const Case& c : {Case{"vdp", oracle::vdp(), 0.16}, Case{"one-zero", oracle::one_zero(), 0.45}}) {
        auto sdi = oracle::evaluator(c.sys);
        const auto rel = SlowRelation::single_section(sdi, c.s0);
        const auto mc = classify_invariant_measures(*sdi, {c.s0 / 2000, c.s0});
        double worst = 0.0;
        int orbits = 0;
        for (int i = 1; i <= 200; ++i) {
            const double s = c.s0 * i / 200;
            const double I = sdi->total(s), gap = s - rel(s);
            if (std::abs(I) > 1e-10 && std::abs(gap) > 1e-10) {
                ++checked;
                if (sgn(I) != rel.sign_law() * sgn(gap)) {
                    ok = false;
                    d << c.name << " sign law fails at s=" << s << "; ";
                }
            }
            if (i % 10 != 0) continue;
            const auto orbit = iterate_orbit(rel, s);
            ++orbits;
            double nearest = INFINITY;
            for (double a : mc.atoms) nearest = std::min(nearest, std::abs(orbit.limit - a));
            worst = std::max(worst, nearest);
            ok = ok && orbit.converged && orbit.monotone && nearest <= 1e-8;
        }
        d << c.name << ": " << orbits << " orbits, max distance to atom=" << fmt("%.1e", worst) << "; ";
    }
    d << checked << " sign checks";
    return {ok, d.str()};
}

std::map<std::string, std::string> simulate_outputs(const fs::path& dir, const char* threads) {
    ::setenv("CANARD_LAB_THREADS", threads, 1);
    fs::remove_all(dir);
    const std::string cfg = config_path("vdp.cfg").string();
    const std::string out = dir.string();
    const char* argv[] = {"canard-lab", "simulate", "--config", cfg.c_str(), "--out", out.c_str()};
    std::ostringstream sink, err;
    if (cli::run(6, argv, sink, err) != 0) throw std::runtime_error("simulate failed: " + err.str());
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream bytes;
        bytes << in.rdbuf();
        files[e.path().filename().string()] = bytes.str();
    }
    return files;
}

Verdict criterion10() {
    const fs::path base = fs::temp_directory_path() / ("canard-acceptance-" + std::to_string(::getpid()));
    const auto a = simulate_outputs(base / "a", "1");
    const auto b = simulate_outputs(base / "b", "1");
    const auto c = simulate_outputs(base / "c", "4");
    fs::remove_all(base);
    ::unsetenv("CANARD_LAB_THREADS");
    const bool files = a.count("control.csv") && a.count("ensemble.csv") && a.count("histogram.csv");
    return {files && a == b && a == c, std::to_string(a.size()) + " files; rerun identical=" + (a == b ? "yes" : "no") +
                                           ", 1 vs 4 threads identical=" + (a == c ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"control curve, tunnel case", criterion1},   {"control curve, funnel case", criterion2},
        {"buffer point", criterion3},                 {"unique ergodicity", criterion4},
        {"symmetric identity", criterion5},           {"closed-form oracle", criterion6},
        {"push-forward vs Monte Carlo", criterion7},  {"weak convergence in eps", criterion8},
        {"sign law and orbits", criterion9},          {"determinism", criterion10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
