#include "canard/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "canard/errors.hpp"
#include "canard/expr.hpp"
#include "canard/format.hpp"

namespace canard {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double number(const std::string& text) {
    const auto e = RealExpr::parse(text);
    if (!e.is_constant()) throw ValidationError("expected a number, got an expression in x");
    const double v = e.constant_value();
    if (!std::isfinite(v)) throw ValidationError("value is not finite");
    return v;
}

long long integer(const std::string& text) {
    const double v = number(text);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ValidationError("expected an integer");
    return static_cast<long long>(v);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"system.f", [](RunConfig& c, const std::string& v) { RealExpr::parse(v); c.f = v; }},
        {"system.p", [](RunConfig& c, const std::string& v) { RealExpr::parse(v); c.p = v; }},
        {"system.x_min", [](RunConfig& c, const std::string& v) { c.x_min = number(v); }},
        {"system.x_max", [](RunConfig& c, const std::string& v) { c.x_max = number(v); }},
        {"sections.s_c_minus", [](RunConfig& c, const std::string& v) { c.s_c_minus = number(v); }},
        {"sections.s_c_plus", [](RunConfig& c, const std::string& v) { c.s_c_plus = number(v); }},
        {"sections.x_sigma_minus", [](RunConfig& c, const std::string& v) { c.x_sigma_minus = number(v); }},
        {"sections.x_sigma_plus", [](RunConfig& c, const std::string& v) { c.x_sigma_plus = number(v); }},
        {"sections.entry_lo", [](RunConfig& c, const std::string& v) { c.entry_lo = number(v); }},
        {"sections.entry_hi", [](RunConfig& c, const std::string& v) { c.entry_hi = number(v); }},
        {"sections.s0", [](RunConfig& c, const std::string& v) { c.s0 = number(v); }},
        {"entry.kind",
         [](RunConfig& c, const std::string& v) {
             if (v == "uniform")
                 c.entry_kind = EntryKind::uniform;
             else if (v == "truncated_cauchy")
                 c.entry_kind = EntryKind::truncated_cauchy;
             else if (v == "table")
                 c.entry_kind = EntryKind::table;
             else
                 throw ValidationError("entry.kind must be uniform, truncated_cauchy or table");
         }},
        {"entry.lo", [](RunConfig& c, const std::string& v) { c.entry_support_lo = number(v); }},
        {"entry.hi", [](RunConfig& c, const std::string& v) { c.entry_support_hi = number(v); }},
        {"entry.location", [](RunConfig& c, const std::string& v) { c.cauchy_location = number(v); }},
        {"entry.scale", [](RunConfig& c, const std::string& v) { c.cauchy_scale = number(v); }},
        {"entry.table",
         [](RunConfig& c, const std::string& v) {
             std::stringstream ss(v);
             std::string item;
             c.entry_table.clear();
             while (std::getline(ss, item, ',')) c.entry_table.push_back(number(trim(item)));
         }},
        {"sim.eps", [](RunConfig& c, const std::string& v) { c.eps = number(v); }},
        {"sim.abs_tol", [](RunConfig& c, const std::string& v) { c.abs_tol = number(v); }},
        {"sim.rel_tol", [](RunConfig& c, const std::string& v) { c.rel_tol = number(v); }},
        {"sim.max_step", [](RunConfig& c, const std::string& v) { c.max_step = number(v); }},
        {"sim.max_time", [](RunConfig& c, const std::string& v) { c.max_time = number(v); }},
        {"sim.min_eps", [](RunConfig& c, const std::string& v) { c.min_eps = number(v); }},
        {"sim.lambda_lo", [](RunConfig& c, const std::string& v) { c.lambda_lo = number(v); }},
        {"sim.lambda_hi", [](RunConfig& c, const std::string& v) { c.lambda_hi = number(v); }},
        {"sim.samples",
         [](RunConfig& c, const std::string& v) {
             const auto n = integer(v);
             if (n < 1) throw ValidationError("sim.samples must be at least 1");
             c.samples = static_cast<std::size_t>(n);
         }},
        {"sim.seed",
         [](RunConfig& c, const std::string& v) {
             const auto n = integer(v);
             if (n < 0) throw ValidationError("sim.seed must be nonnegative");
             c.seed = static_cast<std::uint64_t>(n);
         }},
        {"sim.bins",
         [](RunConfig& c, const std::string& v) {
             const auto n = integer(v);
             if (n < 1) throw ValidationError("sim.bins must be at least 1");
             c.bins = static_cast<int>(n);
         }},
        {"sim.grid",
         [](RunConfig& c, const std::string& v) {
             const auto n = integer(v);
             if (n < 2) throw ValidationError("sim.grid must be at least 2");
             c.grid = static_cast<int>(n);
         }},
        {"scan.lo", [](RunConfig& c, const std::string& v) { c.scan_lo = number(v); }},
        {"scan.hi", [](RunConfig& c, const std::string& v) { c.scan_hi = number(v); }},
        {"scan.points",
         [](RunConfig& c, const std::string& v) {
             const auto n = integer(v);
             if (n < 3) throw ValidationError("scan.points must be at least 3");
             c.scan_points = static_cast<int>(n);
         }},
        {"scan.csv_points",
         [](RunConfig& c, const std::string& v) {
             const auto n = integer(v);
             if (n < 2) throw ValidationError("scan.csv_points must be at least 2");
             c.csv_points = static_cast<int>(n);
         }},
        {"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
    };
    return table;
}

template <class T>
T require(const std::optional<T>& v, const char* key) {
    if (!v) throw ValidationError(std::string("missing config key ") + key);
    return *v;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& origin) {
    RunConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where + "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ValidationError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ValidationError(where + "duplicate key '" + key + "'");
        if (value.empty()) throw ValidationError(where + "empty value for '" + key + "'");
        try {
            it->second(cfg, value);
        } catch (const Error& e) {
            throw ValidationError(where + key + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

LienardSystem RunConfig::system() const {
    if (f.empty()) throw ValidationError("missing config key system.f");
    if (p.empty()) throw ValidationError("missing config key system.p");
    return LienardSystem::from_text(f, p, require(x_min, "system.x_min"), require(x_max, "system.x_max"));
}

double RunConfig::s_c_minus_value() const { return require(s_c_minus, "sections.s_c_minus"); }
double RunConfig::s_c_plus_value() const { return require(s_c_plus, "sections.s_c_plus"); }

Interval RunConfig::entry_interval() const {
    return {require(entry_lo, "sections.entry_lo"), entry_hi.value_or(s_c_minus_value())};
}

double RunConfig::s0_value(const SdiEvaluator& sdi) const {
    if (s0) return *s0;
    return std::min(sdi.max_height(Branch::attracting), sdi.max_height(Branch::repelling));
}

Interval RunConfig::scan_range(const SdiEvaluator& sdi) const {
    const double top = s0_value(sdi);
    return {scan_lo.value_or(top / scan_points), scan_hi.value_or(top)};
}

EntrySpec RunConfig::entry_spec() const {
    EntrySpec spec;
    spec.kind = entry_kind;
    const Interval L = entry_interval();
    spec.interval = {entry_support_lo.value_or(L.lo), entry_support_hi.value_or(L.hi)};
    if (spec.interval.lo < L.lo || spec.interval.hi > L.hi)
        throw ValidationError("entry support [" + format_real(spec.interval.lo) + ", " +
                              format_real(spec.interval.hi) + "] must lie inside L = [" + format_real(L.lo) +
                              ", " + format_real(L.hi) + "]");
    spec.location = cauchy_location.value_or(0.5 * (spec.interval.lo + spec.interval.hi));
    spec.scale = cauchy_scale.value_or(L.width() / 20);
    spec.table = entry_table;
    if (entry_kind == EntryKind::table && entry_table.empty())
        throw ValidationError("entry.kind = table needs entry.table");
    return spec;
}

SimConfig RunConfig::sim_config(double e) const {
    SimConfig cfg;
    cfg.eps = e;
    cfg.abs_tol = abs_tol;
    cfg.rel_tol = rel_tol;
    cfg.max_step = max_step;
    cfg.max_time = max_time;
    cfg.min_eps = min_eps;
    const auto sys = system();
    if (!x_sigma_minus || !x_sigma_plus) {
        const auto [a, b] = default_sections(sys, s_c_minus_value(), s_c_plus_value());
        cfg.x_sigma_minus = a;
        cfg.x_sigma_plus = b;
    }
    if (x_sigma_minus) cfg.x_sigma_minus = *x_sigma_minus;
    if (x_sigma_plus) cfg.x_sigma_plus = *x_sigma_plus;
    return cfg;
}

std::pair<double, double> RunConfig::lambda_bracket(double e) const {
    const auto d = default_bracket(e);
    return {lambda_lo.value_or(d.first), lambda_hi.value_or(d.second)};
}

}  // namespace canard
