#include <doctest.h>

#include <string>

#include "canard/config.hpp"
#include "canard/errors.hpp"

using namespace canard;
using doctest::Approx;

namespace {
std::string error_of(const std::string& text) {
    try {
        parse_config(text, "t.cfg");
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

const char* kVdp =
    "# van der Pol\n"
    "system.f = x^2/2 + x^3/3\n"
    "system.p = x\n"
    "system.x_min = -0.95\n"
    "system.x_max = 2\n"
    "\n"
    "sections.s_c_minus = 1/20   # trailing comment\n"
    "sections.s_c_plus = 1/10\n"
    "sections.entry_lo = 1/30 - 1/150\n";
}  // namespace

TEST_CASE("values are constant expressions") {
    const auto c = parse_config(kVdp);
    CHECK(c.s_c_minus == Approx(0.05));
    CHECK(*c.entry_lo == Approx(1.0 / 30 - 1.0 / 150).epsilon(1e-15));
    CHECK(c.entry_interval().hi == 0.05);
    CHECK(c.samples == 500);
    CHECK(c.seed == 1);
    const auto sim = c.sim_config(0.01);
    CHECK(sim.x_sigma_minus > 0);
    CHECK(sim.x_sigma_plus < 0);
}

TEST_CASE("errors carry the origin and line number") {
    CHECK(error_of(std::string(kVdp) + "sim.epz = 1\n").find("t.cfg:10: unknown key 'sim.epz'") != std::string::npos);
    CHECK(error_of(std::string(kVdp) + "system.p = x^3\n").find("t.cfg:10: duplicate key") != std::string::npos);
    CHECK(error_of("system.f\n").find("t.cfg:1:") != std::string::npos);
    CHECK(error_of("system.x_min =\n").find("t.cfg:1: empty value") != std::string::npos);
    CHECK(error_of("sim.samples = 2.5\n").find("t.cfg:1:") != std::string::npos);
    CHECK(error_of("system.x_min = x + 1\n").find("t.cfg:1:") != std::string::npos);
    CHECK(error_of("entry.kind = gaussian\n").find("t.cfg:1:") != std::string::npos);
}

TEST_CASE("entry support must lie inside the entry interval") {
    const auto c = parse_config(std::string(kVdp) + "entry.lo = 0.01\n");
    CHECK_THROWS_AS(c.entry_spec(), ValidationError);
}

TEST_CASE("missing file") { CHECK_THROWS_AS(load_config("/nonexistent/canard.cfg"), ValidationError); }
