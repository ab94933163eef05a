#include <doctest.h>

#include <cmath>
#include <cstring>

#include "canard/errors.hpp"
#include "canard/sim.hpp"
#include "oracles.hpp"

using namespace canard;
using doctest::Approx;

namespace {
SimConfig vdp_config(double eps, double s_c_minus, double s_c_plus) {
    SimConfig cfg;
    cfg.eps = eps;
    std::tie(cfg.x_sigma_minus, cfg.x_sigma_plus) = default_sections(oracle::vdp(), s_c_minus, s_c_plus);
    return cfg;
}
}  // namespace

TEST_CASE("control value for the tunnel configuration") {
    const auto sys = oracle::vdp();
    const auto cfg = vdp_config(0.01, 0.05, 0.1);
    const auto c = find_control_lambda(sys, cfg, 0.05, 0.1, default_bracket(0.01));
    CHECK(std::abs(c.lambda_c / (-231.0 / 20000) - 1) < 0.05);
    CHECK(std::abs(c.exit_height - 0.1) <= 1e-8);

    const auto at = transition_map(sys, cfg, c.lambda_c, 0.05);
    REQUIRE(at.outcome == Outcome::crossed);
    CHECK(at.s_plus == Approx(0.1).epsilon(1e-6));
    CHECK(std::abs(at.state[0] - cfg.x_sigma_plus) <= 1e-10);

    const auto low = transition_map(sys, cfg, -0.02, 0.05);
    CHECK(low.outcome == Outcome::crossed);
    CHECK(low.s_plus < 0.1);
    const auto high = transition_map(sys, cfg, 0.0, 0.05);
    CHECK((high.outcome != Outcome::crossed || high.s_plus > 0.1));

    auto tight = cfg;
    tight.abs_tol /= 2;
    tight.rel_tol /= 2;
    const auto c2 = find_control_lambda(sys, tight, 0.05, 0.1, default_bracket(0.01));
    CHECK(std::abs(c2.lambda_c / c.lambda_c - 1) < 1e-6);

    CHECK_THROWS_AS(find_control_lambda(sys, cfg, 0.05, 0.1, {0.001, 0.01}), BracketError);
}

TEST_CASE("frozen slow variable") {
    auto cfg = vdp_config(0.01, 0.05, 0.1);
    cfg.eps = 0.0;
    cfg.max_time = 50.0;
    const auto r = transition_map(oracle::vdp(), cfg, 0.0, 0.05);
    CHECK(r.outcome == Outcome::budget_exhausted);
    CHECK(r.state[1] == 0.05);
    CHECK(r.state[0] == Approx(oracle::vdp_omega(0.05)).epsilon(1e-6));
    CHECK_THROWS_AS(check_config(oracle::vdp(), cfg), ValidationError);
}

TEST_CASE("transition map converges to the slow relation") {
    const auto sys = oracle::vdp();
    auto sdi = oracle::evaluator(sys);
    const Interval L{1.0 / 30 - 1.0 / 150, 1.0 / 20};
    const auto rel = SlowRelation::two_section(sdi, 0.05, 0.1, L);
    double sup_gap[2] = {0.0, 0.0};
    int k = 0;
    for (double eps : {0.01, 0.005}) {
        const auto cfg = vdp_config(eps, 0.05, 0.1);
        const auto c = find_control_lambda(sys, cfg, 0.05, 0.1, default_bracket(eps));
        double prev = -1.0;
        for (int i = 0; i < 20; ++i) {
            const double s = L.lo + L.width() * i / 19;
            const auto r = transition_map(sys, cfg, c.lambda_c, s);
            REQUIRE(r.outcome == Outcome::crossed);
            CHECK(r.s_plus > prev);
            prev = r.s_plus;
            sup_gap[k] = std::max(sup_gap[k], std::abs(r.s_plus - rel.two_section(s)));
        }
        ++k;
    }
    CHECK(sup_gap[1] <= sup_gap[0]);
}

TEST_CASE("funnel orbits exit near s_c+") {
    const auto sys = oracle::vdp();
    const auto cfg = vdp_config(0.005, 0.1, 1.0 / 7);
    const auto c = find_control_lambda(sys, cfg, 0.1, 1.0 / 7, default_bracket(0.005));
    CHECK(std::abs(c.lambda_c / (-1071435.0 / 200000000) - 1) < 0.05);
    for (double s : {0.07, 0.08, 0.09}) {
        const auto r = transition_map(sys, cfg, c.lambda_c, s);
        REQUIRE(r.outcome == Outcome::crossed);
        CHECK(std::abs(r.s_plus - 1.0 / 7) < 0.005);
    }
}

TEST_CASE("ensembles are deterministic across worker counts") {
    const auto sys = oracle::vdp();
    const auto cfg = vdp_config(0.01, 0.05, 0.1);
    const auto c = find_control_lambda(sys, cfg, 0.05, 0.1, default_bracket(0.01));
    const auto entry = make_entry({EntryKind::uniform, {1.0 / 30 - 1.0 / 150, 1.0 / 20}});
    const auto one = ensemble_transport(sys, cfg, c.lambda_c, entry, 24, 99, 1);
    const auto three = ensemble_transport(sys, cfg, c.lambda_c, entry, 24, 99, 3);
    CHECK(one.entry.values == three.entry.values);
    for (std::size_t i = 0; i < 24; ++i) {
        CHECK(one.outcomes[i] == three.outcomes[i]);
        CHECK(std::memcmp(&one.exit_height[i], &three.exit_height[i], sizeof(double)) == 0);
    }
    CHECK(one.exits().size() + one.failures() == one.entry.count());
    CHECK_FALSE(one.flagged());

    const auto single = ensemble_transport(sys, cfg, c.lambda_c, entry, 1, 5, 2);
    const auto direct = transition_map(sys, cfg, c.lambda_c, single.entry.values[0]);
    CHECK(single.exit_height[0] == direct.s_plus);
}

TEST_CASE("step size collapse is reported with the last state") {
    auto cfg = vdp_config(0.01, 0.05, 0.1);
    cfg.abs_tol = 1e-300;
    cfg.rel_tol = 1e-300;
    try {
        transition_map(oracle::vdp(), cfg, -0.01, 0.05);
        FAIL("expected a stiffness error");
    } catch (const StiffnessError& e) {
        CHECK(std::isfinite(e.state()[0]));
    }
}
