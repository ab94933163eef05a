#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "canard/errors.hpp"
#include "canard/sdi.hpp"
#include "oracles.hpp"

using namespace canard;
using doctest::Approx;

TEST_CASE("branch roots") {
    const SdiEvaluator vdp(oracle::vdp());
    CHECK(vdp.branch_root(0.054, Branch::attracting) == Approx(0.3).epsilon(1e-13));
    const double a = vdp.branch_root(0.054, Branch::repelling);
    CHECK(a == Approx(oracle::vdp_alpha(0.054)).epsilon(1e-13));
    CHECK(a == Approx(-0.3803).epsilon(1e-3));
    for (double s : {1e-6, 0.01, 0.054, 0.15}) {
        for (auto side : {Branch::attracting, Branch::repelling}) {
            const double x = vdp.branch_root(s, side);
            CHECK(std::abs(oracle::vdp_f(x) - s) <= 1e-14 * std::max(1.0, s));
            CHECK((side == Branch::attracting ? x > 0 : x < 0));
        }
    }
    const SdiEvaluator q(oracle::quartic());
    CHECK(q.branch_root(0.0016, Branch::attracting) == Approx(0.2).epsilon(1e-13));
    CHECK(q.branch_root(0.0016, Branch::repelling) == Approx(-0.2).epsilon(1e-13));
    CHECK_THROWS_AS(vdp.branch_root(0.2, Branch::repelling), RangeError);
    CHECK_THROWS_AS(vdp.branch_root(-0.1, Branch::attracting), RangeError);
}

TEST_CASE("integrand") {
    const SdiEvaluator vdp(oracle::vdp());
    CHECK(vdp.integrand(0.3) == Approx(-0.507).epsilon(1e-14));
    CHECK(vdp.integrand(0.0) == 0.0);
    const SdiEvaluator q(oracle::quartic());
    CHECK(q.integrand(0.5) == Approx(-2.0).epsilon(1e-14));
    CHECK(q.integrand(0.0) == 0.0);
}

TEST_CASE("van der Pol integrals against the antiderivative") {
    const SdiEvaluator vdp(oracle::vdp());
    CHECK(vdp.minus(0.054) == Approx(-0.065025).epsilon(1e-12));
    CHECK(vdp.plus(0.036) == Approx(0.029025).epsilon(1e-12));
    CHECK(vdp.plus(1.0 / 7) == Approx(0.07957).epsilon(1e-3));
    CHECK(vdp.minus(0.05) == Approx(-0.0599).epsilon(2e-3));
    CHECK(vdp.plus(0.05) == Approx(0.0384).epsilon(2e-3));
    CHECK(vdp.branch_root(0.05, Branch::repelling) == Approx(-0.3632).epsilon(1e-3));
    CHECK(vdp.plus(0.1) == Approx(0.0652).epsilon(2e-3));
    for (int i = 1; i <= 40; ++i) {
        const double s = 0.16 * i / 40;
        CHECK(std::abs(vdp.minus(s) - oracle::vdp_minus(s)) <= 1e-10);
        CHECK(std::abs(vdp.plus(s) - oracle::vdp_plus(s)) <= 1e-10);
    }
}

TEST_CASE("quartic integrals are +-4s") {
    const SdiEvaluator q(oracle::quartic());
    CHECK(q.minus(0.01) == Approx(-0.04).epsilon(1e-12));
    CHECK(q.plus(0.01) == Approx(0.04).epsilon(1e-12));
    CHECK(q.derivative(0.01, Branch::attracting) == Approx(-4.0).epsilon(1e-12));
    for (int i = 1; i <= 50; ++i) {
        const double s = 0.02 * i;
        CHECK(std::abs(q.minus(s) + 4 * s) <= 1e-10);
        CHECK(std::abs(q.total(s)) <= 1e-10);
    }
}

TEST_CASE("closed-form derivatives") {
    const SdiEvaluator vdp(oracle::vdp());
    CHECK(vdp.derivative(0.054, Branch::attracting) == Approx(-1.3).epsilon(1e-12));
    const double h = 1e-5;
    const double fd = (vdp.minus(0.05 + h) - vdp.minus(0.05 - h)) / (2 * h);
    CHECK(std::abs(fd - vdp.derivative(0.05, Branch::attracting)) <= 1e-6);
    for (int i = 1; i <= 50; ++i) {
        const double s = 0.15 * i / 51;
        const double fm = (vdp.minus(s + h) - vdp.minus(s - h)) / (2 * h);
        const double fp = (vdp.plus(s + h) - vdp.plus(s - h)) / (2 * h);
        CHECK(std::abs(fm - vdp.derivative(s, Branch::attracting)) <= 1e-6);
        CHECK(std::abs(fp - vdp.derivative(s, Branch::repelling)) <= 1e-6);
        CHECK(vdp.derivative(s, Branch::attracting) < 0);
        CHECK(vdp.derivative(s, Branch::repelling) > 0);
    }
}

TEST_CASE("signs, monotonicity and vanishing at the contact point") {
    for (const auto& sys : {oracle::vdp(), oracle::quartic(), oracle::one_zero()}) {
        const SdiEvaluator e(sys);
        const double top = std::min(e.max_height(Branch::attracting), e.max_height(Branch::repelling));
        CHECK(std::abs(e.minus(1e-6)) < 1e-5);
        CHECK(std::abs(e.plus(1e-6)) < 1e-5);
        CHECK(std::abs(e.minus(1e-8)) < 1e-6);
        double prev_m = 0.0, prev_p = 0.0;
        for (int i = 1; i <= 60; ++i) {
            const double s = top * i / 60;
            const double m = e.minus(s), p = e.plus(s);
            CHECK(m < 0);
            CHECK(p > 0);
            CHECK(m < prev_m);
            CHECK(p > prev_p);
            prev_m = m;
            prev_p = p;
        }
    }
}

TEST_CASE("van der Pol total is negative") {
    const SdiEvaluator vdp(oracle::vdp());
    for (int i = 1; i < 100; ++i) CHECK(vdp.total(i / 600.0) < 0);
    CHECK(vdp.total(0.05) == Approx(oracle::vdp_minus(0.05) + oracle::vdp_plus(0.05)).epsilon(1e-9));
}

TEST_CASE("concurrent evaluation matches sequential") {
    const SdiEvaluator shared(oracle::vdp());
    const SdiEvaluator fresh(oracle::vdp());
    std::vector<double> grid;
    for (int i = 1; i <= 200; ++i) grid.push_back(0.15 * i / 200);
    std::vector<double> out(grid.size());
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < grid.size(); i += 4) out[i] = shared.total(grid[i]);
        });
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(out[i] == fresh.total(grid[i]));
}
