#include <doctest.h>

#include <cmath>

#include "canard/errors.hpp"
#include "canard/expr.hpp"

using canard::RealExpr;

TEST_CASE("parse and evaluate") {
    CHECK(RealExpr::parse("x^2/2 + x^3/3")(1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(RealExpr::parse("x")(0.3) == 0.3);
    CHECK(RealExpr::parse("x^4")(-0.5) == 0.0625);
    CHECK(RealExpr::parse("-(x - 1)*2.5e-1")(3.0) == doctest::Approx(-0.5));
}

TEST_CASE("syntax errors carry a position") {
    auto position_of = [](const char* text) -> long {
        try {
            RealExpr::parse(text);
        } catch (const canard::ParseError& e) {
            return static_cast<long>(e.position());
        }
        return -1;
    };
    CHECK(position_of("x +") >= 0);
    CHECK(position_of("x ^ 1.5") >= 0);
    CHECK(position_of("x ^ -2") >= 0);
    CHECK(position_of("(x + 1") >= 0);
    CHECK(position_of("y") == 0);
    CHECK(position_of("x / 0") >= 0);
}

TEST_CASE("division by zero at evaluation") {
    const auto e = RealExpr::parse("1/x");
    CHECK(e(2.0) == 0.5);
    CHECK_THROWS_AS(e(0.0), canard::SingularityError);
}

TEST_CASE("symbolic derivative matches central differences") {
    for (const char* text : {"x^2/2 + x^3/3", "x^4 - 3*x", "(x + 1)/(x^2 + 2)", "-(x^3) * (2 - x)"}) {
        const auto e = RealExpr::parse(text);
        const auto d = e.derivative();
        for (double x : {-0.7, -0.1, 0.25, 1.3}) {
            const double h = 1e-5;
            const double fd = (e(x + h) - e(x - h)) / (2 * h);
            CHECK(d(x) == doctest::Approx(fd).epsilon(1e-8));
        }
    }
}

TEST_CASE("printing round-trips") {
    for (const char* text : {"x^2/2 + x^3/3", "-x + 0.1*x^5", "(x - 2)/(x + 3)", "1e-3 - x"}) {
        const auto e = RealExpr::parse(text);
        const auto back = RealExpr::parse(e.to_string());
        for (double x : {-1.5, 0.0, 0.75}) CHECK(back(x) == e(x));
    }
}
