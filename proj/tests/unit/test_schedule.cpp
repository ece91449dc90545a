#include <doctest.h>

#include <cmath>

#include "newton/error.hpp"
#include "newton/recursion.hpp"
#include "newton/schedule.hpp"

using namespace newton;

TEST_CASE("weights") {
    const auto p = WeightSchedule::polynomial(1.0, 1.0);
    CHECK(p.weight(1) == 0.5);
    CHECK(p.weight(3) == 0.25);
    const auto q = WeightSchedule::polynomial(5.0, 0.75);
    CHECK(q.weight(11) == doctest::Approx(std::pow(16.0, -0.75)).epsilon(1e-15));

    const auto pw = WeightSchedule::piecewise(100.0, 500, 1.0, 0.75);
    CHECK(pw.weight(500) == doctest::Approx(1.0 / 600.0).epsilon(1e-15));
    CHECK(pw.weight(501) == doctest::Approx(std::pow(601.0, -0.75)).epsilon(1e-15));
    CHECK(pw.tail_exponent() == 0.75);

    const auto ex = WeightSchedule::explicit_weights({0.5, 0.2});
    CHECK(ex.weight(2) == 0.2);
    CHECK(ex.length() == 2);
    CHECK_THROWS_AS(ex.weight(3), ValidationError);
    CHECK_THROWS_AS(p.weight(0), ValidationError);
}

TEST_CASE("every weight lies in (0,1)") {
    for (const auto& s : {WeightSchedule::polynomial(0.5, 1.0), WeightSchedule::polynomial(1e-3, 0.6),
                          WeightSchedule::piecewise(100.0, 500, 1.0, 0.75)}) {
        for (std::size_t n = 1; n < 5000; n += 7) {
            CHECK(s.weight(n) > 0.0);
            CHECK(s.weight(n) < 1.0);
        }
    }
}

TEST_CASE("summability flags") {
    CHECK(WeightSchedule::polynomial(1.0, 1.0).summable_squares());
    CHECK(WeightSchedule::polynomial(1.0, 0.6).summable_squares());
    CHECK(WeightSchedule::piecewise(100.0, 500, 1.0, 0.75).summable_squares());
    CHECK_FALSE(WeightSchedule::polynomial(1.0, 0.5).summable_squares());
    CHECK_FALSE(WeightSchedule::explicit_weights({0.5}).summable_squares());
}

TEST_CASE("invalid schedules") {
    CHECK_THROWS_AS(WeightSchedule::polynomial(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(WeightSchedule::polynomial(1.0, 1.2), ValidationError);
    CHECK_THROWS_AS(WeightSchedule::polynomial(1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(WeightSchedule::explicit_weights({}), ValidationError);
    CHECK_THROWS_AS(WeightSchedule::explicit_weights({0.5, 1.0}), ValidationError);
    CHECK_THROWS_AS(WeightSchedule::explicit_weights({0.0}), ValidationError);
    CHECK_THROWS_AS(WeightSchedule::polynomial(-0.5, 1.0), ValidationError);
}

TEST_CASE("spec strings") {
    const auto p = WeightSchedule::parse("poly:alpha=1,beta=1");
    CHECK(p == WeightSchedule::polynomial(1.0, 1.0));
    const auto pw = WeightSchedule::parse("piecewise:alpha=100,n0=500,beta1=1,beta2=0.75");
    CHECK(pw == WeightSchedule::piecewise(100.0, 500, 1.0, 0.75));
    const auto ex = WeightSchedule::parse("explicit:w=0.5|0.25|0.1");
    CHECK(ex.weight(3) == 0.1);
    for (const auto& s : {p, pw, ex}) CHECK(WeightSchedule::parse(s.to_spec()) == s);
    CHECK_THROWS_AS(WeightSchedule::parse("poly:beta=1"), ValidationError);
    CHECK_THROWS_AS(WeightSchedule::parse("harmonic"), ValidationError);
}

TEST_CASE("gamma weights") {
    // polynomial beta = 1 gives gamma_k = 1 exactly in exact arithmetic
    for (double alpha : {1.0, 5.0, 100.0}) {
        const auto g = gamma_weights(WeightSchedule::polynomial(alpha, 1.0), alpha, 10000);
        double worst = 0.0;
        for (double v : g) worst = std::max(worst, std::abs(v - 1.0));
        CHECK(worst <= 1e-12);
    }
    CHECK(gamma_weights(WeightSchedule::polynomial(1.0, 1.0), 1.0, 1)[0] == 1.0);
    CHECK_THROWS_AS(gamma_weights(WeightSchedule::polynomial(1.0, 1.0), 1.0, 0), ValidationError);

    // hand recursion for an explicit list
    const auto g = gamma_weights(WeightSchedule::explicit_weights({0.5, 0.25}), 2.0, 2);
    CHECK(g[0] == doctest::Approx(2.0));                    // 0.5 * 2 / 0.5
    CHECK(g[1] == doctest::Approx(0.25 * 4.0 / 0.75));      // 0.25 * (2 + 2) / 0.75
}
