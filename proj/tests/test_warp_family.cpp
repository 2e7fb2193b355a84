#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "xwarp/errors.hpp"
#include "xwarp/warp_family.hpp"

using namespace xwarp;

namespace {

double f_direct(double a, double beta, double r) {
    const double s = std::sin(r);
    return std::log((1.0 + a) / (s * s + a)) + beta;
}

}  // namespace

TEST_SUITE("warp_family") {

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(WarpParams(0.3, 2.0));
    CHECK_NOTHROW(WarpParams(0.0, 7.0));
    CHECK_THROWS_AS(WarpParams(-1e-9, 2.0), ConfigError);
    CHECK_THROWS_AS(WarpParams(0.1, 1.999), ConfigError);
    CHECK_THROWS_AS(WarpParams(NAN, 2.0), ConfigError);
    CHECK_THROWS_AS(WarpParams(0.1, INFINITY), ConfigError);
    CHECK(WarpParams::extreme(3.0).is_extreme());
}

TEST_CASE("schedule expansion") {
    const auto ps = schedule_gen({0.5, 0.5, 12}, 3.0);
    REQUIRE(ps.size() == 12);
    CHECK(ps.front().a() == 0.5);
    CHECK(ps.back().a() == doctest::Approx(0.5 * std::pow(0.5, 11)).epsilon(1e-15));
    for (const auto& p : ps) CHECK(p.beta() == 3.0);
    CHECK_THROWS_AS(schedule_gen({0.5, 1.0, 3}, 2.0), ConfigError);
    CHECK_THROWS_AS(schedule_gen({0.0, 0.5, 3}, 2.0), ConfigError);
    CHECK_THROWS_AS(schedule_gen({0.5, 0.5, 0}, 2.0), ConfigError);
}

TEST_CASE("values against the defining formula") {
    for (double a : {1.0, 0.5, 1e-3, 1e-8}) {
        for (double r : {0.01, 0.3, 1.0, 1.5, 2.5, 3.1}) {
            CHECK(warp_eval({a, 2.5}, r, 0) == doctest::Approx(f_direct(a, 2.5, r)).epsilon(1e-13));
        }
    }
    // Extreme member in its own closed form.
    for (double r : {0.01, 0.7, 2.0}) {
        CHECK(warp_eval(WarpParams::extreme(2.0), r, 0) ==
              doctest::Approx(-2.0 * std::log(std::sin(r)) + 2.0).epsilon(1e-14));
    }
}

TEST_CASE("equator and pole values") {
    for (double a : {0.0, 1e-4, 0.5}) {
        CHECK(warp_eval({a, 3.0}, kPi / 2, 0) == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(std::abs(warp_eval({a, 3.0}, kPi / 2, 1)) < 1e-15);
    }
    const WarpParams p(0.25, 2.0);
    CHECK(warp_eval(p, 0.0, 0) == doctest::Approx(std::log(5.0) + 2.0).epsilon(1e-15));
    CHECK(warp_eval(p, kPi, 0) == doctest::Approx(std::log(5.0) + 2.0).epsilon(1e-15));
    CHECK(warp_eval(p, 0.0, 1) == 0.0);
}

TEST_CASE("derivatives match central differences") {
    const double h = 1e-4;
    for (double a : {0.8, 0.05, 0.0}) {
        const WarpParams p(a, 2.0);
        for (double r : {0.4, 1.0, 1.3, 2.2, 2.9}) {
            const double fd1 = (warp_eval(p, r + h, 0) - warp_eval(p, r - h, 0)) / (2 * h);
            const double fd2 =
                (warp_eval(p, r + h, 0) - 2 * warp_eval(p, r, 0) + warp_eval(p, r - h, 0)) / (h * h);
            CHECK(warp_eval(p, r, 1) == doctest::Approx(fd1).epsilon(1e-7));
            CHECK(warp_eval(p, r, 2) == doctest::Approx(fd2).epsilon(1e-5));
            const WarpJet j = warp_jet(p, r);
            CHECK(j.f == warp_eval(p, r, 0));
            CHECK(j.df == warp_eval(p, r, 1));
            CHECK(j.d2f == warp_eval(p, r, 2));
        }
    }
}

TEST_CASE("reflection symmetry about the equator") {
    for (double a : {0.3, 0.0}) {
        const WarpParams p(a, 2.0);
        for (double r : {0.2, 0.9, 1.4}) {
            CHECK(warp_eval(p, kPi - r, 0) == doctest::Approx(warp_eval(p, r, 0)).epsilon(1e-13));
            CHECK(warp_eval(p, kPi - r, 1) == doctest::Approx(-warp_eval(p, r, 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("monotone in a: the family increases as a decreases") {
    for (double r : {0.05, 0.6, 1.2}) {
        double prev = 0.0;
        for (const auto& p : schedule_gen({0.5, 0.5, 12}, 2.0)) {
            const double v = warp_eval(p, r, 0);
            CHECK(v > prev);
            prev = v;
        }
        CHECK(warp_eval(WarpParams::extreme(2.0), r, 0) > prev);
    }
}

TEST_CASE("trigonometric entry point agrees near pi") {
    const WarpParams p(1e-6, 2.0);
    const double u = 1e-7;  // distance to the south pole
    const WarpJet near = warp_jet_trig(p, std::sin(u), -std::cos(u));
    const WarpJet mirror = warp_jet(p, u);
    CHECK(near.f == doctest::Approx(mirror.f).epsilon(1e-14));
    CHECK(near.df == doctest::Approx(-mirror.df).epsilon(1e-12));
}

TEST_CASE("log(sin^2 + a) without cancellation") {
    CHECK(log_sin2_plus_a(kPi / 2, 1e-12) == doctest::Approx(std::log1p(1e-12)).epsilon(1e-10));
    CHECK(log_sin2_plus_a(1e-200, 0.0) == doctest::Approx(2.0 * std::log(1e-200)).epsilon(1e-14));
}

TEST_CASE("domain errors") {
    const auto ex = WarpParams::extreme(2.0);
    CHECK_THROWS_AS(warp_eval(ex, 0.0, 0), DomainError);
    CHECK_THROWS_AS(warp_eval(ex, kPi, 1), DomainError);
    CHECK_THROWS_AS(warp_eval({0.1, 2.0}, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(warp_eval({0.1, 2.0}, 3.2, 0), DomainError);
    CHECK_THROWS_AS(clamp_radius(-1e-6), DomainError);
    CHECK(clamp_radius(-1e-17) == 0.0);
    CHECK(clamp_radius(kPi + 1e-17) == kPi);
}

TEST_CASE("points and angles") {
    const Point3 p = Point3::make(1.0, -0.5, 7.0);
    CHECK(p.theta == doctest::Approx(kTwoPi - 0.5));
    CHECK(p.phi == doctest::Approx(7.0 - kTwoPi));
    CHECK(wrap_angle(kTwoPi) == 0.0);
    CHECK(circle_distance(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
    CHECK(circle_distance(0.0, kPi) == doctest::Approx(kPi));
}

TEST_CASE("polar chart agrees with the original chart") {
    const WarpParams p(0.2, 2.0);
    for (double rt : {0.1, 0.8, 1.5, 2.6}) {
        for (double tt : {0.0, 1.0, 2.5, 4.0}) CHECK(pole_chart_check(p, rt, tt) < 1e-12);
    }
}

}
