#include <doctest.h>

#include <cmath>
#include <string>

#include "xwarp/errors.hpp"
#include "xwarp/geodesics.hpp"

using namespace xwarp;

TEST_SUITE("geodesics") {

TEST_CASE("polyline geometry") {
    const Curve c = polyline({{0, 0, 0}, {1, 0, 0}, {1, 2, 0}});
    CHECK(c.position(0.0).r == 0.0);
    CHECK(c.position(0.5).r == doctest::Approx(1.0));
    CHECK(c.position(1.0).theta == doctest::Approx(2.0));
    CHECK(c.velocity(0.75).theta == doctest::Approx(4.0));
    REQUIRE(c.breaks.size() == 1);
    CHECK(c.breaks[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(polyline({{0, 0, 0}}), ConfigError);
}

TEST_CASE("lengths of coordinate curves") {
    const WarpParams p(0.3, 2.0);
    const double r0 = 1.0;
    CHECK(path_length(p, coordinate_segment({r0, 0, 0}, {r0, 1.5, 0})) ==
          doctest::Approx(std::sin(r0) * 1.5).epsilon(1e-10));
    CHECK(path_length(p, coordinate_segment({r0, 0, 0}, {r0, 0, 0.7})) ==
          doctest::Approx(warp_eval(p, r0, 0) * 0.7).epsilon(1e-10));
    CHECK(path_length(p, coordinate_segment({0.2, 1, 1}, {2.0, 1, 1})) ==
          doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("anchored path realises the closed-form bound") {
    const WarpParams p(0.05, 3.0);
    const Point3 a = Point3::make(0.4, 1.0, 0.3), b = Point3::make(2.0, 5.5, 2.0);
    CHECK(upper_bound_distance(p, a, b) <= path_length(p, anchored_path(a, b)) + 1e-9);
}

TEST_CASE("invariants are conserved") {
    for (double a : {0.5, 1e-3}) {
        const WarpParams p(a, 2.0);
        const GeodesicState s{0.8, 0.1, 0.2, 0.3, 0.9, 0.15};
        const Trajectory t = geodesic_integrate(p, s, 10.0);
        CHECK(t.t.back() == doctest::Approx(10.0));
        CHECK(t.max_invariant_drift(p) < 1e-9);
    }
}

TEST_CASE("equatorial circles are geodesics") {
    const WarpParams p(0.2, 2.5);
    const Trajectory t = geodesic_integrate(p, {kPi / 2, 0.0, 0.0, 0.0, 1.0, 0.0}, 3.0);
    CHECK(t.states.back().r == doctest::Approx(kPi / 2).epsilon(1e-10));
    CHECK(t.states.back().theta == doctest::Approx(3.0).epsilon(1e-10));
    const Trajectory u = geodesic_integrate(p, {kPi / 2, 0.0, 0.0, 0.0, 0.0, 1.0 / 2.5}, 4.0);
    CHECK(u.states.back().phi == doctest::Approx(4.0 / 2.5).epsilon(1e-10));
    CHECK(u.states.back().r == doctest::Approx(kPi / 2).epsilon(1e-10));
}

TEST_CASE("brackets contain exact distances") {
    // Same phi: the phi-sphere through both points is totally geodesic and
    // the metric dominates the round one, so d equals the sphere distance.
    const WarpParams p(0.1, 2.0);
    const Point3 a = Point3::make(0.7, 0.2, 1.0), b = Point3::make(2.1, 2.9, 1.0);
    const auto est = distance_estimate(p, a, b);
    const double exact = sphere_distance(a, b);
    CHECK(est.lower <= exact + 1e-9);
    CHECK(est.upper >= exact - 1e-9);
    CHECK(est.converged);
    // Equator points with the same theta: d = beta * dphi, since f >= beta.
    const Point3 c = Point3::make(kPi / 2, 1.0, 0.5), d = Point3::make(kPi / 2, 1.0, 2.0);
    const auto eq = distance_estimate(p, c, d);
    CHECK(eq.lower <= 2.0 * 1.5 + 1e-9);
    CHECK(eq.upper >= 2.0 * 1.5 - 1e-9);
    CHECK(eq.upper - eq.lower < 1e-6);
}

TEST_CASE("bounds are ordered and brackets are tight") {
    std::uint64_t state = 11;
    const WarpParams p(1e-2, 3.0);
    for (int i = 0; i < 6; ++i) {
        const Point3 a = random_point(state), b = random_point(state);
        CHECK(lower_bound_distance(p, a, b) <= upper_bound_distance(p, a, b) + 1e-12);
        const auto est = distance_estimate(p, a, b);
        CHECK(est.lower <= est.upper);
        CHECK(est.lower >= lower_bound_distance(p, a, b) - 1e-12);
        CHECK(est.upper <= upper_bound_distance(p, a, b) + 1e-12);
        CHECK(est.converged == (est.upper - est.lower < 1e-2));
    }
}

TEST_CASE("distances grow as a decreases") {
    std::uint64_t state = 5;
    for (int i = 0; i < 3; ++i) {
        const Point3 a = random_point(state, 1e-3), b = random_point(state, 1e-3);
        const auto coarse = distance_estimate({0.5, 2.0}, a, b);
        const auto fine = distance_estimate({1e-3, 2.0}, a, b);
        CHECK(fine.upper >= coarse.lower - 1e-9);
    }
}

TEST_CASE("diameter bound") {
    for (double beta : {2.0, 5.0}) {
        for (double a : {0.5, 1e-3, 0.0}) {
            CHECK(diameter_estimate({a, beta}, 100, 3) <= (3 + 2 * beta) * kPi);
        }
    }
}

TEST_CASE("seeded sampling") {
    std::uint64_t s1 = 42, s2 = 42;
    for (int i = 0; i < 20; ++i) {
        const Point3 a = random_point(s1, 0.1), b = random_point(s2, 0.1);
        CHECK(a.r == b.r);
        CHECK(a.phi == b.phi);
        CHECK(a.r >= 0.1);
        CHECK(a.r <= kPi - 0.1);
    }
}

TEST_CASE("pole handling of the extreme member") {
    const auto ex = WarpParams::extreme(2.0);
    CHECK_THROWS_AS(distance_estimate(ex, Point3::make(0.0, 0, 0), Point3::make(1, 1, 1)),
                    DomainError);
    CHECK_THROWS_AS(geodesic_integrate(ex, {0.0, 0, 0, 1, 0, 0}, 1.0), DomainError);
}

TEST_CASE("distance CSV") {
    DistanceRow row{Point3::make(1, 2, 3), Point3::make(1, 2, 3), {}};
    row.estimate.converged = true;
    const std::string csv = distance_csv({row});
    CHECK(csv.rfind("r1,theta1,phi1,r2,theta2,phi2,lower,upper,converged\n", 0) == 0);
    CHECK(csv.substr(csv.size() - 2) == "1\n");
}

}
