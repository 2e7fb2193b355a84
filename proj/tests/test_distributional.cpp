#include <doctest.h>

#include <cmath>
#include <string>

#include "xwarp/errors.hpp"
#include "xwarp/distributional.hpp"

using namespace xwarp;

namespace {

constexpr double k4Pi2 = 4.0 * kPi * kPi;
// Reduced pairings of the beta = 2 extreme member, mpmath at 30 digits.
constexpr double kPairT2 = 383.22343759143222190;       // P(t) = t^2
constexpr double kPairOnePlusT = 412.73985082629122217;  // P(t) = 1 + t
// Total scalar curvature of the a = 0.25, beta = 2 member.
constexpr double kTotalQuarter = 376.05101237036831767;

}  // namespace

TEST_SUITE("distributional") {

TEST_CASE("test profiles") {
    const auto u = TestProfile::polynomial({1.0, -2.0, 3.0}, "q");
    CHECK(u.profile(0.5) == doctest::Approx(1 - 1 + 0.75));
    CHECK(u.profile_derivative(0.5) == doctest::Approx(-2 + 3));
    CHECK(u.nonnegative());
    CHECK(u.id() == "q");
    CHECK_FALSE(TestProfile::polynomial({0.0, 1.0}).nonnegative());
    const double r = 0.9, h = 1e-5;
    const double fd = (u.u_bar(std::cos(r + h)) - u.u_bar(std::cos(r - h))) / (2 * h);
    CHECK(u.du_bar(std::sin(r), std::cos(r)) == doctest::Approx(fd).epsilon(1e-8));
    CHECK(u.u_bar(1.0) == doctest::Approx(k4Pi2 * 2.0));
}

TEST_CASE("pointwise ingredients") {
    const WarpParams p(0.1, 2.0);
    const double r = 0.7;
    const WarpJet j = warp_jet(p, r);
    const LLData d = ll_data(p, r);
    CHECK(d.gamma_r_phiphi == doctest::Approx(-j.f * j.df));
    CHECK(d.gamma_phi_rphi == doctest::Approx(j.df / j.f));
    CHECK(d.v_r == doctest::Approx(-2 * j.df / j.f));
    CHECK(d.f_val == doctest::Approx(2 - 2 * (j.df / j.f) * (j.df / j.f)));
    CHECK(d.density == doctest::Approx(j.f));
    CHECK(d.background.gamma_r_thth == doctest::Approx(-std::sin(r) * std::cos(r)));
    CHECK(d.background.gamma_th_rth == doctest::Approx(std::cos(r) / std::sin(r)));
    CHECK_THROWS_AS(ll_data(p, 0.0), DomainError);
}

TEST_CASE("pairings against high-precision references") {
    const auto ex = WarpParams::extreme(2.0);
    const auto t2 = TestProfile::polynomial({0.0, 0.0, 1.0});
    const auto lin = TestProfile::polynomial({1.0, 1.0});
    for (auto m : {PairingMethod::Reduced, PairingMethod::Ibp}) {
        CHECK(std::abs(scalar_distribution(ex, t2, m).value - kPairT2) < 1e-8);
        CHECK(std::abs(scalar_distribution(ex, lin, m).value - kPairOnePlusT) < 1e-8);
    }
    CHECK_THROWS_AS(scalar_distribution({0.1, 2.0}, t2, PairingMethod::Reduced), DomainError);
}

TEST_CASE("REDUCED and IBP agree on a mixed battery") {
    const auto battery = profile_battery(7, 10);
    REQUIRE(battery.size() == 10);
    for (double beta : {2.0, 3.0, 5.0}) {
        const auto ex = WarpParams::extreme(beta);
        for (const auto& u : battery) {
            const double a = scalar_distribution(ex, u, PairingMethod::Reduced).value;
            const double b = scalar_distribution(ex, u, PairingMethod::Ibp).value;
            CHECK(std::abs(a - b) < 1e-6);
            if (u.nonnegative()) CHECK(a >= -1e-8);
        }
    }
}

TEST_CASE("battery shape and determinism") {
    const auto x = profile_battery(3, 6), y = profile_battery(3, 6);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(x[i].id() == y[i].id());
        CHECK(x[i].profile(0.3) == y[i].profile(0.3));
        if (i % 2 == 0) CHECK(x[i].nonnegative());
    }
}

TEST_CASE("totals") {
    for (double beta : {2.0, 3.0, 5.0}) {
        const double total = total_scalar(WarpParams::extreme(beta)).value;
        CHECK(total ==
              doctest::Approx(k4Pi2 * (4 * beta + 8 - 4 * std::log(4.0))).epsilon(1e-13));
        CHECK(std::abs(total - regular_part_total(beta) - 8 * k4Pi2) < 1e-8);
    }
    const WarpParams q(0.25, 2.0);
    CHECK(std::abs(total_scalar(q).value - kTotalQuarter) < 1e-8);
    CHECK(std::abs(total_scalar_direct(q).value - kTotalQuarter) < 1e-8);
    CHECK_THROWS_AS(total_scalar_direct(WarpParams::extreme(2.0)), DomainError);
}

TEST_CASE("the pairing with u = 1 is the total") {
    const auto ex = WarpParams::extreme(3.0);
    const double a = scalar_distribution(ex, TestProfile::constant(1.0), PairingMethod::Ibp).value;
    CHECK(a == doctest::Approx(total_scalar(ex).value).epsilon(1e-12));
}

TEST_CASE("split probe") {
    const auto probe = ll_split_probe(2.0, TestProfile::constant(1.0), default_eps_sequence());
    CHECK(probe.first.kind == GrowthKind::DoubleLog);
    CHECK(probe.first.fit_quality > 0.99);
    CHECK(probe.second.fit_quality > 0.99);
    CHECK(probe.max_cancellation_error < 1e-8);
    // The halves grow like +- 8 (2 pi)^2 ln(f), cancelling in the sum.
    CHECK(probe.first.coefficient == doctest::Approx(8 * k4Pi2).epsilon(2e-2));
    CHECK(probe.second.coefficient == doctest::Approx(-8 * k4Pi2).epsilon(2e-2));
    for (std::size_t k = 0; k < probe.reduced.size(); ++k) {
        CHECK(std::abs(probe.first.truncated[k] + probe.second.truncated[k] - probe.reduced[k]) <
              1e-8);
    }
    CHECK_THROWS_AS(ll_split_probe(2.0, TestProfile::polynomial({0.0, 1.0}), default_eps_sequence()),
                    ConfigError);
    CHECK_THROWS_AS(
        ll_split_probe(2.0, TestProfile::polynomial({1.0, 0.0, -1.0}), default_eps_sequence()),
        ConfigError);
}

TEST_CASE("split kernel") {
    const auto one = TestProfile::constant(1.0);
    const double r = 0.4, s = std::sin(r), c = std::cos(r);
    const double f = -2 * std::log(s) + 2.0;
    CHECK(split_h(2.0, one, s, c) == doctest::Approx(c * c / s * k4Pi2 / f));
}

TEST_CASE("golden CSV") {
    const std::string csv = golden_csv({{"p0", 2.0, PairingMethod::Reduced, 1.5}});
    CHECK(csv.rfind("# ", 0) == 0);
    CHECK(csv.find("\nprofile_id,beta,method,value\n") != std::string::npos);
    CHECK(csv.find("p0,2,REDUCED,1.5\n") != std::string::npos);
}

}
