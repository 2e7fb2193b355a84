#include <doctest.h>

#include <cmath>

#include "xwarp/curvature.hpp"
#include "xwarp/errors.hpp"

using namespace xwarp;

namespace {

// Ricci of dr^2 + sin^2 r dtheta^2 + f^2 dphi^2 from the coordinate formula
// R_jk = d_l G^l_jk - d_k G^l_jl + G^l_lm G^m_jk - G^l_km G^m_jl, with the
// metric and Christoffel symbols differentiated numerically. Returns the
// frame eigenvalues R_jj / g_jj.
struct Christoffel {
    double g[3][3][3];
};

void metric(const WarpParams& p, double r, double g[3]) {
    const double s = std::sin(r), f = warp_eval(p, r, 0);
    g[0] = 1.0;
    g[1] = s * s;
    g[2] = f * f;
}

Christoffel christoffel(const WarpParams& p, double r) {
    const double h = 1e-5;
    double gp[3], gm[3], g[3], dg[3];
    metric(p, r + h, gp);
    metric(p, r - h, gm);
    metric(p, r, g);
    for (int i = 0; i < 3; ++i) dg[i] = (gp[i] - gm[i]) / (2 * h);
    Christoffel c{};
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            for (int e = 0; e < 3; ++e) {
                double v = 0.0;
                if (b == 0 && a == e) v += dg[a];
                if (e == 0 && a == b) v += dg[a];
                if (a == 0 && b == e) v -= dg[b];
                c.g[a][b][e] = 0.5 * v / g[a];
            }
        }
    }
    return c;
}

RicciFrame ricci_oracle(const WarpParams& p, double r) {
    const double h = 1e-4;
    const Christoffel c = christoffel(p, r);
    const Christoffel cp = christoffel(p, r + h), cm = christoffel(p, r - h);
    double g[3];
    metric(p, r, g);
    double lam[3];
    for (int j = 0; j < 3; ++j) {
        double rjj = (cp.g[0][j][j] - cm.g[0][j][j]) / (2 * h);
        if (j == 0) {
            for (int l = 0; l < 3; ++l) rjj -= (cp.g[l][j][l] - cm.g[l][j][l]) / (2 * h);
        }
        for (int l = 0; l < 3; ++l) {
            for (int m = 0; m < 3; ++m) {
                rjj += c.g[l][l][m] * c.g[m][j][j] - c.g[l][j][m] * c.g[m][j][l];
            }
        }
        lam[j] = rjj / g[j];
    }
    return {lam[0], lam[1], lam[2]};
}

}  // namespace

TEST_SUITE("curvature") {

TEST_CASE("Ricci frame agrees with the coordinate computation") {
    for (double a : {0.5, 0.01, 0.0}) {
        for (double beta : {2.0, 3.5}) {
            const WarpParams p(a, beta);
            for (double r : {0.3, 0.8, 1.4, 1.9, 2.7}) {
                const RicciFrame got = ricci_frame(p, r);
                const RicciFrame ref = ricci_oracle(p, r);
                const double scale = 1.0 + std::abs(ref.lambda_r);
                CHECK(std::abs(got.lambda_r - ref.lambda_r) < 1e-5 * scale);
                CHECK(std::abs(got.lambda_theta - ref.lambda_theta) < 1e-5 * scale);
                CHECK(std::abs(got.lambda_phi - ref.lambda_phi) < 1e-5 * scale);
            }
        }
    }
}

TEST_CASE("extreme member at beta = 2 in closed form") {
    const auto ex = WarpParams::extreme(2.0);
    for (double r : {0.01, 0.5, 1.0, 2.0, 3.1}) {
        const double s = std::sin(r), d = 1.0 - std::log(s), cot = std::cos(r) / s;
        const RicciFrame ric = ricci_frame(ex, r);
        CHECK(ric.lambda_r == doctest::Approx(1.0 - 1.0 / (s * s * d)).epsilon(1e-13));
        CHECK(ric.lambda_theta == doctest::Approx(1.0 + cot * cot / d).epsilon(1e-13));
        CHECK(ric.lambda_phi == doctest::Approx(-1.0 / d).epsilon(1e-13));
    }
    // lambda_r is unbounded below at the pole.
    CHECK(ricci_frame(ex, 1e-3).lambda_r < -1e5);
}

TEST_CASE("Laplacian against nested differences") {
    const double h = 1e-4;
    for (double a : {0.7, 0.02, 0.0}) {
        const WarpParams p(a, 2.0);
        for (double r : {0.2, 1.1, 2.4}) {
            const auto sfp = [&](double x) { return std::sin(x) * warp_eval(p, x, 1); };
            const double fd = (sfp(r + h) - sfp(r - h)) / (2 * h) / std::sin(r);
            CHECK(laplacian_f(p, r) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
    CHECK(laplacian_f(WarpParams::extreme(4.0), 0.3) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("Laplacian is finite at the poles for a > 0") {
    const WarpParams p(0.1, 2.0);
    CHECK(laplacian_f(p, 0.0) == doctest::Approx(-4.0 / 0.1).epsilon(1e-13));
    CHECK(laplacian_f(p, kPi) == doctest::Approx(-4.0 / 0.1).epsilon(1e-13));
    CHECK(laplacian_f(p, 1e-6) == doctest::Approx(laplacian_f(p, 0.0)).epsilon(1e-8));
    CHECK_THROWS_AS(laplacian_f(WarpParams::extreme(2.0), 0.0), DomainError);
}

TEST_CASE("scalar curvature is the Ricci trace and nonnegative") {
    for (double a : {1.0, 0.1, 1e-4, 0.0}) {
        for (double beta : {2.0, 5.0}) {
            const WarpParams p(a, beta);
            for (int k = 1; k < 200; ++k) {
                const double r = kPi * k / 200;
                const double sc = scalar_curvature(p, r);
                CHECK(sc >= -1e-12);
                CHECK(std::abs(ricci_frame(p, r).trace() - sc) < 1e-9 * (1 + std::abs(sc)));
            }
        }
    }
}

TEST_CASE("extreme scalar curvature is 2 - 4/f") {
    for (double beta : {2.0, 3.0}) {
        const auto ex = WarpParams::extreme(beta);
        for (double r : {0.05, 1.0, 3.0}) {
            const double f = -2 * std::log(std::sin(r)) + beta;
            CHECK(std::abs(scalar_curvature(ex, r) - (2 - 4 / f)) < 1e-12);
        }
    }
}

TEST_CASE("level torus mean curvature is the log derivative of sin f") {
    const double h = 1e-5;
    for (double a : {0.3, 0.0}) {
        const WarpParams p(a, 2.0);
        for (double r : {0.4, 1.2, 2.0, 2.8}) {
            const auto g = [&](double x) { return std::log(std::sin(x) * warp_eval(p, x, 0)); };
            CHECK(mean_curvature_r_torus(p, r) ==
                  doctest::Approx((g(r + h) - g(r - h)) / (2 * h)).epsilon(1e-7));
        }
        CHECK(std::abs(mean_curvature_r_torus(p, kPi / 2)) < 1e-15);
        CHECK(mean_curvature_r_torus(p, 1.0) > 0.0);
        CHECK(mean_curvature_r_torus(p, 2.0) < 0.0);
    }
}

TEST_CASE("frame and mean curvature reject the poles") {
    CHECK_THROWS_AS(ricci_frame({0.1, 2.0}, 0.0), DomainError);
    CHECK_THROWS_AS(mean_curvature_r_torus({0.1, 2.0}, kPi), DomainError);
}

}
