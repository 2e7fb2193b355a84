#include "xwarp/distributional.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "xwarp/curvature.hpp"
#include "xwarp/errors.hpp"
#include "xwarp/measures.hpp"

namespace xwarp {

namespace {

constexpr double kFourPi2 = 4.0 * kPi * kPi;

double horner(const std::vector<double>& c, double t) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
    return v;
}

std::vector<double> derivative_coeffs(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
    return d;
}

std::vector<double> poly_mul(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    }
    return out;
}

void require_extreme(const WarpParams& params, const char* what) {
    if (!params.is_extreme()) {
        throw DomainError(std::string(what) + " is defined for the extreme member only");
    }
}

QuadResult scaled(QuadResult q, double factor) {
    q.value *= factor;
    q.err_est *= factor;
    return q;
}

}  // namespace

TestProfile::TestProfile(std::function<double(double)> p, std::function<double(double)> dp,
                         bool nonnegative, std::string id)
    : p_(std::move(p)), dp_(std::move(dp)), nonnegative_(nonnegative), id_(std::move(id)) {}

TestProfile TestProfile::polynomial(std::vector<double> coeffs, std::string id) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    bool nonneg = true;
    constexpr int kSamples = 20001;
    for (int i = 0; i < kSamples && nonneg; ++i) {
        const double t = -1.0 + 2.0 * i / (kSamples - 1);
        if (horner(coeffs, t) < 0.0) nonneg = false;
    }
    std::vector<double> d = derivative_coeffs(coeffs);
    return TestProfile([coeffs](double t) { return horner(coeffs, t); },
                       [d](double t) { return horner(d, t); }, nonneg, std::move(id));
}

TestProfile TestProfile::custom(std::function<double(double)> p, std::function<double(double)> dp,
                                bool nonnegative, std::string id) {
    return TestProfile(std::move(p), std::move(dp), nonnegative, std::move(id));
}

double TestProfile::u_bar(double c) const { return kFourPi2 * p_(c); }

double TestProfile::du_bar(double s, double c) const { return -kFourPi2 * s * dp_(c); }

LLData ll_data(const WarpParams& params, double r) {
    r = clamp_radius(r);
    if (!(r > 0.0 && r < kPi)) throw DomainError("Lee-LeFloch data are singular at the poles");
    const WarpJet j = warp_jet(params, r);
    const double s = std::sin(r), c = std::cos(r);
    const double q = j.df / j.f;
    return {-j.f * j.df, q, -2.0 * q, 2.0 - 2.0 * q * q, j.f, {-s * c, c / s}};
}

const char* to_string(PairingMethod m) {
    return m == PairingMethod::Reduced ? "REDUCED" : "IBP";
}

QuadResult scalar_distribution(const WarpParams& params, const TestProfile& u,
                               PairingMethod method, double tol) {
    require_extreme(params, "the distributional pairing");
    if (method == PairingMethod::Reduced) {
        return polar_integral(
            [&](double s, double c) {
                const double f = warp_jet_trig(params, s, c).f;
                return -4.0 * c * u.du_bar(s, c) + 2.0 * u.u_bar(c) * f * s;
            },
            tol);
    }
    const double beta = params.beta();
    QuadResult q = polar_integral(
        [&](double s, double c) {
            return ((2.0 * beta - 4.0) - 4.0 * std::log(s)) * s * u.u_bar(c);
        },
        tol);
    q.value += 4.0 * u.u_bar(1.0) + 4.0 * u.u_bar(-1.0);
    return q;
}

QuadResult total_scalar(const WarpParams& params, double tol) {
    return scaled(polar_integral(
                      [&](double s, double c) { return 2.0 * s * warp_jet_trig(params, s, c).f; },
                      tol / kFourPi2),
                  kFourPi2);
}

QuadResult total_scalar_direct(const WarpParams& params, double tol) {
    if (params.is_extreme()) {
        throw DomainError("the classical total scalar curvature needs a smooth member");
    }
    return scaled(integrate(
                      [&](double r) {
                          return scalar_curvature(params, r) * warp_eval(params, r, 0) *
                                 std::sin(r);
                      },
                      0.0, kPi, tol / kFourPi2),
                  kFourPi2);
}

double regular_part_total(double beta, double tol) {
    const WarpParams limit = WarpParams::extreme(beta);
    return kFourPi2 * integrate(
                          [&](double r) {
                              return scalar_curvature(limit, r) * warp_eval(limit, r, 0) *
                                     std::sin(r);
                          },
                          0.0, kPi, tol / kFourPi2)
                          .value;
}

double split_h(double beta, const TestProfile& u, double s, double c) {
    const WarpParams limit = WarpParams::extreme(beta);
    return c * c / s * u.u_bar(c) / warp_jet_trig(limit, s, c).f;
}

SplitProbe ll_split_probe(double beta, const TestProfile& u, const std::vector<double>& eps,
                          double tol) {
    if (!u.nonnegative()) throw ConfigError("split probe needs a nonnegative profile");
    if (u.profile(1.0) == 0.0 && u.profile(-1.0) == 0.0) {
        throw ConfigError("split probe needs a profile that is nonzero at a pole");
    }
    const WarpParams limit = WarpParams::extreme(beta);
    auto first = [&](double s, double c) {
        return -4.0 * c * u.du_bar(s, c) + 8.0 * split_h(beta, u, s, c);
    };
    auto second = [&](double s, double c) {
        return 2.0 * u.u_bar(c) * warp_jet_trig(limit, s, c).f * s - 8.0 * split_h(beta, u, s, c);
    };
    auto reduced = [&](double s, double c) {
        return -4.0 * c * u.du_bar(s, c) + 2.0 * u.u_bar(c) * warp_jet_trig(limit, s, c).f * s;
    };

    ProbeSpec spec;
    spec.kind = GrowthKind::DoubleLog;
    spec.beta = beta;
    spec.side = TruncationSide::Both;
    spec.tol = tol;
    SplitProbe out;
    out.first = polar_probe(first, eps, spec);
    out.second = polar_probe(second, eps, spec);
    spec.kind = GrowthKind::Constant;
    out.reduced = polar_probe(reduced, eps, spec).truncated;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const double gap = std::abs(out.first.truncated[k] + out.second.truncated[k] - out.reduced[k]);
        out.max_cancellation_error = std::max(out.max_cancellation_error, gap);
    }
    return out;
}

std::vector<TestProfile> profile_battery(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> degree(0, 3);
    std::vector<TestProfile> out;
    for (int i = 0; i < count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "poly%02d", i);
        std::vector<double> c;
        if (i % 2 == 0) {
            // q(t)^2 + k, degree <= 6.
            std::vector<double> q(static_cast<std::size_t>(degree(rng)) + 1);
            for (double& x : q) x = coef(rng);
            c = poly_mul(q, q);
            c[0] += 0.5 * (coef(rng) + 1.0);
        } else {
            c.resize(static_cast<std::size_t>(2 * degree(rng)) + 1);
            for (double& x : c) x = coef(rng);
        }
        out.push_back(TestProfile::polynomial(std::move(c), id));
    }
    return out;
}

std::string golden_csv(const std::vector<GoldenPairing>& rows) {
    std::ostringstream out;
    out << "# xwarp pairing goldens v1\n";
    out << "profile_id,beta,method,value\n";
    char buf[200];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%s,%.17g\n", row.profile_id.c_str(), row.beta,
                      to_string(row.method), row.value);
        out << buf;
    }
    return out.str();
}

}  // namespace xwarp
