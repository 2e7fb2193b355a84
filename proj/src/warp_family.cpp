#include "xwarp/warp_family.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xwarp/errors.hpp"

namespace xwarp {

WarpParams::WarpParams(double a, double beta) : a_(a), beta_(beta) {
    if (!std::isfinite(a) || a < 0.0) {
        throw ConfigError("warp parameter a must be finite and >= 0, got " + std::to_string(a));
    }
    if (!std::isfinite(beta) || beta < 2.0) {
        throw ConfigError("warp parameter beta must be finite and >= 2, got " +
                          std::to_string(beta));
    }
}

void ParamSchedule::validate() const {
    if (!std::isfinite(a0) || a0 <= 0.0) {
        throw ConfigError("schedule a0 must be > 0");
    }
    if (!std::isfinite(ratio) || ratio <= 0.0 || ratio >= 1.0) {
        throw ConfigError("schedule ratio must lie in (0, 1)");
    }
    if (count < 1) {
        throw ConfigError("schedule count must be positive");
    }
}

double wrap_angle(double x) {
    double w = std::fmod(x, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a tiny negative number can round up to exactly 2 pi.
    if (w >= kTwoPi) w = 0.0;
    return w;
}

double circle_distance(double x, double y) {
    const double d = std::fabs(wrap_angle(x) - wrap_angle(y));
    return d > kPi ? kTwoPi - d : d;
}

double clamp_radius(double r) {
    if (!(r >= -kRadiusClampTol && r <= kPi + kRadiusClampTol)) {
        throw DomainError("radial coordinate outside [0, pi]: " + std::to_string(r));
    }
    if (r < 0.0) return 0.0;
    if (r > kPi) return kPi;
    return r;
}

Point3 Point3::make(double r, double theta, double phi) {
    return Point3{clamp_radius(r), wrap_angle(theta), wrap_angle(phi)};
}

double log_sin2_plus_a(double r, double a) {
    return log_sin2_plus_a_trig(std::sin(r), std::cos(r), a);
}

double log_sin2_plus_a_trig(double s, double c, double a) {
    const double c2 = c * c;
    if (c2 < 0.5) return std::log1p(a - c2);
    if (a == 0.0) return 2.0 * std::log(std::fabs(s));
    return std::log(s * s + a);
}

namespace {

void check_pole(const WarpParams& p, double r) {
    if (p.is_extreme() && (r == 0.0 || r == kPi)) {
        throw DomainError("extreme warping function is singular at the poles");
    }
}

}  // namespace

WarpJet warp_jet(const WarpParams& p, double r) {
    r = clamp_radius(r);
    check_pole(p, r);
    return warp_jet_trig(p, std::sin(r), std::cos(r));
}

WarpJet warp_jet_trig(const WarpParams& p, double s, double c) {
    const double a = p.a();
    if (p.is_extreme() && s == 0.0) {
        throw DomainError("extreme warping function is singular at the poles");
    }
    WarpJet jet{};
    jet.f = std::log1p(a) - log_sin2_plus_a_trig(s, c, a) + p.beta();
    if (p.is_extreme()) {
        const double cot = c / s;
        jet.df = -2.0 * cot;
        jet.d2f = 2.0 + 2.0 * cot * cot;
    } else {
        const double s2 = s * s;
        const double den = s2 + a;
        jet.df = -2.0 * c * s / den;
        jet.d2f = 4.0 * c * c * s2 / (den * den) - 2.0 * c * c / den + 2.0 * s2 / den;
    }
    return jet;
}

double warp_eval(const WarpParams& p, double r, int order) {
    if (order < 0 || order > 2) {
        throw std::invalid_argument("warp_eval order must be 0, 1 or 2");
    }
    const WarpJet jet = warp_jet(p, r);
    switch (order) {
        case 0: return jet.f;
        case 1: return jet.df;
        default: return jet.d2f;
    }
}

double pole_chart_check(const WarpParams& p, double r_tilde, double theta_tilde) {
    if (p.is_extreme()) {
        throw DomainError("pole chart check requires a smooth member (a > 0)");
    }
    const double st = std::sin(r_tilde);
    const double ct = std::cos(theta_tilde);
    const double cos_r = std::clamp(st * ct, -1.0, 1.0);
    const double r = std::acos(cos_r);

    const double f = warp_eval(p, r, 0);
    const double f_chart =
        std::log((1.0 + p.a()) / (1.0 - st * st * ct * ct + p.a())) + p.beta();
    return std::fabs(f - f_chart);
}

std::vector<WarpParams> schedule_gen(const ParamSchedule& schedule, double beta) {
    schedule.validate();
    std::vector<WarpParams> out;
    out.reserve(static_cast<std::size_t>(schedule.count));
    double a = schedule.a0;
    for (int j = 0; j < schedule.count; ++j) {
        if (!(a > 0.0)) throw ConfigError("schedule underflows to a = 0");
        out.emplace_back(a, beta);
        a *= schedule.ratio;
    }
    return out;
}

}  // namespace xwarp
