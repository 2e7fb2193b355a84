#pragma once

#include <numbers>
#include <vector>

namespace xwarp {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Round-off allowance when clamping r into [0, pi].
inline constexpr double kRadiusClampTol = 1e-15;

/// One member of the warping family
///   f(r) = ln((1 + a) / (sin^2 r + a)) + beta,
/// with a >= 0 and beta >= 2. The member a = 0 is the extreme limit
/// f = -2 ln sin r + beta, singular on the polar fibres r = 0 and r = pi.
class WarpParams {
public:
    /// Throws ConfigError when a < 0, beta < 2 or either is non-finite.
    WarpParams(double a, double beta);

    static WarpParams extreme(double beta) { return {0.0, beta}; }

    double a() const noexcept { return a_; }
    double beta() const noexcept { return beta_; }
    bool is_extreme() const noexcept { return a_ == 0.0; }

    friend bool operator==(const WarpParams&, const WarpParams&) = default;

private:
    double a_;
    double beta_;
};

/// Geometric schedule a_j = a0 * ratio^(j-1), j = 1..count.
struct ParamSchedule {
    double a0 = 0.5;
    double ratio = 0.5;
    int count = 12;

    void validate() const;
};

/// A point of S^2 x S^1 in (r, theta, phi) coordinates. Construction clamps r
/// into [0, pi] (within kRadiusClampTol) and wraps both angles into [0, 2 pi).
struct Point3 {
    double r = 0.0;
    double theta = 0.0;
    double phi = 0.0;

    static Point3 make(double r, double theta, double phi);
};

/// Wraps an angle into [0, 2 pi).
double wrap_angle(double x);

/// Geodesic distance on the unit circle between two angles, in [0, pi].
double circle_distance(double x, double y);

/// Validates and clamps a radial coordinate; throws DomainError when r lies
/// outside [0, pi] by more than the round-off tolerance.
double clamp_radius(double r);

/// f, f' or f'' (order 0, 1, 2) of the warping function at r.
/// Throws DomainError for the extreme member at r in {0, pi} and
/// std::invalid_argument for any other order.
double warp_eval(const WarpParams& params, double r, int order);

/// All three derivatives at once; shares the trigonometric work.
struct WarpJet {
    double f;
    double df;
    double d2f;
};
WarpJet warp_jet(const WarpParams& params, double r);

/// The jet from s = sin r >= 0 and c = cos r directly. Lets callers near
/// r = pi pass exact reflected values instead of sin(pi - u) with u rounded.
WarpJet warp_jet_trig(const WarpParams& params, double s, double c);

/// ln(sin^2 r + a) evaluated without cancellation near the equator and
/// without underflow of sin^2 r near the poles.
double log_sin2_plus_a(double r, double a);
double log_sin2_plus_a_trig(double s, double c, double a);

/// Compares f with its expression in the polar chart centred on the
/// equatorial point (pi/2, 0): with cos r = sin(rt) cos(tt) the chart form is
///   ln((1 + a) / (1 - sin^2(rt) cos^2(tt) + a)) + beta.
/// Returns the absolute discrepancy. Requires a > 0.
double pole_chart_check(const WarpParams& params, double r_tilde, double theta_tilde);

/// Expands a schedule into its parameter sequence at fixed beta.
std::vector<WarpParams> schedule_gen(const ParamSchedule& schedule, double beta);

}  // namespace xwarp
