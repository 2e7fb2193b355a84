#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xwarp/quadrature.hpp"
#include "xwarp/warp_family.hpp"

namespace xwarp {

enum class Pole { North, South };

/// Area of the level torus {r = r0}: 4 pi^2 sin(r0) f(r0), zero at the poles.
double level_area(const WarpParams& params, double r0);

/// Total volume, the integral of level_area over [0, pi].
QuadResult volume(const WarpParams& params, double tol = kDefaultQuadTol);

/// Length of the polar fibre, 2 pi f(0); +infinity for the extreme member.
double fibre_length(const WarpParams& params, Pole pole = Pole::North);

/// A radial density written in terms of s = sin r and c = cos r.
using TrigDensity = std::function<double(double s, double c)>;

/// Integral of g(sin r, cos r) over [0, pi], computed as two integrals over
/// [0, pi/2]; the southern half is reflected so both poles sit at an
/// endpoint with full floating-point resolution.
QuadResult polar_integral(const TrigDensity& g, double tol = kDefaultQuadTol);

/// divergence_probe for a density on [0, pi]: the truncations near r = pi
/// are evaluated through the reflected half, so eps down to the 1e-8 range
/// stay resolvable there. spec.side picks which poles are cut.
GrowthModel polar_probe(const TrigDensity& g, std::span<const double> eps, const ProbeSpec& spec);

/// The same density as a function of r.
Integrand radial(TrigDensity g);

/// exp(p ln|d| + ln s): |d|^p s without overflow when d is huge and s tiny.
double weighted_power(double d, double p, double s);

/// Outcome of a norm that may be infinite. Finite norms carry the p-th root;
/// infinite ones carry the growth fit of the truncated p-th powers (angular
/// factors included, truncation at both poles).
struct NormResult {
    std::optional<QuadResult> norm;
    std::optional<GrowthModel> divergence;

    bool finite() const noexcept { return norm.has_value(); }
    /// The norm value; throws DomainError if it diverges.
    double value() const;
};

/// Densities behind the norms below, before the angular factor.
/// warp:   order 0 |f|^p sin r,            order 1 |f'|^p sin r
/// metric: order 0 (2 + f^4)^(p/2) sin r,  order 1 |2 f f'|^p sin r
TrigDensity warp_density(const WarpParams& params, double p, int order);
TrigDensity metric_density(const WarpParams& params, double p, int order);

/// The L^p norm of f on the round sphere, (2 pi int_0^pi |f|^p sin r dr)^(1/p),
/// for order 0, and the gradient seminorm with |f'| in place of |f| for
/// order 1. The extreme member has an infinite gradient norm for p >= 2,
/// reported with a LOG growth fit; below 2 its gradient norm is evaluated in
/// closed form.
NormResult warp_sobolev_norm(const WarpParams& params, double p, int order,
                             double tol = kDefaultQuadTol);

/// L^p norm of the metric tensor (order 0) or of its background covariant
/// derivative (order 1), measured against the product metric, with the
/// (2 pi)^2 angular factor. For the extreme member with order 1 and p >= 2
/// the divergence is certified through the minorant (2 beta)^p |f'|^p sin r,
/// an exact lower bound of the density since f >= beta.
NormResult metric_sobolev(const WarpParams& params, double p, int order,
                          double tol = kDefaultQuadTol);

/// L^p (order 0) or gradient-seminorm (order 1) distance between two warping
/// functions on the sphere.
NormResult warp_distance(const WarpParams& a, const WarpParams& b, double p, int order,
                         double tol = kDefaultQuadTol);

/// L^p (order 0) or W^{1,p}-seminorm (order 1) distance between two metric
/// tensors: densities |f_a^2 - f_b^2|^p and 2^p |f_a f_a' - f_b f_b'|^p.
NormResult metric_distance(const WarpParams& a, const WarpParams& b, double p, int order,
                           double tol = kDefaultQuadTol);

/// max over r in [pi/4, 3pi/4] of |f_a - f_b|, |f_a' - f_b'|, |f_a'' - f_b''|,
/// sampled on a uniform grid.
double compact_c2_distance(const WarpParams& a, const WarpParams& b, int samples = 2001);

enum class GapQuantity {
    WarpLp,
    WarpW1p,
    MetricLp,
    MetricW1p,
    CompactSup,
    TotalScalarGap,
    VolumeGap,
};

const char* to_string(GapQuantity q);
/// Parses the names printed by to_string; throws ConfigError otherwise.
GapQuantity parse_gap_quantity(const std::string& name);

struct ConvergenceRow {
    int j;
    double a;
    double value;
};

struct ConvergenceTable {
    GapQuantity quantity = GapQuantity::WarpLp;
    double p = 1.0;
    double beta = 2.0;
    std::vector<ConvergenceRow> rows;  // schedule order, a decreasing
    double fitted_rate = 0.0;          // slope of ln(value) against ln(a)
    double fit_quality = 0.0;

    bool strictly_decreasing() const;
    /// Last value over first value.
    double final_ratio() const;
};

/// Gap between each scheduled member and the extreme member at the same
/// beta. Rows are computed in schedule order.
ConvergenceTable convergence_table(const ParamSchedule& schedule, double beta,
                                   GapQuantity quantity, double p = 1.0);

/// CSV with header j,a,value,log_value.
std::string to_csv(const ConvergenceTable& table);

}  // namespace xwarp
