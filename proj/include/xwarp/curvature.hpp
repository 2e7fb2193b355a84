#pragma once

#include "xwarp/warp_family.hpp"

namespace xwarp {

/// Ricci eigenvalues in the orthonormal frame {d_r, d_theta / sin r, d_phi / f}.
struct RicciFrame {
    double lambda_r;
    double lambda_theta;
    double lambda_phi;

    double trace() const noexcept { return lambda_r + lambda_theta + lambda_phi; }
};

/// Laplacian of f on the round sphere, f'' + cot(r) f'. For a > 0 this is
///   (2 s^4 + 2 a s^2 - 4 a c^2) / (s^2 + a)^2,
/// which is smooth up to the poles; the extreme member gives exactly 2 and
/// throws DomainError at the poles.
double laplacian_f(const WarpParams& params, double r);

/// 2 - 2 laplacian_f / f.
double scalar_curvature(const WarpParams& params, double r);

/// Requires r in (0, pi) for every member; throws DomainError otherwise.
RicciFrame ricci_frame(const WarpParams& params, double r);

/// Mean curvature of the level torus {r = r0} with respect to the normal
/// +d_r: the logarithmic derivative of sin(r) f(r). Requires r0 in (0, pi).
double mean_curvature_r_torus(const WarpParams& params, double r0);

}  // namespace xwarp
