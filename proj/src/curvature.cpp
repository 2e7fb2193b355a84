#include "xwarp/curvature.hpp"

#include <cmath>
#include <string>

#include "xwarp/errors.hpp"

namespace xwarp {

namespace {

void require_interior(double r, const char* what) {
    if (!(r > 0.0 && r < kPi)) {
        throw DomainError(std::string(what) + " is singular at the poles");
    }
}

}  // namespace

double laplacian_f(const WarpParams& params, double r) {
    r = clamp_radius(r);
    if (params.is_extreme()) {
        require_interior(r, "laplacian of the extreme warping function");
        return 2.0;
    }
    const double s = std::sin(r), c = std::cos(r), a = params.a();
    const double s2 = s * s, den = s2 + a;
    return (2.0 * s2 * s2 + 2.0 * a * s2 - 4.0 * a * c * c) / (den * den);
}

double scalar_curvature(const WarpParams& params, double r) {
    const double lap = laplacian_f(params, r);
    return 2.0 - 2.0 * lap / warp_eval(params, r, 0);
}

RicciFrame ricci_frame(const WarpParams& params, double r) {
    r = clamp_radius(r);
    require_interior(r, "the orthonormal Ricci frame");
    const WarpJet j = warp_jet(params, r);
    const double cot = std::cos(r) / std::sin(r);
    // Coordinate Hessian: Hess_rr = f'', Hess_thth = sin r cos r f'; the frame
    // rescales the latter by 1 / sin^2 r.
    const double hess_rr = j.d2f;
    const double hess_thth_frame = cot * j.df;
    return {1.0 - hess_rr / j.f, 1.0 - hess_thth_frame / j.f, -(hess_rr + hess_thth_frame) / j.f};
}

double mean_curvature_r_torus(const WarpParams& params, double r0) {
    r0 = clamp_radius(r0);
    require_interior(r0, "a level torus");
    // cot r + f'/f, factored so the equator gives an exact zero.
    const double s = std::sin(r0), c = std::cos(r0);
    const double f = warp_eval(params, r0, 0);
    const double s2 = s * s;
    const double bracket = params.is_extreme() ? f - 2.0 : f - 2.0 * s2 / (s2 + params.a());
    return c * bracket / (s * f);
}

}  // namespace xwarp
