#pragma once

#include <string>
#include <vector>

#include "xwarp/quadrature.hpp"
#include "xwarp/warp_family.hpp"

namespace xwarp {

enum class SurfaceFamily {
    PhiSphere,   // {phi = phi0}
    ThetaTorus,  // {theta = theta0} together with {theta = theta0 + pi}
    RTorus,      // {r = r0}
};

const char* to_string(SurfaceFamily family);

struct CoordSurface {
    SurfaceFamily family;
    double value;

    /// Throws ConfigError when value is outside the coordinate's range;
    /// angles are wrapped, RTorus needs r0 in (0, pi).
    static CoordSurface make(SurfaceFamily family, double value);
};

/// Area by the reduced integral of each family: 4 pi for the sphere,
/// 2 pi int_0^pi f dr for the theta torus, 4 pi^2 sin(r0) f(r0) for the
/// level torus.
QuadResult surface_area(const WarpParams& params, const CoordSurface& s,
                        double tol = kDefaultQuadTol);

struct MinimalityVerdict {
    bool minimal;
    double mean_curvature;  // 0 for the reflection-symmetric families
};

/// The phi-spheres and theta-tori are fixed by reflection isometries and are
/// minimal. A level torus is minimal when |H| < 1e-10.
MinimalityVerdict minimality_verdict(const WarpParams& params, const CoordSurface& s);

/// Smallest area among the minimal coordinate surfaces.
double coordinate_minA(const WarpParams& params);

struct SurfaceRow {
    CoordSurface surface;
    double area;
    MinimalityVerdict verdict;
};

std::vector<SurfaceRow> surface_summary(const WarpParams& params,
                                        const std::vector<CoordSurface>& surfaces);

/// CSV with header family,value,area,verdict,H.
std::string surface_csv(const std::vector<SurfaceRow>& rows);

}  // namespace xwarp
