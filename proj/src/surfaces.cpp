#include "xwarp/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "xwarp/curvature.hpp"
#include "xwarp/errors.hpp"
#include "xwarp/measures.hpp"

namespace xwarp {

namespace {

constexpr double kMinimalityTol = 1e-10;

}  // namespace

const char* to_string(SurfaceFamily family) {
    switch (family) {
        case SurfaceFamily::PhiSphere: return "PHI_SPHERE";
        case SurfaceFamily::ThetaTorus: return "THETA_TORUS";
        case SurfaceFamily::RTorus: return "R_TORUS";
    }
    return "?";
}

CoordSurface CoordSurface::make(SurfaceFamily family, double value) {
    if (!std::isfinite(value)) throw ConfigError("surface coordinate must be finite");
    if (family == SurfaceFamily::RTorus) {
        if (!(value > 0.0 && value < kPi)) throw ConfigError("level torus needs r0 in (0, pi)");
        return {family, value};
    }
    return {family, wrap_angle(value)};
}

QuadResult surface_area(const WarpParams& params, const CoordSurface& s, double tol) {
    switch (s.family) {
        case SurfaceFamily::PhiSphere: return {4.0 * kPi, 0.0, 0};
        case SurfaceFamily::ThetaTorus: {
            // The s-weight is absent here: the area element of a theta slice is f dr dphi.
            QuadResult q = polar_integral(
                [&](double sn, double c) { return warp_jet_trig(params, sn, c).f; }, tol / kTwoPi);
            q.value *= kTwoPi;
            q.err_est *= kTwoPi;
            return q;
        }
        case SurfaceFamily::RTorus:
            return {4.0 * kPi * kPi * std::sin(s.value) * warp_eval(params, s.value, 0), 0.0, 1};
    }
    throw ConfigError("unknown surface family");
}

MinimalityVerdict minimality_verdict(const WarpParams& params, const CoordSurface& s) {
    if (s.family != SurfaceFamily::RTorus) return {true, 0.0};
    const double h = mean_curvature_r_torus(params, s.value);
    return {std::abs(h) < kMinimalityTol, h};
}

double coordinate_minA(const WarpParams& params) {
    double best = surface_area(params, CoordSurface::make(SurfaceFamily::PhiSphere, 0.0)).value;
    best = std::min(best,
                    surface_area(params, CoordSurface::make(SurfaceFamily::ThetaTorus, 0.0)).value);
    const CoordSurface eq = CoordSurface::make(SurfaceFamily::RTorus, 0.5 * kPi);
    if (minimality_verdict(params, eq).minimal) best = std::min(best, surface_area(params, eq).value);
    return best;
}

std::vector<SurfaceRow> surface_summary(const WarpParams& params,
                                        const std::vector<CoordSurface>& surfaces) {
    std::vector<SurfaceRow> rows;
    for (const auto& s : surfaces) {
        rows.push_back({s, surface_area(params, s).value, minimality_verdict(params, s)});
    }
    return rows;
}

std::string surface_csv(const std::vector<SurfaceRow>& rows) {
    std::ostringstream out;
    out << "family,value,area,verdict,H\n";
    char buf[240];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%s,%.17g\n", to_string(row.surface.family),
                      row.surface.value, row.area,
                      row.verdict.minimal ? "MINIMAL" : "CMC_NONMINIMAL",
                      row.verdict.mean_curvature);
        out << buf;
    }
    return out.str();
}

}  // namespace xwarp
