#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xwarp/warp_family.hpp"

namespace xwarp {

/// Coordinates along a curve. Angles are lifted (not wrapped) so that the
/// curve is continuous in them.
struct CurvePoint {
    double r = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

/// A piecewise-smooth curve on [0, 1]. breaks lists the parameter values in
/// (0, 1) where the velocity may jump.
struct Curve {
    std::function<CurvePoint(double)> position;
    std::function<CurvePoint(double)> velocity;
    std::vector<double> breaks;
};

/// Piecewise-linear curve in lifted coordinates through the given nodes,
/// traversed at uniform parameter speed per segment.
Curve polyline(std::vector<CurvePoint> nodes);

/// Constant-rate curve from a to b in lifted coordinates.
Curve coordinate_segment(CurvePoint a, CurvePoint b);

/// The three legs used for the closed-form bound anchored at p2: move r at
/// (theta1, phi1), then theta at r2, then phi at r2, each by the shorter arc.
Curve anchored_path(const Point3& p1, const Point3& p2);

/// Length of a curve by composite Gauss-Legendre quadrature of the speed,
/// starting from `samples` panels per smooth piece and doubling until two
/// successive results agree to 1e-8 (relative to max(1, L)). Throws
/// DomainError if the refinement does not settle.
double path_length(const WarpParams& params, const Curve& curve, int samples = 16);

/// Closed-form upper bound on the distance: the smallest of the anchored
/// bounds |dr| + sin(r_k) d(theta) + f(r_k) d(phi) at either endpoint, the
/// two-leg route through an equator point, and the same route with the
/// equatorial leg taken diagonally in (theta, phi).
double upper_bound_distance(const WarpParams& params, const Point3& p1, const Point3& p2);

/// Rigorous lower bound from |dr|, the product metric g_S2 + beta^2 dphi^2,
/// and a sweep over the closest approach to the equator.
double lower_bound_distance(const WarpParams& params, const Point3& p1, const Point3& p2);

/// Great-circle distance on the unit sphere between the (r, theta) parts.
double sphere_distance(const Point3& p1, const Point3& p2);

struct GeodesicState {
    double r = 0.0, theta = 0.0, phi = 0.0;     // lifted coordinates
    double dr = 0.0, dtheta = 0.0, dphi = 0.0;  // velocity per unit parameter
};

struct Invariants {
    double energy;  // dr^2 + sin^2 r dtheta^2 + f^2 dphi^2
    double p_theta; // sin^2 r dtheta
    double p_phi;   // f^2 dphi
};

Invariants invariants(const WarpParams& params, const GeodesicState& s);

struct Trajectory {
    std::vector<double> t;
    std::vector<GeodesicState> states;
    long steps_rejected = 0;

    /// Largest relative drift of E, p_theta and p_phi from their initial
    /// values. The momenta are measured against their natural bounds
    /// sqrt(E) and sqrt(E) f(r0), so a momentum that starts at zero still
    /// has a meaningful scale.
    double max_invariant_drift(const WarpParams& params) const;
};

/// Integrates the geodesic equations with an adaptive Dormand-Prince 5(4)
/// pair (absolute and relative tolerance tol). Throws DomainError on step
/// size underflow, which happens when a trajectory of the extreme member
/// runs into a pole.
Trajectory geodesic_integrate(const WarpParams& params, const GeodesicState& start, double t_end,
                              double tol = 1e-12);

struct DistanceOptions {
    double tol = 1e-2;  // bracket width that counts as converged
    int mesh_r = 32;
    int mesh_theta = 32;
    int mesh_phi = 32;
    double pole_collar = 1e-3;
    bool use_mesh = true;
    bool use_shooting = true;
    int continuation_stages = 8;
    int calibration_grid = 512;   // r-cells for the calibration lower bound
    int calibration_cells = 400;  // branch-and-bound budget; 0 disables it
};

struct DistanceEstimate {
    double upper = 0.0;
    double lower = 0.0;
    bool converged = false;           // upper - lower < tol
    bool shooting_converged = false;  // some shooting run reached the target
    std::string upper_source;         // which construction gave the upper bound
};

/// Brackets the distance between two points. The upper bound is the shortest
/// of the closed-form constructions, the great-circle path with linear phi,
/// the mesh-graph shortest path (edge weights are rigorous upper bounds on
/// coordinate-straight segments), and geodesics found by continuation
/// shooting along those paths. The lower bound is the larger of
/// lower_bound_distance and a calibration bound: with the Clairaut momenta
/// (P, Q) as dual variables, any curve visiting the r-range R has length at
/// least P|dtheta| + Q|dphi| + int_R w |dr|, w = sqrt(1 - P^2/sin^2 - Q^2/f^2),
/// maximised over feasible (P, Q) and minimised over R by branch and bound.
/// The mesh stage runs only when the bracket is still wider than tol after
/// the other constructions, and escalates (longer continuation, then a mesh
/// refined by 1.5x) while it stays open. For the extreme member the
/// endpoints must be off the poles.
DistanceEstimate distance_estimate(const WarpParams& params, const Point3& p1, const Point3& p2,
                                   const DistanceOptions& opts = {});

/// Seeded uniform point on S^2 x S^1 (area-uniform on the sphere factor);
/// for the extreme member r stays at least `collar` from the poles.
Point3 random_point(std::uint64_t& state, double collar = 0.0);

/// Largest closed-form upper bound over sample_count seeded random pairs.
double diameter_estimate(const WarpParams& params, int sample_count, std::uint64_t seed);

struct DistanceRow {
    Point3 p1;
    Point3 p2;
    DistanceEstimate estimate;
};

/// CSV with header r1,theta1,phi1,r2,theta2,phi2,lower,upper,converged.
std::string distance_csv(const std::vector<DistanceRow>& rows);

}  // namespace xwarp
