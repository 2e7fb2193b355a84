#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xwarp/quadrature.hpp"
#include "xwarp/warp_family.hpp"

namespace xwarp {

/// A test function of the form u_bar(r) = (2 pi)^2 P(cos r), where P is
/// smooth on [-1, 1]. Smoothness in cos r makes u_bar smooth across both
/// poles of the sphere, and u_bar'(0) = u_bar'(pi) = 0 automatically.
class TestProfile {
public:
    /// P(t) = sum_k coeffs[k] t^k. Nonnegativity is decided by sampling
    /// [-1, 1] on a fine grid.
    static TestProfile polynomial(std::vector<double> coeffs, std::string id = {});

    /// User-supplied P and P'. The caller vouches for the nonnegativity flag.
    static TestProfile custom(std::function<double(double)> p, std::function<double(double)> dp,
                              bool nonnegative, std::string id = {});

    static TestProfile constant(double c) { return polynomial({c}, "const"); }

    double profile(double t) const { return p_(t); }
    double profile_derivative(double t) const { return dp_(t); }

    /// u_bar and d u_bar / dr from s = sin r, c = cos r.
    double u_bar(double c) const;
    double du_bar(double s, double c) const;

    bool nonnegative() const noexcept { return nonnegative_; }
    const std::string& id() const noexcept { return id_; }

private:
    TestProfile(std::function<double(double)> p, std::function<double(double)> dp,
                bool nonnegative, std::string id);

    std::function<double(double)> p_;
    std::function<double(double)> dp_;
    bool nonnegative_;
    std::string id_;
};

/// Christoffel symbols of the round sphere factor that do not vanish.
struct BackgroundSymbols {
    double gamma_r_thth;  // -sin r cos r
    double gamma_th_rth;  // cot r
};

/// Pointwise ingredients of the distributional scalar curvature.
struct LLData {
    double gamma_r_phiphi;  // -f f'
    double gamma_phi_rphi;  // f'/f
    double v_r;             // -2 f'/f, the only component of V
    double f_val;           // F = 2 - 2 (f'/f)^2
    double density;         // d mu / d mu_0 = f
    BackgroundSymbols background;
};

/// Requires r in (0, pi); throws DomainError otherwise.
LLData ll_data(const WarpParams& params, double r);

enum class PairingMethod {
    Reduced,  // int -4 cos r u_bar' + 2 u_bar f sin r
    Ibp,      // boundary terms 4 u_bar(0) + 4 u_bar(pi) plus the regular integral
};

const char* to_string(PairingMethod m);

/// Distributional scalar curvature of the extreme metric paired with u.
/// Throws DomainError for a > 0 (the classical integral applies there).
QuadResult scalar_distribution(const WarpParams& params, const TestProfile& u,
                               PairingMethod method, double tol = kDefaultQuadTol);

/// The pairing with u = 1: (2 pi)^2 int 2 f sin r.
QuadResult total_scalar(const WarpParams& params, double tol = kDefaultQuadTol);

/// For a > 0, the classical total int Scalar d mu computed from
/// scalar_curvature and the volume density. Throws DomainError for a = 0.
QuadResult total_scalar_direct(const WarpParams& params, double tol = kDefaultQuadTol);

/// Integral of the pointwise scalar curvature of the extreme metric over the
/// regular part, computed from scalar_curvature.
double regular_part_total(double beta, double tol = kDefaultQuadTol);

struct SplitProbe {
    GrowthModel first;                  // truncations of -4 cos r u_bar' + 8H
    GrowthModel second;                 // truncations of 2 u_bar f sin r - 8H
    std::vector<double> reduced;        // truncations of the unsplit integrand
    double max_cancellation_error = 0;  // max_k |first_k + second_k - reduced_k|
};

/// H(r) = (cos^2 r / sin r) u_bar / f for the extreme member.
double split_h(double beta, const TestProfile& u, double s, double c);

/// Truncates both halves of the split pairing on [eps, pi - eps] and fits
/// DOUBLE_LOG growth to each. Requires a nonnegative profile that does not
/// vanish at both poles.
SplitProbe ll_split_probe(double beta, const TestProfile& u, const std::vector<double>& eps,
                          double tol = kDefaultQuadTol);

/// Random polynomial profiles of degree <= 6. Even-indexed entries are sums
/// of squares plus a constant (nonnegative); odd-indexed ones are unsigned.
std::vector<TestProfile> profile_battery(std::uint64_t seed, int count);

struct GoldenPairing {
    std::string profile_id;
    double beta;
    PairingMethod method;
    double value;
};

/// CSV with a version comment line and header profile_id,beta,method,value.
std::string golden_csv(const std::vector<GoldenPairing>& rows);

}  // namespace xwarp
