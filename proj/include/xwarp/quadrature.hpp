#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace xwarp {

inline constexpr double kDefaultQuadTol = 1e-10;
inline constexpr long kDefaultEvalBudget = 1'000'000;

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;  // upper estimate of the absolute error
    long evaluations = 0;
};

using Integrand = std::function<double(double)>;

struct QuadOptions {
    double abs_tol = kDefaultQuadTol;
    double rel_tol = 0.0;
    long max_evaluations = kDefaultEvalBudget;
};

/// Raised when a rule exhausts its evaluation budget or meets a non-finite
/// integrand value. For integrable endpoint singularities this does not
/// happen; exhausting the budget is the signature of a divergent integral,
/// which should then be classified with divergence_probe.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadResult partial)
        : std::runtime_error(what), partial_(partial) {}
    const QuadResult& partial() const noexcept { return partial_; }

private:
    QuadResult partial_;
};

/// Doubly adaptive tanh-sinh quadrature over the open interval (lo, hi).
///
/// Each panel is refined by halving the step of the double-exponential rule;
/// a panel that does not settle by the finest level is bisected and both
/// halves are integrated afresh. Abscissas are generated from their distance
/// to the nearest endpoint, so the integrand is never evaluated at lo or hi
/// and logarithmic or x^(-p), p < 1, endpoint singularities are integrated
/// to full accuracy. Panels are summed left to right. Requires finite
/// lo < hi; throws DomainError otherwise.
QuadResult integrate(const Integrand& f, double lo, double hi, double tol = kDefaultQuadTol);
QuadResult integrate(const Integrand& f, double lo, double hi, const QuadOptions& opts);

/// Globally adaptive 7/15-point Gauss-Kronrod bisection. Independent of the
/// tanh-sinh path; used as a cross-check rule.
QuadResult integrate_gauss_kronrod(const Integrand& f, double lo, double hi,
                                   const QuadOptions& opts = {});

enum class GrowthKind {
    Log,        // c * ln(1/eps)
    DoubleLog,  // c * ln(-2 ln sin(eps) + beta)
    Constant,   // convergent
};

const char* to_string(GrowthKind kind);

enum class TruncationSide {
    Lower,  // [lo + eps, hi]
    Upper,  // [lo, hi - eps]
    Both,   // [lo + eps, hi - eps]
};

struct GrowthModel {
    GrowthKind kind = GrowthKind::Log;
    double coefficient = 0.0;
    double intercept = 0.0;
    double fit_quality = 0.0;
    double beta = 2.0;  // only used by DoubleLog
    std::vector<double> eps;
    std::vector<double> truncated;  // I(eps_k)
};

struct ProbeSpec {
    GrowthKind kind = GrowthKind::Log;
    double beta = 2.0;
    TruncationSide side = TruncationSide::Lower;
    double tol = kDefaultQuadTol;
};

/// The model's regressor at a given truncation.
double growth_feature(GrowthKind kind, double eps, double beta);

/// Default truncation ladder eps_k = 10^-k, k = 1..8.
std::vector<double> default_eps_sequence();

/// Truncated integrals I(eps_k), accumulated piece by piece from the largest
/// eps inward. Validates eps as divergence_probe does.
std::vector<double> truncated_integrals(const Integrand& f, double lo, double hi,
                                        std::span<const double> eps, TruncationSide side,
                                        double tol = kDefaultQuadTol);

/// Fits a growth law to given truncations (see divergence_probe).
GrowthModel fit_growth(std::span<const double> eps, std::span<const double> truncated,
                       GrowthKind kind, double beta = 2.0);

/// Computes the truncated integrals I(eps) and least-squares fits them
/// against the requested growth law. For Log and DoubleLog, coefficient is
/// the fitted slope and fit_quality its coefficient of determination. For
/// Constant, coefficient is the value at the smallest eps and fit_quality is
/// 1 - (spread of the second half of the ladder relative to that value).
///
/// Requires a strictly decreasing positive eps sequence of at least six
/// entries (ConfigError otherwise); quadrature failures propagate.
GrowthModel divergence_probe(const Integrand& f, double lo, double hi,
                             std::span<const double> eps, const ProbeSpec& spec);

}  // namespace xwarp
