#include "xwarp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "xwarp/errors.hpp"
#include "xwarp/fit.hpp"

namespace xwarp {

namespace {

constexpr int kMaxLevel = 8;  // finest step 2^-8
constexpr int kMinAcceptLevel = 3;
constexpr int kMaxDepth = 60;
constexpr double kNoiseUlps = 64.0;
constexpr const char* kDivergenceHint =
    "quadrature did not converge: suspected divergence (use divergence_probe)";

// Abscissas t_k = k * 2^-kMaxLevel, k >= 0, truncated once the weight underflows.
// comp is the distance from the nearer endpoint in units of the half-width.
struct TanhSinhTable {
    std::vector<double> weight;
    std::vector<double> comp;

    TanhSinhTable() {
        const double h = std::ldexp(1.0, -kMaxLevel);
        for (int k = 0;; ++k) {
            const double t = k * h;
            const double u = 0.5 * M_PI * std::sinh(t);
            const double ch = std::cosh(u);
            const double w = 0.5 * M_PI * std::cosh(t) / (ch * ch);
            const double c = 2.0 / (std::exp(2.0 * u) + 1.0);
            if (!(w > 1e-300) || !(c > 0.0)) break;
            weight.push_back(w);
            comp.push_back(c);
        }
    }
};

const TanhSinhTable& table() {
    static const TanhSinhTable t;
    return t;
}

class TanhSinh {
public:
    TanhSinh(const Integrand& f, const QuadOptions& opts) : f_(f), opts_(opts) {}

    QuadResult run(double lo, double hi) {
        panel(lo, hi, opts_.abs_tol, 0);
        return total_;
    }

private:
    double eval(double x) {
        if (total_.evaluations >= opts_.max_evaluations) {
            throw QuadratureError(kDivergenceHint, total_);
        }
        ++total_.evaluations;
        const double y = f_(x);
        if (!std::isfinite(y)) {
            throw QuadratureError("quadrature met a non-finite integrand value", total_);
        }
        return y;
    }

    // weight_k * (f(lo + d_k) + f(hi - d_k)), skipping abscissas that round onto an endpoint.
    double node_pair(std::size_t k, double lo, double hi, double hw, double& abs_sum) {
        const auto& tb = table();
        const double d = hw * tb.comp[k];
        double s = 0.0, m = 0.0;
        const double xl = lo + d;
        if (xl > lo && xl < hi) {
            const double y = eval(xl);
            s += y;
            m += std::abs(y);
        }
        const double xr = hi - d;
        if (xr > lo && xr < hi) {
            const double y = eval(xr);
            s += y;
            m += std::abs(y);
        }
        abs_sum += tb.weight[k] * m;
        return tb.weight[k] * s;
    }

    void panel(double lo, double hi, double tol, int depth) {
        const auto& tb = table();
        const std::size_t n = tb.weight.size();
        const double hw = 0.5 * (hi - lo);
        const double mid = lo + hw;

        double sum = tb.weight[0] * eval(mid);
        double abs_sum = std::abs(sum);
        std::size_t stride = std::size_t{1} << kMaxLevel;
        for (std::size_t k = stride; k < n; k += stride) sum += node_pair(k, lo, hi, hw, abs_sum);
        double prev = hw * sum;  // step 1
        double err = std::numeric_limits<double>::infinity();
        double cur = prev;
        for (int level = 1; level <= kMaxLevel; ++level) {
            stride >>= 1;
            for (std::size_t k = stride; k < n; k += 2 * stride) {
                sum += node_pair(k, lo, hi, hw, abs_sum);
            }
            const double h = std::ldexp(1.0, -level);
            cur = hw * h * sum;
            err = std::abs(cur - prev);
            // Differences below the rounding noise of the sum cannot be resolved further.
            const double noise = kNoiseUlps * std::numeric_limits<double>::epsilon() * hw * h * abs_sum;
            const double accept = std::max({tol, opts_.rel_tol * std::abs(cur), noise});
            if (level >= kMinAcceptLevel && err <= accept) {
                total_.value += cur;
                total_.err_est += err;
                return;
            }
            prev = cur;
        }
        if (depth >= kMaxDepth || !(mid > lo && mid < hi)) {
            total_.value += cur;
            total_.err_est += err;
            throw QuadratureError(kDivergenceHint, total_);
        }
        panel(lo, mid, 0.5 * tol, depth + 1);
        panel(mid, hi, 0.5 * tol, depth + 1);
    }

    const Integrand& f_;
    QuadOptions opts_;
    QuadResult total_;
};

void check_interval(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw DomainError("quadrature needs a finite interval with lo < hi");
    }
}

// 7-point Gauss / 15-point Kronrod abscissas and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkPanel {
    double lo, hi, value, err, noise;
    bool operator<(const GkPanel& o) const { return err < o.err; }
};

}  // namespace

QuadResult integrate(const Integrand& f, double lo, double hi, double tol) {
    QuadOptions opts;
    opts.abs_tol = tol;
    return integrate(f, lo, hi, opts);
}

QuadResult integrate(const Integrand& f, double lo, double hi, const QuadOptions& opts) {
    check_interval(lo, hi);
    if (!(opts.abs_tol > 0.0) && !(opts.rel_tol > 0.0)) {
        throw ConfigError("quadrature tolerance must be positive");
    }
    TanhSinh rule(f, opts);
    return rule.run(lo, hi);
}

QuadResult integrate_gauss_kronrod(const Integrand& f, double lo, double hi,
                                   const QuadOptions& opts) {
    check_interval(lo, hi);
    QuadResult res;
    auto eval = [&](double x) {
        ++res.evaluations;
        const double y = f(x);
        if (!std::isfinite(y)) {
            throw QuadratureError("quadrature met a non-finite integrand value", res);
        }
        return y;
    };
    auto gk = [&](double a, double b) {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        const double fc = eval(c);
        double k = kWgk[7] * fc;
        double g = kWg[3] * fc;
        double mag = kWgk[7] * std::abs(fc);
        for (int j = 0; j < 7; ++j) {
            const double dx = h * kXgk[j];
            const double y1 = eval(c - dx), y2 = eval(c + dx);
            k += kWgk[j] * (y1 + y2);
            mag += kWgk[j] * (std::abs(y1) + std::abs(y2));
            if (j % 2 == 1) g += kWg[j / 2] * (y1 + y2);
        }
        const double noise = kNoiseUlps * std::numeric_limits<double>::epsilon() * mag * h;
        const double raw = std::abs((k - g) * h);
        // A panel whose Gauss/Kronrod gap is at rounding level is resolved.
        return GkPanel{a, b, k * h, raw <= noise ? 0.0 : raw, noise};
    };

    std::priority_queue<GkPanel> heap;
    GkPanel first = gk(lo, hi);
    heap.push(first);
    double value = first.value, err = first.err;
    while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
        if (res.evaluations + 30 > opts.max_evaluations) {
            res.value = value;
            res.err_est = err;
            throw QuadratureError(kDivergenceHint, res);
        }
        GkPanel worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.lo + worst.hi);
        if (!(m > worst.lo && m < worst.hi)) {
            res.value = value;
            res.err_est = err;
            throw QuadratureError(kDivergenceHint, res);
        }
        GkPanel l = gk(worst.lo, m), r = gk(m, worst.hi);
        value += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    // Re-sum to shed the drift of the running updates.
    value = 0.0;
    err = 0.0;
    std::vector<GkPanel> panels;
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const GkPanel& x, const GkPanel& y) { return x.lo < y.lo; });
    for (const auto& p : panels) {
        value += p.value;
        err += p.err + p.noise;
    }
    res.value = value;
    res.err_est = err;
    return res;
}

const char* to_string(GrowthKind kind) {
    switch (kind) {
        case GrowthKind::Log: return "LOG";
        case GrowthKind::DoubleLog: return "DOUBLE_LOG";
        case GrowthKind::Constant: return "CONSTANT";
    }
    return "?";
}

double growth_feature(GrowthKind kind, double eps, double beta) {
    switch (kind) {
        case GrowthKind::Log: return std::log(1.0 / eps);
        case GrowthKind::DoubleLog: return std::log(-2.0 * std::log(std::sin(eps)) + beta);
        case GrowthKind::Constant: return 0.0;
    }
    return 0.0;
}

std::vector<double> default_eps_sequence() {
    std::vector<double> eps;
    for (int k = 1; k <= 8; ++k) eps.push_back(std::pow(10.0, -k));
    return eps;
}

namespace {

void check_ladder(std::span<const double> eps) {
    if (eps.size() < 6) throw ConfigError("divergence_probe needs at least six truncations");
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0) || (k > 0 && !(eps[k] < eps[k - 1]))) {
            throw ConfigError("truncations must be positive and strictly decreasing");
        }
    }
}

}  // namespace

std::vector<double> truncated_integrals(const Integrand& f, double lo, double hi,
                                        std::span<const double> eps, TruncationSide side,
                                        double tol) {
    check_interval(lo, hi);
    check_ladder(eps);
    const double span_limit = side == TruncationSide::Both ? 0.5 * (hi - lo) : hi - lo;
    if (!(eps[0] < span_limit)) throw ConfigError("largest truncation exceeds the interval");

    const bool cut_lo = side != TruncationSide::Upper;
    const bool cut_hi = side != TruncationSide::Lower;
    auto piece = [&](double a, double b) { return integrate(f, a, b, tol).value; };

    std::vector<double> out;
    double running = piece(cut_lo ? lo + eps[0] : lo, cut_hi ? hi - eps[0] : hi);
    out.push_back(running);
    for (std::size_t k = 1; k < eps.size(); ++k) {
        if (cut_lo) running += piece(lo + eps[k], lo + eps[k - 1]);
        if (cut_hi) running += piece(hi - eps[k - 1], hi - eps[k]);
        out.push_back(running);
    }
    return out;
}

GrowthModel fit_growth(std::span<const double> eps, std::span<const double> truncated,
                       GrowthKind kind, double beta) {
    check_ladder(eps);
    if (truncated.size() != eps.size()) throw ConfigError("one truncated value per eps required");
    GrowthModel model;
    model.kind = kind;
    model.beta = beta;
    model.eps.assign(eps.begin(), eps.end());
    model.truncated.assign(truncated.begin(), truncated.end());

    if (kind == GrowthKind::Constant) {
        const double last = model.truncated.back();
        double spread = 0.0;
        for (std::size_t k = model.truncated.size() / 2; k < model.truncated.size(); ++k) {
            spread = std::max(spread, std::abs(model.truncated[k] - last));
        }
        model.coefficient = last;
        model.intercept = last;
        const double scale = std::max(std::abs(last), 1e-300);
        model.fit_quality = 1.0 - std::min(1.0, spread / scale);
        return model;
    }

    std::vector<double> xs;
    for (double e : eps) xs.push_back(growth_feature(kind, e, beta));
    const LineFit fit = fit_line(xs, model.truncated);
    model.coefficient = fit.slope;
    model.intercept = fit.intercept;
    model.fit_quality = fit.r_squared;
    return model;
}

GrowthModel divergence_probe(const Integrand& f, double lo, double hi,
                             std::span<const double> eps, const ProbeSpec& spec) {
    const std::vector<double> t = truncated_integrals(f, lo, hi, eps, spec.side, spec.tol);
    return fit_growth(eps, t, spec.kind, spec.beta);
}

}  // namespace xwarp
