#include "xwarp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "xwarp/distributional.hpp"
#include "xwarp/errors.hpp"
#include "xwarp/fit.hpp"

namespace xwarp {

namespace {

constexpr double kFourPi2 = 4.0 * kPi * kPi;

void check_exponent(double p) {
    if (!std::isfinite(p) || p < 1.0) throw ConfigError("norm exponent p must be >= 1");
}

void check_order(int order) {
    if (order != 0 && order != 1) throw std::invalid_argument("norm order must be 0 or 1");
}

// The p-th root of a p-th power integral, with first-order error propagation.
QuadResult root(QuadResult q, double p, double factor) {
    q.value *= factor;
    q.err_est *= factor;
    const double v = std::max(q.value, 0.0);
    QuadResult out = q;
    out.value = std::pow(v, 1.0 / p);
    out.err_est = v > 0.0 ? out.value / (p * v) * q.err_est : std::pow(q.err_est, 1.0 / p);
    return out;
}

NormResult finite_norm(const TrigDensity& g, double p, double factor, double tol) {
    NormResult r;
    r.norm = root(polar_integral(g, tol), p, factor);
    return r;
}

NormResult divergent_norm(const TrigDensity& g, double factor, GrowthKind kind) {
    ProbeSpec spec;
    spec.kind = kind;
    spec.side = TruncationSide::Both;
    const std::vector<double> eps = default_eps_sequence();
    auto scaled = [g, factor](double s, double c) { return factor * g(s, c); };
    NormResult r;
    r.divergence = polar_probe(scaled, eps, spec);
    return r;
}

}  // namespace

double level_area(const WarpParams& params, double r0) {
    r0 = clamp_radius(r0);
    if (r0 == 0.0 || r0 == kPi) return 0.0;
    return kFourPi2 * std::sin(r0) * warp_eval(params, r0, 0);
}

QuadResult polar_integral(const TrigDensity& g, double tol) {
    const double half = 0.5 * kPi;
    QuadResult north = integrate([&](double u) { return g(std::sin(u), std::cos(u)); }, 0.0, half,
                                 0.5 * tol);
    QuadResult south = integrate([&](double u) { return g(std::sin(u), -std::cos(u)); }, 0.0,
                                 half, 0.5 * tol);
    return {north.value + south.value, north.err_est + south.err_est,
            north.evaluations + south.evaluations};
}

GrowthModel polar_probe(const TrigDensity& g, std::span<const double> eps, const ProbeSpec& spec) {
    const double half = 0.5 * kPi;
    auto north = [&](double u) { return g(std::sin(u), std::cos(u)); };
    auto south = [&](double u) { return g(std::sin(u), -std::cos(u)); };
    const bool cut_north = spec.side != TruncationSide::Upper;
    const bool cut_south = spec.side != TruncationSide::Lower;
    std::vector<double> total(eps.size(), 0.0);
    for (int half_index = 0; half_index < 2; ++half_index) {
        const bool cut = half_index == 0 ? cut_north : cut_south;
        const Integrand h = half_index == 0 ? Integrand(north) : Integrand(south);
        if (cut) {
            const auto t = truncated_integrals(h, 0.0, half, eps, TruncationSide::Lower, 0.5 * spec.tol);
            for (std::size_t k = 0; k < eps.size(); ++k) total[k] += t[k];
        } else {
            const double whole = integrate(h, 0.0, half, 0.5 * spec.tol).value;
            for (double& v : total) v += whole;
        }
    }
    return fit_growth(eps, total, spec.kind, spec.beta);
}

Integrand radial(TrigDensity g) {
    return [g = std::move(g)](double r) { return g(std::sin(r), std::cos(r)); };
}

double weighted_power(double d, double p, double s) {
    if (d == 0.0 || s == 0.0) return 0.0;
    return std::exp(p * std::log(std::abs(d)) + std::log(s));
}

double NormResult::value() const {
    if (!norm) throw DomainError("norm is infinite");
    return norm->value;
}

QuadResult volume(const WarpParams& params, double tol) {
    QuadResult q = polar_integral(
        [&](double s, double c) { return s * warp_jet_trig(params, s, c).f; }, tol / kFourPi2);
    q.value *= kFourPi2;
    q.err_est *= kFourPi2;
    return q;
}

double fibre_length(const WarpParams& params, Pole pole) {
    if (params.is_extreme()) return std::numeric_limits<double>::infinity();
    return kTwoPi * warp_eval(params, pole == Pole::North ? 0.0 : kPi, 0);
}

namespace {

// ln|f'|. For the extreme member f' = -2c/s overflows once s is subnormal,
// which tanh-sinh nodes next to the poles do reach.
double log_abs_df(const WarpParams& params, const WarpJet& j, double s, double c) {
    if (params.is_extreme()) return std::log(2.0 * std::abs(c)) - std::log(s);
    return std::log(std::abs(j.df));
}

}  // namespace

TrigDensity warp_density(const WarpParams& params, double p, int order) {
    check_exponent(p);
    check_order(order);
    return [params, p, order](double s, double c) {
        const WarpJet j = warp_jet_trig(params, s, c);
        if (order == 0) return weighted_power(j.f, p, s);
        if (j.df == 0.0 || s == 0.0) return 0.0;
        return std::exp(p * log_abs_df(params, j, s, c) + std::log(s));
    };
}

TrigDensity metric_density(const WarpParams& params, double p, int order) {
    check_exponent(p);
    check_order(order);
    return [params, p, order](double s, double c) {
        const WarpJet j = warp_jet_trig(params, s, c);
        if (order == 0) {
            // (2 + f^4)^(p/2) = f^(2p) (1 + 2/f^4)^(p/2), safe for huge f.
            const double f2 = j.f * j.f;
            return std::exp(p * std::log(j.f) * 2.0 + 0.5 * p * std::log1p(2.0 / (f2 * f2)) +
                            std::log(s));
        }
        if (j.df == 0.0 || s == 0.0) return 0.0;
        return std::exp(p * (std::log(2.0 * j.f) + log_abs_df(params, j, s, c)) + std::log(s));
    };
}

NormResult warp_sobolev_norm(const WarpParams& params, double p, int order, double tol) {
    const TrigDensity g = warp_density(params, p, order);
    if (params.is_extreme() && order == 1) {
        if (p >= 2.0) return divergent_norm(g, kTwoPi, GrowthKind::Log);
        // |f'| = 2 |cot r|. The density ~ s^(1-p) overflows at subnormal s for p near 2
        // and puts mass below the smallest node, so use the Beta integral instead.
        QuadResult q;
        q.value = std::pow(2.0, p) * std::beta(1.0 - 0.5 * p, 0.5 * (p + 1.0));
        NormResult r;
        r.norm = root(q, p, kTwoPi);
        return r;
    }
    return finite_norm(g, p, kTwoPi, tol / kTwoPi);
}

NormResult metric_sobolev(const WarpParams& params, double p, int order, double tol) {
    const TrigDensity g = metric_density(params, p, order);
    if (params.is_extreme() && order == 1 && p >= 2.0) {
        const double beta = params.beta();
        const TrigDensity minorant = [params, p, beta](double s, double c) {
            return std::pow(2.0 * beta, p) * weighted_power(warp_jet_trig(params, s, c).df, p, s);
        };
        return divergent_norm(minorant, kFourPi2, GrowthKind::Log);
    }
    return finite_norm(g, p, kFourPi2, tol / kFourPi2);
}

NormResult warp_distance(const WarpParams& a, const WarpParams& b, double p, int order,
                         double tol) {
    check_exponent(p);
    check_order(order);
    const TrigDensity g = [a, b, p, order](double s, double c) {
        const WarpJet ja = warp_jet_trig(a, s, c), jb = warp_jet_trig(b, s, c);
        return weighted_power(order == 0 ? ja.f - jb.f : ja.df - jb.df, p, s);
    };
    if ((a.is_extreme() != b.is_extreme()) && order == 1 && p >= 2.0) {
        return divergent_norm(g, kTwoPi, GrowthKind::Log);
    }
    return finite_norm(g, p, kTwoPi, tol / kTwoPi);
}

NormResult metric_distance(const WarpParams& a, const WarpParams& b, double p, int order,
                           double tol) {
    check_exponent(p);
    check_order(order);
    const TrigDensity g = [a, b, p, order](double s, double c) {
        const WarpJet ja = warp_jet_trig(a, s, c), jb = warp_jet_trig(b, s, c);
        if (order == 0) return weighted_power(ja.f * ja.f - jb.f * jb.f, p, s);
        return weighted_power(2.0 * (ja.f * ja.df - jb.f * jb.df), p, s);
    };
    if ((a.is_extreme() != b.is_extreme()) && order == 1 && p >= 2.0) {
        return divergent_norm(g, kFourPi2, GrowthKind::Log);
    }
    return finite_norm(g, p, kFourPi2, tol / kFourPi2);
}

double compact_c2_distance(const WarpParams& a, const WarpParams& b, int samples) {
    if (samples < 2) throw ConfigError("compact sup needs at least two samples");
    const double lo = 0.25 * kPi, hi = 0.75 * kPi;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double r = lo + (hi - lo) * i / (samples - 1);
        const WarpJet ja = warp_jet(a, r), jb = warp_jet(b, r);
        worst = std::max({worst, std::abs(ja.f - jb.f), std::abs(ja.df - jb.df),
                          std::abs(ja.d2f - jb.d2f)});
    }
    return worst;
}

const char* to_string(GapQuantity q) {
    switch (q) {
        case GapQuantity::WarpLp: return "warp_lp";
        case GapQuantity::WarpW1p: return "warp_w1p";
        case GapQuantity::MetricLp: return "metric_lp";
        case GapQuantity::MetricW1p: return "metric_w1p";
        case GapQuantity::CompactSup: return "compact_sup";
        case GapQuantity::TotalScalarGap: return "total_scalar_gap";
        case GapQuantity::VolumeGap: return "volume_gap";
    }
    return "?";
}

GapQuantity parse_gap_quantity(const std::string& name) {
    for (GapQuantity q : {GapQuantity::WarpLp, GapQuantity::WarpW1p, GapQuantity::MetricLp,
                          GapQuantity::MetricW1p, GapQuantity::CompactSup,
                          GapQuantity::TotalScalarGap, GapQuantity::VolumeGap}) {
        if (name == to_string(q)) return q;
    }
    throw ConfigError("unknown convergence quantity: " + name);
}

bool ConvergenceTable::strictly_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].value < rows[i - 1].value)) return false;
    }
    return true;
}

double ConvergenceTable::final_ratio() const {
    if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
    return rows.back().value / rows.front().value;
}

ConvergenceTable convergence_table(const ParamSchedule& schedule, double beta,
                                   GapQuantity quantity, double p) {
    const std::vector<WarpParams> members = schedule_gen(schedule, beta);
    const WarpParams limit = WarpParams::extreme(beta);

    double limit_value = 0.0;
    if (quantity == GapQuantity::TotalScalarGap) limit_value = total_scalar(limit).value;
    if (quantity == GapQuantity::VolumeGap) limit_value = volume(limit).value;

    ConvergenceTable table;
    table.quantity = quantity;
    table.p = p;
    table.beta = beta;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const WarpParams& m = members[i];
        double v = 0.0;
        switch (quantity) {
            case GapQuantity::WarpLp: v = warp_distance(m, limit, p, 0).value(); break;
            case GapQuantity::WarpW1p: v = warp_distance(m, limit, p, 1).value(); break;
            case GapQuantity::MetricLp: v = metric_distance(m, limit, p, 0).value(); break;
            case GapQuantity::MetricW1p: v = metric_distance(m, limit, p, 1).value(); break;
            case GapQuantity::CompactSup: v = compact_c2_distance(m, limit); break;
            case GapQuantity::TotalScalarGap:
                v = std::abs(total_scalar(m).value - limit_value);
                break;
            case GapQuantity::VolumeGap: v = std::abs(limit_value - volume(m).value); break;
        }
        table.rows.push_back({static_cast<int>(i) + 1, m.a(), v});
    }

    std::vector<double> xs, ys;
    for (const auto& row : table.rows) {
        if (!(row.value > 0.0)) {
            xs.clear();
            break;
        }
        xs.push_back(std::log(row.a));
        ys.push_back(std::log(row.value));
    }
    if (xs.size() >= 2) {
        const LineFit fit = fit_line(xs, ys);
        table.fitted_rate = fit.slope;
        table.fit_quality = fit.r_squared;
    } else {
        table.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        table.fit_quality = 0.0;
    }
    return table;
}

std::string to_csv(const ConvergenceTable& table) {
    std::ostringstream out;
    out << "j,a,value,log_value\n";
    char buf[160];
    for (const auto& row : table.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.j, row.a, row.value,
                      row.value > 0.0 ? std::log(row.value)
                                      : -std::numeric_limits<double>::infinity());
        out << buf;
    }
    return out.str();
}

}  // namespace xwarp
