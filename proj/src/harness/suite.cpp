#include "xwarp/harness/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ctime>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include "xwarp/curvature.hpp"
#include "xwarp/errors.hpp"

namespace xwarp::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

void append(std::string& s, const std::string& part) {
    if (!s.empty()) s += "; ";
    s += part;
}

CheckResult result(const char* id, const char* description, double value, double target,
                   double tol, bool pass, std::string detail) {
    return {id, description, value, target, tol, pass ? CheckStatus::Pass : CheckStatus::Fail,
            std::move(detail)};
}

CheckResult skipped(const char* id, const char* description, std::string reason) {
    return {id, description, std::nan(""), std::nan(""), std::nan(""), CheckStatus::Skip,
            std::move(reason)};
}

// Scheduled members followed by the extreme member.
std::vector<WarpParams> with_limit(const SuiteConfig& cfg, double beta) {
    auto ps = schedule_gen(cfg.schedule, beta);
    ps.push_back(WarpParams::extreme(beta));
    return ps;
}

std::string rate_skip_reason(const SuiteConfig& cfg) {
    return fmt("schedule count %d < %d, too few points for a convergence fit", cfg.schedule.count,
               SuiteConfig::kMinRateCount);
}

// ---------------------------------------------------------------------------

CheckResult exact_integral(const SuiteConfig& cfg, SuiteArtifacts&) {
    const char* desc = "int_0^pi -2 ln(sin r) sin r dr = 4 - 2 ln 4, under 1 s";
    const auto t0 = std::chrono::steady_clock::now();
    const auto q = polar_integral([](double s, double) { return -2.0 * std::log(s) * s; },
                                  cfg.quad_tol);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double target = 4.0 - 2.0 * std::log(4.0);
    const double err = std::abs(q.value - target);
    return result("AC01", desc, q.value, target, 1e-10, err <= 1e-10 && seconds < 1.0,
                  fmt("abs error %.3e, %ld evaluations", err, q.evaluations));
}

CheckResult limit_volume(const SuiteConfig& cfg, SuiteArtifacts&) {
    const char* desc = "volume of the extreme member = 4 pi^2 (2 beta + 4 - 2 ln 4), relative";
    double worst = 0.0;
    std::string detail;
    for (double beta : cfg.beta_values) {
        const double v = volume(WarpParams::extreme(beta), cfg.quad_tol).value;
        const double t = 4.0 * kPi * kPi * (2.0 * beta + 4.0 - 2.0 * std::log(4.0));
        const double rel = std::abs(v - t) / t;
        worst = std::max(worst, rel);
        append(detail, fmt("beta=%g rel %.2e", beta, rel));
    }
    return result("AC02", desc, worst, 0.0, 1e-8, worst <= 1e-8, detail);
}

CheckResult volume_bound(const SuiteConfig& cfg, SuiteArtifacts& art) {
    const char* desc =
        "scheduled volumes <= 4 pi^3 beta, nondecreasing, final relative gap to the limit";
    if (!cfg.rate_checks_enabled()) return skipped("AC03", desc, rate_skip_reason(cfg));
    bool pass = true;
    double worst_gap = 0.0;
    std::string detail;
    for (double beta : cfg.beta_values) {
        const double bound = 4.0 * kPi * kPi * kPi * beta;
        const double limit = volume(WarpParams::extreme(beta), cfg.quad_tol).value;
        double prev = -kInf;
        int over = 0, drops = 0;
        for (const auto& p : schedule_gen(cfg.schedule, beta)) {
            const double v = volume(p, cfg.quad_tol).value;
            over += v > bound;
            drops += v < prev;
            prev = v;
        }
        const double gap = (limit - prev) / limit;
        worst_gap = std::max(worst_gap, gap);
        pass = pass && over == 0 && drops == 0;
        append(detail, fmt("beta=%g over-bound %d, decreases %d, final gap %.3e abs / %.3e rel",
                           beta, over, drops, limit - prev, gap));
        art.convergence.push_back(
            convergence_table(cfg.schedule, beta, GapQuantity::VolumeGap, 1.0));
    }
    return result("AC03", desc, worst_gap, 0.0, 1e-3, pass && worst_gap < 1e-3, detail);
}

CheckResult scalar_nonnegative(const SuiteConfig& cfg, SuiteArtifacts&) {
    const char* desc = "min scalar curvature over the grid >= -1e-12; extreme scalar = 2 - 4/f";
    const int n = cfg.grid_n;
    double min_scalar = kInf, identity = 0.0;
    for (double beta : cfg.beta_values) {
        for (const auto& p : with_limit(cfg, beta)) {
            for (int k = 1; k <= n; ++k) {
                const double r = kPi * k / (n + 1);
                const double sc = scalar_curvature(p, r);
                min_scalar = std::min(min_scalar, sc);
                if (p.is_extreme()) {
                    const double f = -2.0 * std::log(std::sin(r)) + beta;
                    identity = std::max(identity, std::abs(sc - (2.0 - 4.0 / f)));
                }
            }
        }
    }
    return result("AC04", desc, min_scalar, 0.0, 1e-12,
                  min_scalar >= -1e-12 && identity <= 1e-12,
                  fmt("extreme identity max error %.3e", identity));
}

CheckResult level_area_profile(const SuiteConfig& cfg, SuiteArtifacts&) {
    const char* desc = "level area: unique max at pi/2 equal to 4 pi^2 beta, concave profile";
    const int n = cfg.grid_n + cfg.grid_n % 2;  // even, so pi/2 is a node
    double worst_peak = 0.0, max_d2 = -kInf;
    int misplaced = 0;
    std::vector<double> area(n + 1);
    for (double beta : cfg.beta_values) {
        for (const auto& p : with_limit(cfg, beta)) {
            for (int k = 0; k <= n; ++k) area[k] = level_area(p, kPi * k / n);
            const double peak = level_area(p, kPi / 2);
            worst_peak = std::max(worst_peak, std::abs(peak - 4.0 * kPi * kPi * beta));
            for (int k = 0; k <= n; ++k) {
                if (k != n / 2 && area[k] >= area[n / 2]) ++misplaced;
            }
            for (int k = 1; k < n; ++k) {
                max_d2 = std::max(max_d2, area[k + 1] - 2.0 * area[k] + area[k - 1]);
            }
        }
    }
    return result("AC05", desc, worst_peak, 0.0, 1e-10,
                  worst_peak <= 1e-10 && misplaced == 0 && max_d2 <= 1e-8,
                  fmt("grid points not below the peak %d, max second difference %.3e", misplaced,
                      max_d2));
}

CheckResult ricci_regression(const SuiteConfig& cfg, SuiteArtifacts&) {
    const char* desc = "Ricci frame at beta=2, a=0 matches closed forms; trace = scalar; "
                       "lambda_r < -1e3 near the pole";
    const int n = 1000;
    double formula_err = 0.0;
    const auto ex = WarpParams::extreme(2.0);
    for (int k = 1; k <= n; ++k) {
        const double r = kPi * k / (n + 1);
        const double s = std::sin(r), cot = std::cos(r) / s;
        const double d = 1.0 - std::log(s);
        const RicciFrame ric = ricci_frame(ex, r);
        const double ref[3] = {1.0 - 1.0 / (s * s * d), 1.0 + cot * cot / d, -1.0 / d};
        const double got[3] = {ric.lambda_r, ric.lambda_theta, ric.lambda_phi};
        for (int i = 0; i < 3; ++i) {
            formula_err =
                std::max(formula_err, std::abs(got[i] - ref[i]) / std::max(1.0, std::abs(ref[i])));
        }
    }
    double trace_err = 0.0;
    for (double beta : cfg.beta_values) {
        for (const auto& p : with_limit(cfg, beta)) {
            for (int k = 1; k <= n; ++k) {
                const double r = kPi * k / (n + 1);
                trace_err = std::max(
                    trace_err, std::abs(ricci_frame(p, r).trace() - scalar_curvature(p, r)));
            }
        }
    }
    double witness = kInf;
    for (int k = 1; k <= 500; ++k) {
        witness = std::min(witness, ricci_frame(ex, 0.05 * k / 501.0).lambda_r);
    }
    return result("AC06", desc, formula_err, 0.0, 1e-10,
                  formula_err <= 1e-10 && trace_err <= 1e-10 && witness < -1e3,
                  fmt("trace error %.3e, min lambda_r on (0, 0.05) %.4e", trace_err, witness));
}

CheckResult sobolev_boundary(const SuiteConfig& cfg, SuiteArtifacts& art) {
    const char* desc = "warp W^{1,1} = 8 pi, finite for p = 1.5 and 1.9, LOG divergence at p = 2 "
                       "for warp and metric";
    double worst = 0.0, worst_quality = 1.0;
    bool pass = true;
    std::string detail;
    for (double beta : cfg.beta_values) {
        const auto ex = WarpParams::extreme(beta);
        const double w11 = warp_sobolev_norm(ex, 1.0, 1, cfg.quad_tol).value();
        worst = std::max(worst, std::abs(w11 - 8.0 * kPi));
        for (double p : {1.5, 1.9}) {
            const auto nr = warp_sobolev_norm(ex, p, 1, cfg.quad_tol);
            pass = pass && nr.finite() && std::isfinite(nr.value());
        }
        const auto warp2 = warp_sobolev_norm(ex, 2.0, 1, cfg.quad_tol);
        const auto metric2 = metric_sobolev(ex, 2.0, 1, cfg.quad_tol);
        for (const auto* nr : {&warp2, &metric2}) {
            if (nr->finite() || !nr->divergence || nr->divergence->kind != GrowthKind::Log) {
                pass = false;
                continue;
            }
            worst_quality = std::min(worst_quality, nr->divergence->fit_quality);
        }
        if (warp2.divergence) {
            art.divergence_fits.push_back({fmt("warp_w12_beta%g", beta), *warp2.divergence});
        }
        if (metric2.divergence) {
            art.divergence_fits.push_back({fmt("metric_w12_beta%g", beta), *metric2.divergence});
            append(detail, fmt("beta=%g warp LOG slope %.4f, metric LOG slope %.2f", beta,
                               warp2.divergence ? warp2.divergence->coefficient : 0.0,
                               metric2.divergence->coefficient));
        }
    }
    append(detail, fmt("worst fit quality %.8f", worst_quality));
    return result("AC07", desc, worst, 8.0 * kPi, 1e-8,
                  pass && worst <= 1e-8 && worst_quality > 0.999, detail);
}

CheckResult convergence(const SuiteConfig& cfg, SuiteArtifacts& art) {
    const char* desc = "L^1 and W^{1,1.5} gaps of warp and metric strictly decreasing with final "
                       "ratio < 1e-2; compact sup gap strictly decreasing";
    if (!cfg.rate_checks_enabled()) return skipped("AC08", desc, rate_skip_reason(cfg));
    struct Item {
        GapQuantity q;
        double p;
        bool ratio_checked;
    };
    const Item items[] = {
        {GapQuantity::WarpLp, 1.0, true},     {GapQuantity::WarpW1p, 1.5, true},
        {GapQuantity::MetricLp, 1.0, true},   {GapQuantity::MetricW1p, 1.5, true},
        {GapQuantity::CompactSup, 1.0, false},
    };
    bool pass = true;
    double worst = 0.0;
    std::string detail;
    for (double beta : cfg.beta_values) {
        std::string line = fmt("beta=%g", beta);
        for (const auto& it : items) {
            auto table = convergence_table(cfg.schedule, beta, it.q, it.p);
            const double ratio = table.final_ratio();
            const bool dec = table.strictly_decreasing();
            pass = pass && dec && (!it.ratio_checked || ratio < 1e-2);
            if (it.ratio_checked) worst = std::max(worst, ratio);
            line += fmt(" %s ratio %.3e rate %.3f%s", to_string(it.q), ratio, table.fitted_rate,
                        dec ? "" : " NOT-DECREASING");
            art.convergence.push_back(std::move(table));
        }
        append(detail, line);
    }
    return result("AC08", desc, worst, 0.0, 1e-2, pass, detail);
}

CheckResult pairing(const SuiteConfig& cfg, SuiteArtifacts& art) {
    const char* desc = "REDUCED and IBP pairings agree on polynomial profiles; nonnegative "
                       "profiles pair to >= -1e-8";
    const auto battery = profile_battery(cfg.seed, 12);
    double worst = 0.0, min_nonneg = kInf;
    for (double beta : cfg.beta_values) {
        const auto ex = WarpParams::extreme(beta);
        for (const auto& u : battery) {
            const double red = scalar_distribution(ex, u, PairingMethod::Reduced, cfg.quad_tol).value;
            const double ibp = scalar_distribution(ex, u, PairingMethod::Ibp, cfg.quad_tol).value;
            worst = std::max(worst, std::abs(red - ibp));
            if (u.nonnegative()) min_nonneg = std::min({min_nonneg, red, ibp});
            art.goldens.push_back({u.id(), beta, PairingMethod::Reduced, red});
            art.goldens.push_back({u.id(), beta, PairingMethod::Ibp, ibp});
        }
    }
    return result("AC09", desc, worst, 0.0, 1e-6, worst <= 1e-6 && min_nonneg >= -1e-8,
                  fmt("%zu profiles, min pairing over nonnegative profiles %.6e", battery.size(),
                      min_nonneg));
}

CheckResult totals(const SuiteConfig& cfg, SuiteArtifacts&) {
    const char* desc = "total scalar of the limit = (2 pi)^2 (4 beta + 8 - 4 ln 4); "
                       "total - regular = 8 (2 pi)^2";
    const double four_pi2 = 4.0 * kPi * kPi;
    double worst = 0.0;
    std::string detail;
    for (double beta : cfg.beta_values) {
        const double total = total_scalar(WarpParams::extreme(beta), cfg.quad_tol).value;
        const double e1 = std::abs(total - four_pi2 * (4.0 * beta + 8.0 - 4.0 * std::log(4.0)));
        const double e2 = std::abs(total - regular_part_total(beta, cfg.quad_tol) - 8.0 * four_pi2);
        worst = std::max({worst, e1, e2});
        append(detail, fmt("beta=%g errors %.2e %.2e", beta, e1, e2));
    }
    return result("AC10", desc, worst, 0.0, 1e-8, worst <= 1e-8, detail);
}

CheckResult totals_continuity(const SuiteConfig& cfg, SuiteArtifacts& art) {
    const char* desc = "total scalar gap to the limit strictly decreasing, final ratio < 1e-2";
    if (!cfg.rate_checks_enabled()) return skipped("AC11", desc, rate_skip_reason(cfg));
    bool pass = true;
    double worst = 0.0;
    std::string detail;
    for (double beta : cfg.beta_values) {
        auto table = convergence_table(cfg.schedule, beta, GapQuantity::TotalScalarGap);
        const double ratio = table.final_ratio();
        pass = pass && table.strictly_decreasing() && ratio < 1e-2;
        worst = std::max(worst, ratio);
        append(detail, fmt("beta=%g ratio %.3e rate %.3f", beta, ratio, table.fitted_rate));
        art.convergence.push_back(std::move(table));
    }
    return result("AC11", desc, worst, 0.0, 1e-2, pass, detail);
}

CheckResult split_divergence(const SuiteConfig& cfg, SuiteArtifacts& art) {
    const char* desc = "split pairing halves with u = 1 grow DOUBLE_LOG, sum matches the "
                       "reduced truncation";
    const auto one = TestProfile::constant(1.0);
    double worst_cancel = 0.0, worst_quality = 1.0;
    bool kinds_ok = true;
    for (double beta : cfg.beta_values) {
        const auto probe = ll_split_probe(beta, one, default_eps_sequence(), cfg.quad_tol);
        worst_cancel = std::max(worst_cancel, probe.max_cancellation_error);
        for (const auto* g : {&probe.first, &probe.second}) {
            kinds_ok = kinds_ok && g->kind == GrowthKind::DoubleLog;
            worst_quality = std::min(worst_quality, g->fit_quality);
        }
        art.divergence_fits.push_back({fmt("split_first_beta%g", beta), probe.first});
        art.divergence_fits.push_back({fmt("split_second_beta%g", beta), probe.second});
    }
    return result("AC12", desc, worst_cancel, 0.0, 1e-8,
                  kinds_ok && worst_quality > 0.99 && worst_cancel <= 1e-8,
                  fmt("worst fit quality %.6f", worst_quality));
}

// Unit-speed initial velocity in a random direction of the orthonormal frame.
GeodesicState random_start(const WarpParams& p, std::uint64_t& state, std::mt19937_64& rng) {
    const Point3 x = random_point(state, 1e-2);
    double u[3], norm = 0.0;
    do {
        norm = 0.0;
        for (double& c : u) {
            c = 2.0 * static_cast<double>(rng() >> 11) * 0x1p-53 - 1.0;
            norm += c * c;
        }
    } while (norm > 1.0 || norm < 1e-6);
    norm = std::sqrt(norm);
    const double f = warp_eval(p, x.r, 0);
    return {x.r, x.theta, x.phi, u[0] / norm, u[1] / (norm * std::sin(x.r)), u[2] / (norm * f)};
}

CheckResult distances(const SuiteConfig& cfg, SuiteArtifacts& art) {
    const char* desc = "diameter <= (3 + 2 beta) pi; converged distances nondecreasing in j "
                       "within 2 tol; geodesic invariant drift < 1e-8 over t = 10";
    DistanceOptions opts;
    opts.tol = cfg.distance_tol;
    double worst_drop = -kInf, worst_diam = 0.0, worst_drift = 0.0;
    long compared = 0, converged = 0, total = 0;
    for (double beta : cfg.beta_values) {
        const auto sched = schedule_gen(cfg.schedule, beta);
        for (const auto& p : sched) {
            worst_diam = std::max(worst_diam,
                                  diameter_estimate(p, 200, cfg.seed) / ((3.0 + 2.0 * beta) * kPi));
        }
        std::uint64_t state = cfg.seed;
        for (int i = 0; i < cfg.distance_pairs; ++i) {
            const Point3 x = random_point(state, 1e-3);
            const Point3 y = random_point(state, 1e-3);
            double prev_mid = 0.0;
            bool prev_ok = false;
            for (int j = 0; j < cfg.schedule.count; ++j) {
                const auto est = distance_estimate(sched[j], x, y, opts);
                ++total;
                converged += est.converged;
                const double mid = 0.5 * (est.lower + est.upper);
                if (est.converged && prev_ok) {
                    worst_drop = std::max(worst_drop, prev_mid - mid);
                    ++compared;
                }
                prev_ok = est.converged;
                prev_mid = mid;
                art.distances.push_back({beta, j + 1, sched[j].a(), {x, y, est}});
            }
        }
        std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        std::uint64_t start_state = cfg.seed + 1;
        for (int i = 0; i < cfg.geodesic_starts; ++i) {
            const auto& p = sched[i % sched.size()];
            const auto traj = geodesic_integrate(p, random_start(p, start_state, rng), 10.0);
            worst_drift = std::max(worst_drift, traj.max_invariant_drift(p));
        }
    }
    const bool pass = worst_diam <= 1.0 && compared > 0 && worst_drop <= 2.0 * cfg.distance_tol &&
                      worst_drift < 1e-8;
    return result("AC13", desc, compared > 0 ? worst_drop : std::nan(""), 0.0,
                  2.0 * cfg.distance_tol, pass,
                  fmt("converged %ld of %ld, consecutive pairs compared %ld, max diameter / bound "
                      "%.4f, max drift %.3e",
                      converged, total, compared, worst_diam, worst_drift));
}

CheckResult surfaces(const SuiteConfig& cfg, SuiteArtifacts& art) {
    const char* desc = "phi-sphere area 4 pi; equator torus area 4 pi^2 beta with H = 0; "
                       "H sign (+,0,-) across pi/2; coordinate MinA = 4 pi";
    double worst = 0.0, worst_h = 0.0;
    int sign_errors = 0;
    const std::vector<CoordSurface> listed = {
        CoordSurface::make(SurfaceFamily::PhiSphere, 0.0),
        CoordSurface::make(SurfaceFamily::ThetaTorus, 0.0),
        CoordSurface::make(SurfaceFamily::RTorus, kPi / 4),
        CoordSurface::make(SurfaceFamily::RTorus, kPi / 2),
        CoordSurface::make(SurfaceFamily::RTorus, 3 * kPi / 4),
    };
    for (double beta : cfg.beta_values) {
        for (const auto& p : with_limit(cfg, beta)) {
            const double sphere = surface_area(p, listed[0], cfg.quad_tol).value;
            const double torus = surface_area(p, listed[3], cfg.quad_tol).value;
            const double minA = coordinate_minA(p);
            worst = std::max({worst, std::abs(sphere - 4.0 * kPi),
                              std::abs(torus - 4.0 * kPi * kPi * beta),
                              std::abs(minA - 4.0 * kPi)});
            worst_h = std::max(worst_h, std::abs(mean_curvature_r_torus(p, kPi / 2)));
            for (double d : {1e-3, 0.1, 0.5, 1.0, 1.5}) {
                sign_errors += !(mean_curvature_r_torus(p, kPi / 2 - d) > 0.0);
                sign_errors += !(mean_curvature_r_torus(p, kPi / 2 + d) < 0.0);
            }
            for (auto& row : surface_summary(p, listed)) {
                art.surfaces.push_back({beta, p.a(), row});
            }
        }
    }
    return result("AC14", desc, worst, 0.0, 1e-10,
                  worst <= 1e-10 && worst_h < 1e-10 && sign_errors == 0,
                  fmt("max |H(pi/2)| %.3e, sign pattern violations %d", worst_h, sign_errors));
}

using CheckFn = CheckResult (*)(const SuiteConfig&, SuiteArtifacts&);

struct Registered {
    const char* id;
    const char* group;
    CheckFn fn;
};

const Registered kChecks[] = {
    {"AC01", "norms", exact_integral},       {"AC02", "norms", limit_volume},
    {"AC03", "norms", volume_bound},         {"AC04", "curvature", scalar_nonnegative},
    {"AC05", "curvature", level_area_profile}, {"AC06", "curvature", ricci_regression},
    {"AC07", "norms", sobolev_boundary},     {"AC08", "norms", convergence},
    {"AC09", "distributional", pairing},     {"AC10", "distributional", totals},
    {"AC11", "distributional", totals_continuity},
    {"AC12", "distributional", split_divergence},
    {"AC13", "distance", distances},         {"AC14", "surfaces", surfaces},
};

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

template <class T>
void move_into(std::vector<T>& dst, std::vector<T>& src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

}  // namespace

std::vector<std::string> checks_for_group(const std::string& group) {
    std::vector<std::string> ids;
    for (const auto& c : kChecks) {
        if (group == "verify" || group == c.group) ids.push_back(c.id);
    }
    if (ids.empty()) throw ConfigError("unknown check group '" + group + "'");
    return ids;
}

SuiteOutcome run_suite(const SuiteConfig& cfg, const std::vector<std::string>& only) {
    cfg.validate();
    std::vector<const Registered*> selected;
    for (const auto& id : only) {
        if (std::none_of(std::begin(kChecks), std::end(kChecks),
                         [&](const Registered& c) { return id == c.id; })) {
            throw ConfigError("unknown check id '" + id + "'");
        }
    }
    for (const auto& c : kChecks) {
        if (only.empty() || std::find(only.begin(), only.end(), c.id) != only.end()) {
            selected.push_back(&c);
        }
    }

    SuiteOutcome out;
    out.report.metadata.started_at = utc_now();

    // Each task owns one slot; the assembler below is the only reader.
    std::vector<CheckResult> results(selected.size());
    std::vector<SuiteArtifacts> parts(selected.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < selected.size();) {
            try {
                results[i] = selected[i]->fn(cfg, parts[i]);
            } catch (const std::exception& e) {
                results[i] = {selected[i]->id, "check raised an exception", std::nan(""),
                              std::nan(""), std::nan(""), CheckStatus::Fail, e.what()};
            }
        }
    };
    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(selected.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < selected.size(); ++i) {
        out.report.checks.push_back(std::move(results[i]));
        auto& a = out.artifacts;
        move_into(a.convergence, parts[i].convergence);
        move_into(a.distances, parts[i].distances);
        move_into(a.surfaces, parts[i].surfaces);
        move_into(a.goldens, parts[i].goldens);
        move_into(a.divergence_fits, parts[i].divergence_fits);
    }
    auto& m = out.report.metadata;
    m.finished_at = utc_now();
    m.config_hash = config_hash(cfg);
    m.version = kVersion;
    m.compiler = __VERSION__;
    m.config = to_json(cfg);
    m.config.erase("out_dir");
    m.config.erase("threads");
    return out;
}

}  // namespace xwarp::harness
