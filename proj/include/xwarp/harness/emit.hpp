#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xwarp/harness/suite.hpp"

namespace xwarp::harness {

/// The report as pretty-printed JSON with a trailing newline. Key order is
/// fixed, so equal reports give identical text.
std::string report_json_text(const VerificationReport& report);

/// CSV renderings of the artifact tables. Headers:
///   distances:  beta,j,a,r1,theta1,phi1,r2,theta2,phi2,lower,upper,converged
///   surfaces:   beta,a,family,value,area,verdict,H
///   divergence: name,kind,coefficient,fit_quality,eps,feature,truncated
std::string distances_csv(const std::vector<DistanceRecord>& rows);
std::string surfaces_csv(const std::vector<SurfaceRecord>& rows);
std::string divergence_csv(const std::vector<NamedGrowth>& fits);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::optional<double> y_min;  // values outside [y_min, y_max] are clamped
    std::optional<double> y_max;
};

/// A standalone SVG document with one <polyline> per series. Points that are
/// not finite (or not positive on a log axis) are dropped.
std::string svg_plot(const PlotSpec& spec, const std::vector<Series>& series);

/// Profile plots for the first configured beta: one polyline per schedule
/// entry followed by a dashed one for the extreme member.
std::string warp_family_svg(const SuiteConfig& config);
std::string level_area_svg(const SuiteConfig& config);
std::string scalar_profile_svg(const SuiteConfig& config);
/// Log-log gap against a, one polyline per table at the first beta.
std::string convergence_svg(const std::vector<ConvergenceTable>& tables, double beta);
/// Truncated values against the growth regressor, with the fitted line.
std::string divergence_svg(const NamedGrowth& fit);

/// Writes report.json, the CSV tables and the SVG plots under dir, creating
/// it if needed. Returns the paths written. Throws std::runtime_error on I/O
/// failure.
std::vector<std::string> emit_all(const SuiteConfig& config, const SuiteOutcome& outcome,
                                  const std::string& dir);

/// Only the plots that need no suite results (the three profile plots).
std::vector<std::string> emit_profile_plots(const SuiteConfig& config, const std::string& dir);

}  // namespace xwarp::harness
