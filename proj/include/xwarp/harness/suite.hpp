#pragma once

#include <string>
#include <vector>

#include "xwarp/distributional.hpp"
#include "xwarp/geodesics.hpp"
#include "xwarp/harness/config.hpp"
#include "xwarp/harness/report.hpp"
#include "xwarp/measures.hpp"
#include "xwarp/surfaces.hpp"

namespace xwarp::harness {

inline constexpr const char* kVersion = "0.1.0";

struct DistanceRecord {
    double beta;
    int j;
    double a;
    DistanceRow row;
};

struct SurfaceRecord {
    double beta;
    double a;
    SurfaceRow row;
};

struct NamedGrowth {
    std::string name;
    GrowthModel model;
};

/// Tables produced along the way, for CSV and plot emission.
struct SuiteArtifacts {
    std::vector<ConvergenceTable> convergence;
    std::vector<DistanceRecord> distances;
    std::vector<SurfaceRecord> surfaces;
    std::vector<GoldenPairing> goldens;
    std::vector<NamedGrowth> divergence_fits;
};

struct SuiteOutcome {
    VerificationReport report;
    SuiteArtifacts artifacts;
};

/// Validates the config (ConfigError before any computation), then runs the
/// selected checks (all when `only` is empty) on a worker pool. A check that
/// throws is recorded as FAIL; it never aborts the run. Results and artifacts
/// are assembled in canonical id order, so the outcome depends only on the
/// config.
SuiteOutcome run_suite(const SuiteConfig& config, const std::vector<std::string>& only = {});

/// The check ids belonging to a CLI subcommand (curvature, norms, ...).
std::vector<std::string> checks_for_group(const std::string& group);

}  // namespace xwarp::harness
