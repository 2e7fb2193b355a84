#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "xwarp/warp_family.hpp"

namespace xwarp::harness {

/// Everything a suite run depends on. Loaded from a JSON file, then
/// overridden by command-line flags; validate() runs before any computation.
struct SuiteConfig {
    std::vector<double> beta_values{2.0, 3.0, 5.0};
    ParamSchedule schedule{};
    double quad_tol = 1e-10;
    int grid_n = 10'000;
    int distance_pairs = 50;
    int geodesic_starts = 20;
    double distance_tol = 1e-2;
    std::uint64_t seed = 20'240'601;
    std::string out_dir;  // empty: no files are written
    int threads = 0;  // 0: one worker per hardware thread

    /// Throws ConfigError on the first violated constraint.
    void validate() const;

    /// Rate fits need at least this many schedule members.
    static constexpr int kMinRateCount = 4;
    bool rate_checks_enabled() const noexcept { return schedule.count >= kMinRateCount; }

    friend bool operator==(const SuiteConfig&, const SuiteConfig&);
};

/// Reads the keys present in j over the defaults. Unknown keys and wrongly
/// typed values raise ConfigError. Does not validate.
SuiteConfig config_from_json(const nlohmann::json& j, SuiteConfig base = {});
SuiteConfig load_config(const std::string& path);

nlohmann::json to_json(const SuiteConfig& config);

/// FNV-1a hash (hex) of the settings that influence numerical results;
/// out_dir and threads are excluded.
std::string config_hash(const SuiteConfig& config);

}  // namespace xwarp::harness
