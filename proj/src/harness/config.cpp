#include "xwarp/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "xwarp/errors.hpp"

namespace xwarp::harness {

using nlohmann::json;

void SuiteConfig::validate() const {
    if (beta_values.empty()) {
        throw ConfigError("beta_values must not be empty");
    }
    for (double b : beta_values) {
        if (!std::isfinite(b) || b < 2.0) {
            throw ConfigError("every beta must be finite and >= 2");
        }
    }
    schedule.validate();
    if (!std::isfinite(quad_tol) || quad_tol <= 0.0) {
        throw ConfigError("quad_tol must be positive");
    }
    if (!std::isfinite(distance_tol) || distance_tol <= 0.0) {
        throw ConfigError("distance_tol must be positive");
    }
    if (grid_n < 3) {
        throw ConfigError("grid_n must be at least 3");
    }
    if (distance_pairs < 1) {
        throw ConfigError("distance_pairs must be positive");
    }
    if (geodesic_starts < 1) {
        throw ConfigError("geodesic_starts must be positive");
    }
    if (threads < 0) {
        throw ConfigError("threads must be >= 0");
    }
}

bool operator==(const SuiteConfig& x, const SuiteConfig& y) {
    return x.beta_values == y.beta_values && x.schedule.a0 == y.schedule.a0 &&
           x.schedule.ratio == y.schedule.ratio && x.schedule.count == y.schedule.count &&
           x.quad_tol == y.quad_tol && x.grid_n == y.grid_n &&
           x.distance_pairs == y.distance_pairs && x.geodesic_starts == y.geodesic_starts &&
           x.distance_tol == y.distance_tol && x.seed == y.seed && x.out_dir == y.out_dir &&
           x.threads == y.threads;
}

namespace {

template <class T>
T read(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

// json's get<int> silently truncates 2.5; integers must be written as such.
int read_int(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(std::string("config key '") + key + "' must be an integer");
    }
    return read<int>(j, key);
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError(std::string("unknown config key '") + key + "' in " + where);
        }
    }
}

}  // namespace

SuiteConfig config_from_json(const json& j, SuiteConfig c) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    reject_unknown(j,
                   {"beta_values", "schedule", "quad_tol", "grid_n", "distance_pairs",
                    "geodesic_starts", "distance_tol", "seed", "out_dir", "threads"},
                   "top level");
    if (j.contains("beta_values")) c.beta_values = read<std::vector<double>>(j, "beta_values");
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        if (!s.is_object()) throw ConfigError("schedule must be an object");
        reject_unknown(s, {"a0", "ratio", "count"}, "schedule");
        if (s.contains("a0")) c.schedule.a0 = read<double>(s, "a0");
        if (s.contains("ratio")) c.schedule.ratio = read<double>(s, "ratio");
        if (s.contains("count")) c.schedule.count = read_int(s, "count");
    }
    if (j.contains("quad_tol")) c.quad_tol = read<double>(j, "quad_tol");
    if (j.contains("grid_n")) c.grid_n = read_int(j, "grid_n");
    if (j.contains("distance_pairs")) c.distance_pairs = read_int(j, "distance_pairs");
    if (j.contains("geodesic_starts")) c.geodesic_starts = read_int(j, "geodesic_starts");
    if (j.contains("distance_tol")) c.distance_tol = read<double>(j, "distance_tol");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
        c.seed = read<std::uint64_t>(j, "seed");
    }
    if (j.contains("out_dir")) c.out_dir = read<std::string>(j, "out_dir");
    if (j.contains("threads")) c.threads = read_int(j, "threads");
    return c;
}

SuiteConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return config_from_json(j);
}

json to_json(const SuiteConfig& c) {
    return {
        {"beta_values", c.beta_values},
        {"schedule", {{"a0", c.schedule.a0}, {"ratio", c.schedule.ratio}, {"count", c.schedule.count}}},
        {"quad_tol", c.quad_tol},
        {"grid_n", c.grid_n},
        {"distance_pairs", c.distance_pairs},
        {"geodesic_starts", c.geodesic_starts},
        {"distance_tol", c.distance_tol},
        {"seed", c.seed},
        {"out_dir", c.out_dir},
        {"threads", c.threads},
    };
}

std::string config_hash(const SuiteConfig& c) {
    json j = to_json(c);
    j.erase("out_dir");
    j.erase("threads");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace xwarp::harness
