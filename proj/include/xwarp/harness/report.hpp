#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace xwarp::harness {

enum class CheckStatus { Pass, Fail, Skip };

const char* to_string(CheckStatus s);
CheckStatus parse_check_status(const std::string& s);

/// One acceptance check. value is the headline measurement (usually the
/// worst error over the check's parameter sweep), target the reference or
/// bound it is compared with, tol the allowed deviation. detail records the
/// secondary measurements, or the reason for a SKIP.
struct CheckResult {
    std::string id;
    std::string description;
    double value = 0.0;
    double target = 0.0;
    double tol = 0.0;
    CheckStatus status = CheckStatus::Skip;
    std::string detail;

    friend bool operator==(const CheckResult&, const CheckResult&);
};

struct ReportMetadata {
    std::string config_hash;
    std::string started_at;   // ISO 8601, UTC
    std::string finished_at;
    std::string version;
    std::string compiler;
    nlohmann::json config;

    friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct VerificationReport {
    std::vector<CheckResult> checks;  // canonical id order
    ReportMetadata metadata;

    bool any_fail() const;
    const CheckResult* find(const std::string& id) const;

    friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

/// Canonical check ids, in report order.
const std::vector<std::string>& check_ids();

/// Non-finite values are written as the strings "inf", "-inf" and "nan" so
/// that the document stays valid JSON and round-trips.
nlohmann::json to_json(const VerificationReport& report);
VerificationReport report_from_json(const nlohmann::json& j);

/// One line per check: id, status, value, target, tol, description.
std::string format_line(const CheckResult& c);

}  // namespace xwarp::harness
