#include "xwarp/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "xwarp/errors.hpp"

namespace xwarp::harness {

using nlohmann::json;

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "PASS";
        case CheckStatus::Fail: return "FAIL";
        case CheckStatus::Skip: return "SKIP";
    }
    return "?";
}

CheckStatus parse_check_status(const std::string& s) {
    if (s == "PASS") return CheckStatus::Pass;
    if (s == "FAIL") return CheckStatus::Fail;
    if (s == "SKIP") return CheckStatus::Skip;
    throw ConfigError("unknown check status '" + s + "'");
}

namespace {

bool same_number(double x, double y) {
    return x == y || (std::isnan(x) && std::isnan(y));
}

json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double number_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("not a number: " + s);
}

}  // namespace

bool operator==(const CheckResult& x, const CheckResult& y) {
    return x.id == y.id && x.description == y.description && same_number(x.value, y.value) &&
           same_number(x.target, y.target) && same_number(x.tol, y.tol) &&
           x.status == y.status && x.detail == y.detail;
}

bool VerificationReport::any_fail() const {
    for (const auto& c : checks) {
        if (c.status == CheckStatus::Fail) return true;
    }
    return false;
}

const CheckResult* VerificationReport::find(const std::string& id) const {
    for (const auto& c : checks) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

const std::vector<std::string>& check_ids() {
    static const std::vector<std::string> ids = {
        "AC01", "AC02", "AC03", "AC04", "AC05", "AC06", "AC07",
        "AC08", "AC09", "AC10", "AC11", "AC12", "AC13", "AC14",
    };
    return ids;
}

json to_json(const VerificationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({
            {"id", c.id},
            {"description", c.description},
            {"value", number(c.value)},
            {"target", number(c.target)},
            {"tol", number(c.tol)},
            {"status", to_string(c.status)},
            {"detail", c.detail},
        });
    }
    const auto& m = r.metadata;
    return {
        {"checks", checks},
        {"metadata",
         {
             {"config_hash", m.config_hash},
             {"started_at", m.started_at},
             {"finished_at", m.finished_at},
             {"version", m.version},
             {"compiler", m.compiler},
             {"config", m.config},
         }},
    };
}

VerificationReport report_from_json(const json& j) {
    VerificationReport r;
    try {
        for (const auto& c : j.at("checks")) {
            r.checks.push_back({
                c.at("id").get<std::string>(),
                c.at("description").get<std::string>(),
                number_from(c.at("value")),
                number_from(c.at("target")),
                number_from(c.at("tol")),
                parse_check_status(c.at("status").get<std::string>()),
                c.at("detail").get<std::string>(),
            });
        }
        const json& m = j.at("metadata");
        r.metadata.config_hash = m.at("config_hash").get<std::string>();
        r.metadata.started_at = m.at("started_at").get<std::string>();
        r.metadata.finished_at = m.at("finished_at").get<std::string>();
        r.metadata.version = m.at("version").get<std::string>();
        r.metadata.compiler = m.at("compiler").get<std::string>();
        r.metadata.config = m.at("config");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string format_line(const CheckResult& c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %s value=%.6e target=%.6e tol=%.1e  ", c.id.c_str(),
                  to_string(c.status), c.value, c.target, c.tol);
    std::string line = buf + c.description;
    if (!c.detail.empty()) line += " [" + c.detail + "]";
    return line;
}

}  // namespace xwarp::harness
