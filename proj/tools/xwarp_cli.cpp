// xwarp: command-line front end of the verification suite.
//
// Settings are resolved in three layers: built-in defaults, then the JSON
// file given with --config, then individual flags. Exit status is 0 when
// every check passes, 1 when any check fails and 2 on a configuration error.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xwarp/errors.hpp"
#include "xwarp/harness/config.hpp"
#include "xwarp/harness/emit.hpp"
#include "xwarp/harness/suite.hpp"

namespace {

using namespace xwarp::harness;

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Flags {
    std::string config_path;
    std::vector<double> betas;
    std::string out_dir;
    bool json = false;
    long long seed = -1;
    std::vector<std::string> checks;
    int threads = -1;
};

SuiteConfig resolve(const Flags& fl) {
    SuiteConfig cfg = fl.config_path.empty() ? SuiteConfig{} : load_config(fl.config_path);
    if (!fl.betas.empty()) cfg.beta_values = fl.betas;
    if (!fl.out_dir.empty()) cfg.out_dir = fl.out_dir;
    if (fl.seed >= 0) cfg.seed = static_cast<std::uint64_t>(fl.seed);
    if (fl.threads >= 0) cfg.threads = fl.threads;
    cfg.validate();
    return cfg;
}

std::vector<std::string> selection(const std::string& group, const Flags& fl) {
    const auto in_group = checks_for_group(group);
    if (fl.checks.empty()) return in_group;
    for (const auto& id : fl.checks) {
        if (std::find(in_group.begin(), in_group.end(), id) == in_group.end()) {
            throw xwarp::ConfigError("check " + id + " is not part of '" + group + "'");
        }
    }
    return fl.checks;
}

int run_checks(const std::string& group, const Flags& fl) {
    const SuiteConfig cfg = resolve(fl);
    const auto outcome = run_suite(cfg, selection(group, fl));
    if (fl.json) {
        std::cout << report_json_text(outcome.report);
    } else {
        for (const auto& c : outcome.report.checks) std::cout << format_line(c) << "\n";
    }
    if (!cfg.out_dir.empty()) {
        for (const auto& path : emit_all(cfg, outcome, cfg.out_dir)) std::cerr << "wrote " << path << "\n";
    }
    return outcome.report.any_fail() ? kExitFail : 0;
}

int run_plot(const Flags& fl) {
    SuiteConfig cfg = resolve(fl);
    if (cfg.out_dir.empty()) cfg.out_dir = "xwarp-plots";
    // The convergence and divergence plots need the tables of these checks.
    const auto outcome = run_suite(cfg, {"AC07", "AC08", "AC12"});
    for (const auto& path : emit_all(cfg, outcome, cfg.out_dir)) std::cout << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical verification suite for the warped S^2 x S^1 family"};
    app.require_subcommand(1);
    Flags fl;
    app.add_option("--config", fl.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--beta", fl.betas, "beta values (repeat or comma-separate)")->delimiter(',');
    app.add_option("--out-dir", fl.out_dir, "directory for report, CSV and SVG output");
    app.add_flag("--json", fl.json, "print the report as JSON");
    app.add_option("--seed", fl.seed, "seed for random profiles and point pairs")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--check", fl.checks, "run only these check ids (repeatable)")->delimiter(',');
    app.add_option("--threads", fl.threads, "worker threads, 0 for one per core")
        ->check(CLI::NonNegativeNumber);

    const std::pair<const char*, const char*> groups[] = {
        {"verify", "run every check"},
        {"curvature", "curvature checks"},
        {"norms", "quadrature, volume and Sobolev checks"},
        {"distributional", "distributional curvature checks"},
        {"distance", "distance and geodesic checks"},
        {"surfaces", "coordinate surface checks"},
    };
    for (const auto& [name, help] : groups) app.add_subcommand(name, help)->fallthrough();
    app.add_subcommand("plot", "write SVG plots")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        if (sub->get_name() == "plot") return run_plot(fl);
        return run_checks(sub->get_name(), fl);
    } catch (const xwarp::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
}
