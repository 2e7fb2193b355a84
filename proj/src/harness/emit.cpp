#include "xwarp/harness/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "xwarp/curvature.hpp"

namespace xwarp::harness {

namespace fs = std::filesystem;

std::string report_json_text(const VerificationReport& report) {
    return to_json(report).dump(2) + "\n";
}

namespace {

// The data line of a single-row CSV produced by one of the module writers.
std::string body_line(const std::string& csv) {
    const auto nl = csv.find('\n');
    return csv.substr(nl + 1);
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string distances_csv(const std::vector<DistanceRecord>& rows) {
    std::string out = "beta,j,a,r1,theta1,phi1,r2,theta2,phi2,lower,upper,converged\n";
    for (const auto& rec : rows) {
        out += num(rec.beta) + "," + std::to_string(rec.j) + "," + num(rec.a) + "," +
               body_line(distance_csv({rec.row}));
    }
    return out;
}

std::string surfaces_csv(const std::vector<SurfaceRecord>& rows) {
    std::string out = "beta,a,family,value,area,verdict,H\n";
    for (const auto& rec : rows) {
        out += num(rec.beta) + "," + num(rec.a) + "," + body_line(surface_csv({rec.row}));
    }
    return out;
}

std::string divergence_csv(const std::vector<NamedGrowth>& fits) {
    std::string out = "name,kind,coefficient,fit_quality,eps,feature,truncated\n";
    for (const auto& [name, m] : fits) {
        for (std::size_t k = 0; k < m.eps.size(); ++k) {
            out += name + "," + to_string(m.kind) + "," + num(m.coefficient) + "," +
                   num(m.fit_quality) + "," + num(m.eps[k]) + "," +
                   num(growth_feature(m.kind, m.eps[k], m.beta)) + "," + num(m.truncated[k]) +
                   "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string svg_plot(const PlotSpec& spec, const std::vector<Series>& series) {
    constexpr double W = 720, H = 480, L = 80, R = 180, T = 40, B = 60;
    const auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    const auto ty = [&](double v) {
        if (spec.y_min) v = std::max(v, *spec.y_min);
        if (spec.y_max) v = std::min(v, *spec.y_max);
        return spec.log_y ? std::log10(v) : v;
    };
    const auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) &&
               (!spec.log_y || y > 0);
    };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::ostringstream o;
    char buf[160];
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(spec.title) << "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                  "stroke=\"black\"/>\n",
                  L, T, W - L - R, H - T - B);
    o << buf;
    for (int k = 0; k <= 4; ++k) {
        const double vx = x0 + (x1 - x0) * k / 4, vy = y0 + (y1 - y0) * k / 4;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s%.3g</text>\n",
                      px(vx), H - B + 18, spec.log_x ? "1e" : "", vx);
        o << buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s%.3g</text>\n",
                      L - 6, py(vy) + 4, spec.log_y ? "1e" : "", vy);
        o << buf;
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">"
      << xml_escape(spec.x_label) << "</text>\n";
    o << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (T + H - B) / 2 << ")\">" << xml_escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % 10];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
          << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", first ? "" : " ", px(tx(s.x[i])),
                          py(ty(s.y[i])));
            o << buf;
            first = false;
        }
        o << "\"><title>" << xml_escape(s.label) << "</title></polyline>\n";
        const double ly = T + 14 + 16.0 * static_cast<double>(k);
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n", W - R + 12, ly, color,
                      xml_escape(s.label).c_str());
        o << buf;
    }
    o << "</svg>\n";
    return o.str();
}

namespace {

template <class F>
std::vector<Series> profile_series(const SuiteConfig& cfg, F value) {
    const double beta = cfg.beta_values.front();
    auto params = schedule_gen(cfg.schedule, beta);
    params.push_back(WarpParams::extreme(beta));
    constexpr int n = 400;
    std::vector<Series> out;
    for (const auto& p : params) {
        Series s;
        char label[48];
        if (p.is_extreme()) {
            std::snprintf(label, sizeof label, "a = 0");
        } else {
            std::snprintf(label, sizeof label, "a = %.3g", p.a());
        }
        s.label = label;
        s.dashed = p.is_extreme();
        for (int k = 0; k < n; ++k) {
            const double r = kPi * (k + 0.5) / n;
            s.x.push_back(r);
            s.y.push_back(value(p, r));
        }
        out.push_back(std::move(s));
    }
    return out;
}

PlotSpec labelled(std::string title, std::string x, std::string y) {
    PlotSpec spec;
    spec.title = std::move(title);
    spec.x_label = std::move(x);
    spec.y_label = std::move(y);
    return spec;
}

std::string beta_title(const char* what, const SuiteConfig& cfg) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s, beta = %g", what, cfg.beta_values.front());
    return buf;
}

}  // namespace

std::string warp_family_svg(const SuiteConfig& cfg) {
    return svg_plot(labelled(beta_title("Warping functions f_a(r)", cfg), "r", "f"),
                    profile_series(cfg, [](const WarpParams& p, double r) {
                        return warp_eval(p, r, 0);
                    }));
}

std::string level_area_svg(const SuiteConfig& cfg) {
    return svg_plot(labelled(beta_title("Level torus area A_a(r)", cfg), "r", "A"),
                    profile_series(cfg, [](const WarpParams& p, double r) {
                        return level_area(p, r);
                    }));
}

std::string scalar_profile_svg(const SuiteConfig& cfg) {
    PlotSpec spec = labelled(beta_title("Scalar curvature (clamped to [0, 10])", cfg), "r", "Scalar");
    spec.y_min = 0.0;
    spec.y_max = 10.0;
    return svg_plot(spec, profile_series(cfg, [](const WarpParams& p, double r) {
                        return scalar_curvature(p, r);
                    }));
}

std::string convergence_svg(const std::vector<ConvergenceTable>& tables, double beta) {
    std::vector<Series> series;
    for (const auto& t : tables) {
        if (t.beta != beta) continue;
        Series s;
        char label[64];
        std::snprintf(label, sizeof label, "%s (rate %.2f)", to_string(t.quantity), t.fitted_rate);
        s.label = label;
        for (const auto& row : t.rows) {
            s.x.push_back(row.a);
            s.y.push_back(row.value);
        }
        series.push_back(std::move(s));
    }
    char title[64];
    std::snprintf(title, sizeof title, "Gap to the extreme member, beta = %g", beta);
    PlotSpec spec = labelled(title, "a", "gap");
    spec.log_x = spec.log_y = true;
    return svg_plot(spec, series);
}

std::string divergence_svg(const NamedGrowth& fit) {
    const auto& m = fit.model;
    Series data{"truncated integral", {}, {}};
    Series line{"fit", {}, {}, true};
    for (std::size_t k = 0; k < m.eps.size(); ++k) {
        const double x = growth_feature(m.kind, m.eps[k], m.beta);
        data.x.push_back(x);
        data.y.push_back(m.truncated[k]);
        line.x.push_back(x);
        line.y.push_back(m.intercept + m.coefficient * x);
    }
    char title[96];
    std::snprintf(title, sizeof title, "%s: %s slope %.4g, R^2 %.6f", fit.name.c_str(),
                  to_string(m.kind), m.coefficient, m.fit_quality);
    return svg_plot(labelled(title, "growth regressor", "I(eps)"), {data, line});
}

// ---------------------------------------------------------------------------

namespace {

void write_file(const fs::path& path, const std::string& text, std::vector<std::string>& written) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path.string());
}

fs::path prepare(const std::string& dir) {
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
    return root;
}

}  // namespace

std::vector<std::string> emit_profile_plots(const SuiteConfig& cfg, const std::string& dir) {
    const fs::path root = prepare(dir);
    std::vector<std::string> written;
    write_file(root / "warp_family.svg", warp_family_svg(cfg), written);
    write_file(root / "level_area.svg", level_area_svg(cfg), written);
    write_file(root / "scalar_profiles.svg", scalar_profile_svg(cfg), written);
    return written;
}

std::vector<std::string> emit_all(const SuiteConfig& cfg, const SuiteOutcome& outcome,
                                  const std::string& dir) {
    const fs::path root = prepare(dir);
    std::vector<std::string> written;
    const auto& art = outcome.artifacts;
    write_file(root / "report.json", report_json_text(outcome.report), written);
    for (const auto& t : art.convergence) {
        char name[96];
        std::snprintf(name, sizeof name, "convergence_%s_p%g_beta%g.csv", to_string(t.quantity),
                      t.p, t.beta);
        write_file(root / name, to_csv(t), written);
    }
    if (!art.distances.empty()) write_file(root / "distances.csv", distances_csv(art.distances), written);
    if (!art.surfaces.empty()) write_file(root / "surfaces.csv", surfaces_csv(art.surfaces), written);
    if (!art.goldens.empty()) write_file(root / "goldens.csv", golden_csv(art.goldens), written);
    if (!art.divergence_fits.empty()) {
        write_file(root / "divergence_fits.csv", divergence_csv(art.divergence_fits), written);
        for (const auto& fit : art.divergence_fits) {
            write_file(root / ("divergence_" + fit.name + ".svg"), divergence_svg(fit), written);
        }
    }
    for (auto& p : emit_profile_plots(cfg, dir)) written.push_back(std::move(p));
    if (!art.convergence.empty()) {
        write_file(root / "convergence.svg", convergence_svg(art.convergence, cfg.beta_values.front()),
                   written);
    }
    return written;
}

}  // namespace xwarp::harness
