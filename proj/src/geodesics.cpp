#include "xwarp/geodesics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <sstream>

#include "xwarp/errors.hpp"
#include "xwarp/quadrature.hpp"

namespace xwarp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfPi = 0.5 * kPi;

// f, f', f'' for any real r, extending the closed forms evenly through the
// poles. Trajectories with p_theta = 0 may cross r = 0 in coordinates.
WarpJet jet_any(const WarpParams& params, double r) {
    const double s = std::sin(r), c = std::cos(r), a = params.a();
    if (params.is_extreme() && s == 0.0) {
        throw DomainError("extreme warping function is singular at the poles");
    }
    WarpJet j{};
    j.f = std::log1p(a) - log_sin2_plus_a_trig(std::abs(s), c, a) + params.beta();
    if (params.is_extreme()) {
        const double cot = c / s;
        j.df = -2.0 * cot;
        j.d2f = 2.0 + 2.0 * cot * cot;
    } else {
        const double s2 = s * s, den = s2 + a;
        j.df = -2.0 * c * s / den;
        j.d2f = 4.0 * c * c * s2 / (den * den) - 2.0 * c * c / den + 2.0 * s2 / den;
    }
    return j;
}

double signed_arc(double from, double to) {
    double d = std::remainder(to - from, kTwoPi);
    return d;
}

std::array<double, 3> embed(double r, double theta) {
    return {std::sin(r) * std::cos(theta), std::sin(r) * std::sin(theta), std::cos(r)};
}

double sphere_angle(const std::array<double, 3>& x, const std::array<double, 3>& y) {
    const double cx = x[1] * y[2] - x[2] * y[1];
    const double cy = x[2] * y[0] - x[0] * y[2];
    const double cz = x[0] * y[1] - x[1] * y[0];
    const double dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

// f at the endpoint of a leg; the anchored bound multiplies it by d(phi),
// and a vanishing d(phi) must not turn an infinite f into NaN.
double fibre_cost(const WarpParams& params, double r, double dphi) {
    if (dphi == 0.0) return 0.0;
    if (params.is_extreme() && (r == 0.0 || r == kPi)) return kInf;
    return warp_eval(params, r, 0) * dphi;
}

double anchored_bound(const WarpParams& params, const Point3& from, const Point3& anchor) {
    return std::abs(from.r - anchor.r) +
           std::sin(anchor.r) * circle_distance(from.theta, anchor.theta) +
           fibre_cost(params, anchor.r, circle_distance(from.phi, anchor.phi));
}

// ---------------------------------------------------------------------------
// Geodesic ODE

using State = std::array<double, 6>;

State rhs(const WarpParams& params, const State& y) {
    const double s = std::sin(y[0]), c = std::cos(y[0]);
    const WarpJet j = jet_any(params, y[0]);
    if (s == 0.0) throw DomainError("geodesic reached a coordinate pole");
    return {y[3],
            y[4],
            y[5],
            s * c * y[4] * y[4] + j.f * j.df * y[5] * y[5],
            -2.0 * (c / s) * y[3] * y[4],
            -2.0 * (j.df / j.f) * y[3] * y[5]};
}

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

template <class Observer>
State dopri5(const WarpParams& params, State y, double t_end, double tol, Observer&& observe,
             long& rejected) {
    double t = 0.0;
    double h = std::min(1e-2, t_end);
    State k1 = rhs(params, y);
    observe(t, y);
    auto axpy = [](const State& base, double h, std::initializer_list<std::pair<double, const State*>> terms) {
        State out = base;
        for (const auto& [coef, k] : terms) {
            for (int i = 0; i < 6; ++i) out[i] += h * coef * (*k)[i];
        }
        return out;
    };
    while (t < t_end) {
        if (t + h > t_end) h = t_end - t;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw DomainError("geodesic integration step size underflow");
        }
        const State k2 = rhs(params, axpy(y, h, {{a21, &k1}}));
        const State k3 = rhs(params, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const State k4 = rhs(params, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = rhs(params, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 = rhs(params, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                                 {a65, &k5}}));
        const State yn = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = rhs(params, yn);
        double err = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double e =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(yn[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / 6.0);
        if (!std::isfinite(err)) {
            h *= 0.2;
            ++rejected;
            continue;
        }
        if (err <= 1.0) {
            t += h;
            y = yn;
            k1 = k7;
            observe(t, y);
            h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            ++rejected;
        }
    }
    return y;
}

State to_array(const GeodesicState& s) { return {s.r, s.theta, s.phi, s.dr, s.dtheta, s.dphi}; }

GeodesicState from_array(const State& y) { return {y[0], y[1], y[2], y[3], y[4], y[5]}; }

// ---------------------------------------------------------------------------
// Shooting

struct ShotResult {
    bool ok = false;
    double length = kInf;
    State v{};
};

constexpr double kShootTol = 1e-10;

bool end_state(const WarpParams& params, const CurvePoint& start, const State& v, State& out) {
    try {
        long rej = 0;
        out = dopri5(params, {start.r, start.theta, start.phi, v[0], v[1], v[2]}, 1.0, 1e-11,
                     [](double, const State&) {}, rej);
        return std::all_of(out.begin(), out.end(), [](double x) { return std::isfinite(x); });
    } catch (const DomainError&) {
        return false;
    }
}

std::array<double, 4> residual(const WarpParams& params, const State& end, const Point3& target) {
    const auto xe = embed(end[0], end[1]);
    const auto xt = embed(target.r, target.theta);
    const double ft = params.is_extreme() ? 1.0 : warp_eval(params, target.r, 0);
    return {xe[0] - xt[0], xe[1] - xt[1], xe[2] - xt[2],
            ft * signed_arc(target.phi, end[2])};
}

double norm4(const std::array<double, 4>& r) {
    return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3]);
}

bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> b,
            std::array<double, 3>& x) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
        }
        if (std::abs(m[piv][col]) < 1e-300) return false;
        std::swap(m[piv], m[col]);
        std::swap(b[piv], b[col]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 3; ++k) m[row][k] -= f * m[col][k];
            b[row] -= f * b[col];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double acc = b[row];
        for (int k = row + 1; k < 3; ++k) acc -= m[row][k] * x[k];
        x[row] = acc / m[row][row];
    }
    return true;
}

// Levenberg-Marquardt on the initial velocity so that the unit-time
// geodesic from `start` lands on `target`.
ShotResult shoot(const WarpParams& params, const CurvePoint& start, const Point3& target,
                 State v, int max_iter = 30) {
    ShotResult res;
    State end{};
    if (!end_state(params, start, v, end)) return res;
    auto r = residual(params, end, target);
    double rn = norm4(r);
    double lambda = 1e-3;
    for (int it = 0; it < max_iter && rn > kShootTol; ++it) {
        std::array<std::array<double, 4>, 3> jac{};
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
            State vp = v;
            const double h = 1e-7 * std::max(1.0, std::abs(v[i]));
            vp[i] += h;
            State ep{};
            if (!end_state(params, start, vp, ep)) {
                ok = false;
                break;
            }
            const auto rp = residual(params, ep, target);
            for (int k = 0; k < 4; ++k) jac[i][k] = (rp[k] - r[k]) / h;
        }
        if (!ok) return res;
        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> jtr{};
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 4; ++k) jtr[i] -= jac[i][k] * r[k];
            for (int j = 0; j < 3; ++j) {
                for (int k = 0; k < 4; ++k) jtj[i][j] += jac[i][k] * jac[j][k];
            }
        }
        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; ++tries) {
            auto m = jtj;
            for (int i = 0; i < 3; ++i) m[i][i] += lambda * (jtj[i][i] + 1e-12);
            std::array<double, 3> d{};
            if (!solve3(m, jtr, d)) {
                lambda *= 10.0;
                continue;
            }
            State vn = v;
            for (int i = 0; i < 3; ++i) vn[i] += d[i];
            State en{};
            if (end_state(params, start, vn, en)) {
                const auto rr = residual(params, en, target);
                const double nn = norm4(rr);
                if (nn < rn) {
                    v = vn;
                    end = en;
                    r = rr;
                    rn = nn;
                    lambda = std::max(lambda / 4.0, 1e-9);
                    improved = true;
                    break;
                }
            }
            lambda *= 8.0;
        }
        if (!improved) return res;
    }
    if (rn > kShootTol) return res;
    const double sr = std::sin(start.r);
    const double f0 = jet_any(params, start.r).f;
    const double energy = v[0] * v[0] + sr * sr * v[1] * v[1] + f0 * f0 * v[2] * v[2];
    const auto xl = embed(end[0], end[1]);
    const Point3 landed = Point3::make(std::acos(std::clamp(xl[2], -1.0, 1.0)),
                                       std::atan2(xl[1], xl[0]), end[2]);
    // The landing point may miss the target by the residual; close the gap
    // with the closed-form bound so the reported length stays an upper bound.
    res.ok = true;
    res.length = std::sqrt(energy) + upper_bound_distance(params, landed, target);
    res.v = v;
    return res;
}

ShotResult continuation(const WarpParams& params, const Curve& seed, const Point3& target,
                        int stages) {
    const CurvePoint start = seed.position(0.0);
    ShotResult last;
    State v{};
    double prev_s = 0.0;
    for (int k = 1; k <= stages; ++k) {
        const double s = static_cast<double>(k) / stages;
        const CurvePoint q = seed.position(s);
        if (k == 1) {
            v = {q.r - start.r, q.theta - start.theta, q.phi - start.phi};
        } else {
            for (double& x : v) x *= s / prev_s;
        }
        const Point3 tq = k == stages ? target : Point3::make(std::clamp(q.r, 0.0, kPi), q.theta, q.phi);
        last = shoot(params, start, tq, v);
        if (!last.ok) return last;
        v = last.v;
        prev_s = s;
    }
    return last;
}

// ---------------------------------------------------------------------------
// Mesh graph

std::vector<double> grid_with(double lo, double hi, int n, std::initializer_list<double> extra,
                              bool periodic) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
        g.push_back(periodic ? lo + (hi - lo) * i / n : lo + (hi - lo) * i / std::max(1, n - 1));
    }
    for (double e : extra) g.push_back(e);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }),
            g.end());
    return g;
}

struct MeshResult {
    double length = kInf;
    std::vector<CurvePoint> path;
};

MeshResult mesh_path(const WarpParams& params, const Point3& p1, const Point3& p2,
                     const DistanceOptions& opts) {
    const double collar = params.is_extreme() ? opts.pole_collar : kPi / (2.0 * opts.mesh_r);
    const auto rg = grid_with(collar, kPi - collar, opts.mesh_r, {p1.r, p2.r, kHalfPi}, false);
    const auto tg = grid_with(0.0, kTwoPi, opts.mesh_theta, {p1.theta, p2.theta}, true);
    const auto pg = grid_with(0.0, kTwoPi, opts.mesh_phi, {p1.phi, p2.phi}, true);
    const int nr = static_cast<int>(rg.size()), nt = static_cast<int>(tg.size()),
              np = static_cast<int>(pg.size());
    if (params.is_extreme() && (rg.front() <= 0.0 || rg.back() >= kPi)) return {};

    std::vector<double> fr(nr), s2(nr);
    for (int i = 0; i < nr; ++i) {
        fr[i] = warp_eval(params, rg[i], 0);
        s2[i] = std::sin(rg[i]) * std::sin(rg[i]);
    }
    auto index = [&](int i, int j, int k) { return (i * nt + j) * np + k; };
    auto locate = [](const std::vector<double>& g, double x) {
        const auto it = std::min_element(g.begin(), g.end(), [x](double a, double b) {
            return std::abs(a - x) < std::abs(b - x);
        });
        return static_cast<int>(it - g.begin());
    };
    const int src = index(locate(rg, p1.r), locate(tg, p1.theta), locate(pg, p1.phi));
    const int dst = index(locate(rg, p2.r), locate(tg, p2.theta), locate(pg, p2.phi));

    const std::size_t n = static_cast<std::size_t>(nr) * nt * np;
    std::vector<double> dist(n, kInf);
    std::vector<int> pred(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        if (u == dst) break;
        const int i = u / (nt * np), j = (u / np) % nt, k = u % np;
        for (int di = -1; di <= 1; ++di) {
            const int ii = i + di;
            if (ii < 0 || ii >= nr) continue;
            const double dr = rg[ii] - rg[i];
            double maxs2 = std::max(s2[i], s2[ii]);
            if ((rg[i] - kHalfPi) * (rg[ii] - kHalfPi) < 0.0) maxs2 = 1.0;
            const double maxf = std::max(fr[i], fr[ii]);
            for (int dj = -1; dj <= 1; ++dj) {
                const int jj = (j + dj + nt) % nt;
                const double dth = circle_distance(tg[j], tg[jj]);
                for (int dk = -1; dk <= 1; ++dk) {
                    if (di == 0 && dj == 0 && dk == 0) continue;
                    const int kk = (k + dk + np) % np;
                    const double dph = circle_distance(pg[k], pg[kk]);
                    // Speed of the coordinate-straight segment is at most this everywhere on it.
                    const double w =
                        std::sqrt(dr * dr + maxs2 * dth * dth + maxf * maxf * dph * dph);
                    const int v = index(ii, jj, kk);
                    if (d + w < dist[v]) {
                        dist[v] = d + w;
                        pred[v] = u;
                        heap.push({d + w, v});
                    }
                }
            }
        }
    }
    MeshResult out;
    if (!std::isfinite(dist[dst])) return out;
    std::vector<int> chain;
    for (int u = dst; u != -1; u = pred[u]) chain.push_back(u);
    std::reverse(chain.begin(), chain.end());

    // Lift the node chain, starting from p1 itself.
    CurvePoint cur{p1.r, p1.theta, p1.phi};
    out.path.push_back(cur);
    double extra = 0.0;
    auto node_point = [&](int u) {
        return Point3{rg[u / (nt * np)], tg[(u / np) % nt], pg[u % np]};
    };
    // p1 and p2 are grid nodes, but guard against rounding in locate().
    extra += upper_bound_distance(params, p1, node_point(chain.front()));
    extra += upper_bound_distance(params, node_point(chain.back()), p2);
    for (std::size_t m = 1; m < chain.size(); ++m) {
        const Point3 q = node_point(chain[m]);
        cur.r = q.r;
        cur.theta += signed_arc(cur.theta, q.theta);
        cur.phi += signed_arc(cur.phi, q.phi);
        out.path.push_back(cur);
    }
    out.length = dist[dst] + extra;
    return out;
}

// Great circle on the sphere factor with phi moving linearly by the shorter arc.
double great_circle_length(const WarpParams& params, const Point3& p1, const Point3& p2) {
    const auto x1 = embed(p1.r, p1.theta), x2 = embed(p2.r, p2.theta);
    const double sigma = sphere_angle(x1, x2);
    const double dphi = circle_distance(p1.phi, p2.phi);
    if (sigma == 0.0) {
        return fibre_cost(params, p1.r, dphi);
    }
    if (sigma > kPi - 1e-12) return kInf;  // antipodal: no unique arc
    const double ss = std::sin(sigma);
    auto cos_r = [&](double t) {
        const double wa = std::sin((1.0 - t) * sigma) / ss, wb = std::sin(t * sigma) / ss;
        return std::clamp(wa * x1[2] + wb * x2[2], -1.0, 1.0);
    };
    try {
        const auto speed = [&](double t) {
            const double c = cos_r(t);
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            if (dphi == 0.0) return sigma;
            const double f = warp_jet_trig(params, s, c).f;
            return std::sqrt(sigma * sigma + f * f * dphi * dphi);
        };
        return integrate(speed, 0.0, 1.0, 1e-11).value + 1e-10;
    } catch (const std::exception&) {
        return kInf;
    }
}

Curve equator_route(const Point3& p1, const Point3& p2) {
    const double dth = signed_arc(p1.theta, p2.theta), dph = signed_arc(p1.phi, p2.phi);
    return polyline({{p1.r, p1.theta, p1.phi},
                     {kHalfPi, p1.theta, p1.phi},
                     {kHalfPi, p1.theta + dth, p1.phi + dph},
                     {p2.r, p1.theta + dth, p1.phi + dph}});
}

// ---------------------------------------------------------------------------
// Calibration lower bound
//
// For a curve whose r-range is [rho_lo, rho_hi] and any P, Q >= 0 with
// P^2 / sin^2 r + Q^2 / f^2 <= 1 on that range, Cauchy-Schwarz against the
// covector (w(r), P / sin r, Q / f), w = sqrt(1 - P^2 / sin^2 r - Q^2 / f^2),
// gives
//   length >= P |Theta| + Q |Phi| + int w(r) |dr|,
// where Theta, Phi are the lifted angle changes and every r between rho_lo
// and the nearer endpoint is crossed at least twice. The bound is maximised
// over (P, Q) and minimised over r-ranges by best-first branch and bound.
// On each grid cell w is bounded below through the cell maxima of 1/sin^2
// and 1/f^2, so the discretisation only loosens the bound.

class CalibrationBound {
public:
    CalibrationBound(const WarpParams& params, double r1, double r2, int cells)
        : rmin_(std::min(r1, r2)), rmax_(std::max(r1, r2)) {
        std::vector<double> nodes;
        for (int i = 0; i <= cells; ++i) nodes.push_back(kPi * i / cells);
        nodes.push_back(rmin_);
        nodes.push_back(rmax_);
        nodes.push_back(kHalfPi);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        nodes_ = nodes;
        const std::size_t m = nodes.size() - 1;
        width_.resize(m);
        inv_s2_.resize(m);
        inv_f2_.resize(m);
        auto inv_f2_at = [&](double r) {
            if (params.is_extreme() && (r <= 0.0 || r >= kPi)) return 0.0;
            const double f = warp_eval(params, r, 0);
            return 1.0 / (f * f);
        };
        for (std::size_t i = 0; i < m; ++i) {
            const double lo = nodes[i], hi = nodes[i + 1];
            width_[i] = hi - lo;
            const double smin = std::min(std::sin(lo), std::sin(hi));
            inv_s2_[i] = smin > 0.0 ? 1.0 / (smin * smin) : kInf;
            // f is smallest at the point of the cell nearest the equator.
            const double near = std::clamp(kHalfPi, lo, hi);
            inv_f2_[i] = inv_f2_at(near);
        }
        imin_ = index_of(rmin_);
        imax_ = index_of(rmax_);
    }

    /// Lower bound over all curves, or `ceiling` once that is certified.
    double solve(double theta, double phi, double ceiling, int max_cells) const {
        struct Cell {
            int a0, a1, b0, b1;
            double lb;
            bool operator>(const Cell& o) const { return lb > o.lb; }
        };
        std::priority_queue<Cell, std::vector<Cell>, std::greater<>> heap;
        auto push = [&](int a0, int a1, int b0, int b1) {
            heap.push({a0, a1, b0, b1, cell_bound(a0, a1, b0, b1, theta, phi)});
        };
        const int last = static_cast<int>(nodes_.size()) - 1;
        push(0, imin_, imax_, last);
        int evaluated = 1;
        while (!heap.empty()) {
            const Cell c = heap.top();
            if (c.lb >= ceiling) return ceiling;
            const bool split_a = c.a1 - c.a0 >= c.b1 - c.b0;
            const int span = split_a ? c.a1 - c.a0 : c.b1 - c.b0;
            if (span <= 1 || evaluated >= max_cells) return c.lb;
            heap.pop();
            if (split_a) {
                const int mid = (c.a0 + c.a1) / 2;
                push(c.a0, mid, c.b0, c.b1);
                push(mid, c.a1, c.b0, c.b1);
            } else {
                const int mid = (c.b0 + c.b1) / 2;
                push(c.a0, c.a1, c.b0, mid);
                push(c.a0, c.a1, mid, c.b1);
            }
            evaluated += 2;
        }
        return ceiling;
    }

private:
    int index_of(double r) const {
        return static_cast<int>(std::lower_bound(nodes_.begin(), nodes_.end(), r) - nodes_.begin());
    }

    // rho_lo in [nodes[a0], nodes[a1]], rho_hi in [nodes[b0], nodes[b1]].
    double cell_bound(int a0, int a1, int b0, int b1, double theta, double phi) const {
        // Constraints on cells [a0, b1); the integral weight counts crossings
        // that every curve of the cell must make.
        std::vector<double> ka, kb, c;
        ka.reserve(b1 - a0);
        for (int i = a0; i < b1; ++i) {
            int mult = 0;
            if (i >= a1 && i < imin_) mult = 2;
            else if (i >= imin_ && i < imax_) mult = 1;
            else if (i >= imax_ && i < b0) mult = 2;
            ka.push_back(inv_s2_[i]);
            kb.push_back(inv_f2_[i]);
            c.push_back(mult * width_[i]);
        }
        auto along = [&](double cs, double sn, double& best_rho) {
            // Largest feasible rho on this ray.
            double kmax = 0.0;
            for (std::size_t i = 0; i < ka.size(); ++i) {
                const double k = (cs > 0.0 ? ka[i] * cs * cs : 0.0) + kb[i] * sn * sn;
                kmax = std::max(kmax, k);
            }
            const double lin = cs * theta + sn * phi;
            auto value = [&](double rho) {
                double v = rho * lin;
                for (std::size_t i = 0; i < ka.size(); ++i) {
                    if (c[i] == 0.0) continue;
                    const double k = (cs > 0.0 ? ka[i] * cs * cs : 0.0) + kb[i] * sn * sn;
                    v += c[i] * std::sqrt(std::max(0.0, 1.0 - rho * rho * k));
                }
                return v;
            };
            if (!std::isfinite(kmax)) {
                best_rho = 0.0;
                return value(0.0);
            }
            const double rmax = kmax > 0.0 ? 1.0 / std::sqrt(kmax) : 1e6;
            // The value is concave in rho; bisect on the sign of its slope.
            auto slope = [&](double rho) {
                double d = lin;
                for (std::size_t i = 0; i < ka.size(); ++i) {
                    if (c[i] == 0.0) continue;
                    const double k = (cs > 0.0 ? ka[i] * cs * cs : 0.0) + kb[i] * sn * sn;
                    const double w = std::sqrt(std::max(1e-300, 1.0 - rho * rho * k));
                    d -= c[i] * rho * k / w;
                }
                return d;
            };
            double lo = 0.0, hi = rmax;
            if (slope(hi) >= 0.0) {
                best_rho = hi;
                return value(hi);
            }
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (lo + hi);
                (slope(mid) > 0.0 ? lo : hi) = mid;
            }
            best_rho = lo;
            return value(lo);
        };
        // The best value along each ray is quasi-concave in the ray angle.
        double lo = 0.0, hi = kHalfPi;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double rho;
        double f1 = along(std::cos(x1), std::sin(x1), rho);
        double f2 = along(std::cos(x2), std::sin(x2), rho);
        double best = std::max({f1, f2, along(1.0, 0.0, rho), along(0.0, 1.0, rho)});
        for (int it = 0; it < 28; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = along(std::cos(x2), std::sin(x2), rho);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = along(std::cos(x1), std::sin(x1), rho);
            }
            best = std::max({best, f1, f2});
        }
        return best;
    }

    double rmin_, rmax_;
    std::vector<double> nodes_, width_, inv_s2_, inv_f2_;
    int imin_ = 0, imax_ = 0;
};

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------------------

Curve polyline(std::vector<CurvePoint> nodes) {
    if (nodes.size() < 2) throw ConfigError("polyline needs at least two nodes");
    const double m = static_cast<double>(nodes.size() - 1);
    Curve c;
    auto seg = [m, n = nodes.size()](double t) {
        const double x = std::clamp(t, 0.0, 1.0) * m;
        const std::size_t i = std::min(static_cast<std::size_t>(x), n - 2);
        return std::pair<std::size_t, double>{i, x - static_cast<double>(i)};
    };
    c.position = [nodes, seg](double t) {
        const auto [i, u] = seg(t);
        const CurvePoint& a = nodes[i];
        const CurvePoint& b = nodes[i + 1];
        return CurvePoint{a.r + u * (b.r - a.r), a.theta + u * (b.theta - a.theta),
                          a.phi + u * (b.phi - a.phi)};
    };
    c.velocity = [nodes, seg, m](double t) {
        const auto [i, u] = seg(t);
        (void)u;
        const CurvePoint& a = nodes[i];
        const CurvePoint& b = nodes[i + 1];
        return CurvePoint{m * (b.r - a.r), m * (b.theta - a.theta), m * (b.phi - a.phi)};
    };
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) c.breaks.push_back(i / m);
    return c;
}

Curve coordinate_segment(CurvePoint a, CurvePoint b) { return polyline({a, b}); }

Curve anchored_path(const Point3& p1, const Point3& p2) {
    const double dth = signed_arc(p1.theta, p2.theta), dph = signed_arc(p1.phi, p2.phi);
    return polyline({{p1.r, p1.theta, p1.phi},
                     {p2.r, p1.theta, p1.phi},
                     {p2.r, p1.theta + dth, p1.phi},
                     {p2.r, p1.theta + dth, p1.phi + dph}});
}

double path_length(const WarpParams& params, const Curve& curve, int samples) {
    if (samples < 1) throw ConfigError("path_length needs at least one panel");
    static constexpr std::array<double, 5> gx = {
        -0.906179845938663992797626878299392, -0.538469310105683091036314420700208, 0.0,
        0.538469310105683091036314420700208, 0.906179845938663992797626878299392};
    static constexpr std::array<double, 5> gw = {
        0.236926885056189087514264040719918, 0.478628670499366468041291514835638,
        0.568888888888888888888888888888889, 0.478628670499366468041291514835638,
        0.236926885056189087514264040719918};
    auto speed = [&](double t) {
        const CurvePoint p = curve.position(t);
        const CurvePoint v = curve.velocity(t);
        const double s = std::sin(p.r);
        const double f = jet_any(params, p.r).f;
        return std::sqrt(v.r * v.r + s * s * v.theta * v.theta + f * f * v.phi * v.phi);
    };
    std::vector<double> knots{0.0};
    for (double b : curve.breaks) {
        if (b > 0.0 && b < 1.0) knots.push_back(b);
    }
    knots.push_back(1.0);
    std::sort(knots.begin(), knots.end());

    double total = 0.0;
    for (std::size_t piece = 0; piece + 1 < knots.size(); ++piece) {
        const double lo = knots[piece], hi = knots[piece + 1];
        if (!(hi > lo)) continue;
        double prev = kInf;
        for (int panels = samples; panels <= (1 << 20); panels *= 2) {
            double sum = 0.0;
            const double h = (hi - lo) / panels;
            for (int i = 0; i < panels; ++i) {
                const double mid = lo + (i + 0.5) * h;
                for (int q = 0; q < 5; ++q) sum += gw[q] * speed(mid + 0.5 * h * gx[q]);
            }
            sum *= 0.5 * h;
            if (std::abs(sum - prev) < 1e-8 * std::max(1.0, std::abs(sum))) {
                prev = sum;
                break;
            }
            if (panels * 2 > (1 << 20)) {
                throw DomainError("path length refinement did not converge");
            }
            prev = sum;
        }
        total += prev;
    }
    return total;
}

double sphere_distance(const Point3& p1, const Point3& p2) {
    return sphere_angle(embed(p1.r, p1.theta), embed(p2.r, p2.theta));
}

double upper_bound_distance(const WarpParams& params, const Point3& p1, const Point3& p2) {
    if (p1.r == p2.r && circle_distance(p1.theta, p2.theta) == 0.0 &&
        circle_distance(p1.phi, p2.phi) == 0.0) {
        return 0.0;
    }
    const double dth = circle_distance(p1.theta, p2.theta);
    const double dph = circle_distance(p1.phi, p2.phi);
    const double beta = params.beta();
    const double legs = std::abs(p1.r - kHalfPi) + std::abs(p2.r - kHalfPi);
    return std::min({anchored_bound(params, p1, p2), anchored_bound(params, p2, p1),
                     legs + dth + beta * dph, legs + std::hypot(dth, beta * dph)});
}

double lower_bound_distance(const WarpParams& params, const Point3& p1, const Point3& p2) {
    const double dr = std::abs(p1.r - p2.r);
    const double ds = sphere_distance(p1, p2);
    const double dph = circle_distance(p1.phi, p2.phi);
    const double beta = params.beta();
    const double product = std::hypot(ds, beta * dph);
    double best = std::max(dr, product);
    if (dph == 0.0) return best;

    // A curve whose closest approach to the equator is m stays where
    // f >= f(pi/2 - m), and its r-travel is at least e1 + e2 - 2m.
    const double e1 = p1.r - kHalfPi, e2 = p2.r - kHalfPi;
    if (e1 * e2 <= 0.0) return best;
    const double ea = std::abs(e1), eb = std::abs(e2), mmax = std::min(ea, eb);
    constexpr int kCells = 256;
    double sweep = kInf;
    for (int k = 0; k < kCells; ++k) {
        const double m0 = mmax * k / kCells, m1 = mmax * (k + 1) / kCells;
        const double f0 = warp_eval(params, kHalfPi - m0, 0);
        const double travel = std::max(ds, ea + eb - 2.0 * m1);
        sweep = std::min(sweep, std::hypot(travel, f0 * dph));
    }
    return std::max(best, sweep);
}

Invariants invariants(const WarpParams& params, const GeodesicState& s) {
    const double sr = std::sin(s.r);
    const double f = jet_any(params, s.r).f;
    return {s.dr * s.dr + sr * sr * s.dtheta * s.dtheta + f * f * s.dphi * s.dphi,
            sr * sr * s.dtheta, f * f * s.dphi};
}

double Trajectory::max_invariant_drift(const WarpParams& params) const {
    if (states.empty()) return 0.0;
    const Invariants i0 = invariants(params, states.front());
    const double speed = std::sqrt(i0.energy);
    if (speed == 0.0) return 0.0;
    const double f0 = jet_any(params, states.front().r).f;
    double worst = 0.0;
    for (const auto& s : states) {
        const Invariants i = invariants(params, s);
        worst = std::max({worst, std::abs(i.energy - i0.energy) / i0.energy,
                          std::abs(i.p_theta - i0.p_theta) / speed,
                          std::abs(i.p_phi - i0.p_phi) / (speed * f0)});
    }
    return worst;
}

Trajectory geodesic_integrate(const WarpParams& params, const GeodesicState& start, double t_end,
                              double tol) {
    if (!(t_end >= 0.0) || !(tol > 0.0)) throw ConfigError("need t_end >= 0 and tol > 0");
    if (params.is_extreme() && std::sin(start.r) == 0.0) {
        throw DomainError("geodesic start on a singular pole");
    }
    Trajectory traj;
    if (t_end == 0.0) {
        traj.t.push_back(0.0);
        traj.states.push_back(start);
        return traj;
    }
    dopri5(params, to_array(start), t_end, tol,
           [&](double t, const State& y) {
               traj.t.push_back(t);
               traj.states.push_back(from_array(y));
           },
           traj.steps_rejected);
    return traj;
}

DistanceEstimate distance_estimate(const WarpParams& params, const Point3& p1, const Point3& p2,
                                   const DistanceOptions& opts) {
    if (params.is_extreme() && (std::sin(p1.r) == 0.0 || std::sin(p2.r) == 0.0)) {
        throw DomainError("distances of the extreme member need endpoints off the poles");
    }
    DistanceEstimate est;
    est.lower = lower_bound_distance(params, p1, p2);
    est.upper = upper_bound_distance(params, p1, p2);
    est.upper_source = "closed_form";
    auto offer = [&](double len, const char* source) {
        if (len < est.upper) {
            est.upper = len;
            est.upper_source = source;
        }
    };
    if (est.upper == 0.0) {
        est.lower = 0.0;
        est.converged = true;
        return est;
    }
    offer(great_circle_length(params, p1, p2), "great_circle");

    // Shooting from a point near a coordinate pole is ill-conditioned;
    // start from the endpoint farther from the poles.
    const bool flip = std::sin(p1.r) < std::sin(p2.r);
    auto shoot_along = [&](const Curve& seed, int stages) {
        Curve c = seed;
        if (flip) {
            c.position = [pos = seed.position](double t) { return pos(1.0 - t); };
        }
        const ShotResult shot = continuation(params, c, flip ? p1 : p2, stages);
        if (shot.ok) {
            est.shooting_converged = true;
            offer(shot.length, "shooting");
        }
    };
    const auto open = [&](double margin) { return est.upper - est.lower >= margin; };
    const double dth = signed_arc(p1.theta, p2.theta), dph = signed_arc(p1.phi, p2.phi);
    const Curve simple_seeds[] = {
        coordinate_segment({p1.r, p1.theta, p1.phi}, {p2.r, p1.theta + dth, p1.phi + dph}),
        equator_route(p1, p2),
    };
    if (opts.use_shooting && open(opts.tol)) {
        for (const Curve& seed : simple_seeds) shoot_along(seed, opts.continuation_stages);
    }
    if (opts.calibration_cells > 0 && open(0.5 * opts.tol)) {
        const CalibrationBound cb(params, p1.r, p2.r, opts.calibration_grid);
        const double ath = circle_distance(p1.theta, p2.theta);
        const double aph = circle_distance(p1.phi, p2.phi);
        double best = est.upper;
        for (double th : {ath, kTwoPi - ath}) {
            for (double ph : {aph, kTwoPi - aph}) {
                best = std::min(best, cb.solve(th, ph, best, opts.calibration_cells));
            }
        }
        est.lower = std::max(est.lower, best);
    }
    // The mesh is the expensive stage; it only runs while the bracket is
    // still open, escalating to longer continuation and then a finer mesh
    // (shooting near the poles is sensitive to the seed). A lower bound
    // computed against an older ceiling stays valid.
    if (opts.use_mesh) {
        const std::pair<double, int> ladder[] = {{1.0, 1}, {1.0, 2}, {1.5, 2}};
        MeshResult mesh;
        double mesh_scale = 0.0;
        for (const auto& [scale, mult] : ladder) {
            if (!open(opts.tol)) break;
            if (scale != mesh_scale) {
                DistanceOptions m = opts;
                m.mesh_r = static_cast<int>(std::lround(opts.mesh_r * scale));
                m.mesh_theta = static_cast<int>(std::lround(opts.mesh_theta * scale));
                m.mesh_phi = static_cast<int>(std::lround(opts.mesh_phi * scale));
                mesh = mesh_path(params, p1, p2, m);
                mesh_scale = scale;
                offer(mesh.length, "mesh");
            }
            if (!opts.use_shooting) continue;
            if (mesh.path.size() >= 2 && open(opts.tol)) {
                shoot_along(polyline(mesh.path), opts.continuation_stages * mult);
            }
            if (mult > 1 && scale == 1.0) {
                for (const Curve& seed : simple_seeds) {
                    if (open(opts.tol)) shoot_along(seed, opts.continuation_stages * mult);
                }
            }
        }
    }
    est.lower = std::min(est.lower, est.upper);
    est.converged = est.upper - est.lower < opts.tol;
    return est;
}

Point3 random_point(std::uint64_t& state, double collar) {
    for (;;) {
        const double c = 2.0 * uniform01(state) - 1.0;
        const double theta = kTwoPi * uniform01(state);
        const double phi = kTwoPi * uniform01(state);
        const double r = std::acos(c);
        if (r >= collar && r <= kPi - collar) return Point3::make(r, theta, phi);
    }
}

double diameter_estimate(const WarpParams& params, int sample_count, std::uint64_t seed) {
    if (sample_count < 0) throw ConfigError("sample_count must be >= 0");
    std::uint64_t state = seed;
    const double collar = params.is_extreme() ? 1e-3 : 0.0;
    double best = 0.0;
    for (int i = 0; i < sample_count; ++i) {
        const Point3 a = random_point(state, collar), b = random_point(state, collar);
        best = std::max(best, upper_bound_distance(params, a, b));
    }
    return best;
}

std::string distance_csv(const std::vector<DistanceRow>& rows) {
    std::ostringstream out;
    out << "r1,theta1,phi1,r2,theta2,phi2,lower,upper,converged\n";
    char buf[400];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      row.p1.r, row.p1.theta, row.p1.phi, row.p2.r, row.p2.theta, row.p2.phi,
                      row.estimate.lower, row.estimate.upper, row.estimate.converged ? 1 : 0);
        out << buf;
    }
    return out.str();
}

}  // namespace xwarp
