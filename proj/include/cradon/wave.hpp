#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cradon/abel.hpp"
#include "cradon/errors.hpp"
#include "cradon/fields.hpp"
#include "cradon/geometry.hpp"
#include "cradon/radon.hpp"

namespace cradon {

/// Grid, time stepping and cutoff parameters shared by the wave operations.
/// dt = 0 requests the CFL-limited step 0.9*h/sqrt(2), rounded down so that
/// an integer number of steps lands exactly on T.
struct WaveConfig {
    Vec2 origin{-1.5, -1.5};
    double spacing = 0.01;
    int nx = 301;
    int ny = 301;
    double dt = 0.0;
    double T = 2.5;
    double T0 = 2.0;
    int sponge_cells = 40;
    double sponge_strength = 0.0;  // 0 -> auto-scaled to the layer width
    int n_curve_samples = 256;
    /// Declared singular-support disc K of the phantom (center, radius);
    /// when present, T and T0 must exceed every curve-to-K distance.
    std::optional<std::pair<Vec2, double>> declared_support;

    double effective_dt() const {
        const double cfl = 0.9 * spacing / std::sqrt(2.0);
        double step = (dt > 0.0) ? dt : cfl;
        const int n = std::max(1, static_cast<int>(std::ceil(T / step - 1e-12)));
        return T / n;
    }

    int n_steps() const {
        return static_cast<int>(std::llround(T / effective_dt()));
    }

    void validate(const Curve* curve = nullptr) const {
        if (!(spacing > 0) || nx < 8 || ny < 8)
            throw config_error("WaveConfig: bad grid spec");
        if (!(T > 0) || !(T0 < T) || !(T0 > 0))
            throw config_error("WaveConfig: need 0 < T0 < T");
        const double cfl = spacing / std::sqrt(2.0) * 0.9;
        if (effective_dt() > cfl * (1.0 + 1e-12))
            throw config_error("WaveConfig: dt violates the CFL bound 0.9*h/sqrt(2)");
        if (declared_support && curve) {
            const auto& [kc, kr] = *declared_support;
            double far = 0.0;
            if (curve->kind() == Curve::Kind::AnalyticCircle) {
                far = dist(curve->center(), kc) + curve->radius() + kr;
            } else {
                for (const auto& smp : curve->samples())
                    far = std::max(far, dist(smp.point, kc) + kr);
            }
            if (!(T > far) || !(T0 > far))
                throw config_error(
                    "WaveConfig: T0 and T must exceed the largest distance " +
                    std::to_string(far) +
                    " from the curve to the declared singular support");
        }
    }
};

/// Smooth time cutoff: 1 on [0, T0], 0 at T, quintic-smoothstep monotone
/// in between.
inline double time_cutoff(double t, double T0, double T) {
    if (t <= T0) return 1.0;
    if (t >= T) return 0.0;
    return smoothstep5((T - t) / (T - T0));
}

/// Multiply a trace by the cutoff chi(t) in place.
inline void apply_time_cutoff(BoundaryTrace& tr, double T0, double T) {
    for (int k = 0; k < tr.nt(); ++k) {
        const double chi = time_cutoff(tr.t_grid[static_cast<std::size_t>(k)], T0, T);
        for (int j = 0; j < tr.ns(); ++j) tr.at(k, j) *= chi;
    }
}

enum class WaveRegion {
    full_plane,     // whole box, sponge frame emulating outgoing behavior
    closed_box,     // whole box, reflecting (u = 0) frame, no sponge
    inside_curve,   // interior of a closed curve, Dirichlet band on the staircase
    outside_curve,  // exterior of a closed curve in the box, sponge frame
};

enum class Side { left, right };

namespace detail {

enum CellType : std::uint8_t { Dead = 0, Active = 1, Band = 2 };

/// Precomputed masks, sponge profile and boundary-band bookkeeping for one
/// leapfrog domain.
struct WaveDomain {
    const WaveConfig* cfg;
    int nx, ny;
    double h, dt;
    std::vector<std::uint8_t> type;
    std::vector<double> sigma;       // sponge damping, 0 outside the layer
    std::vector<int> band_index;     // flat node indices of Dirichlet band cells
    std::vector<double> band_s;      // curve parameter of each band cell

    WaveDomain(const WaveConfig& c, WaveRegion region, const Curve* curve)
        : cfg(&c), nx(c.nx), ny(c.ny), h(c.spacing), dt(c.effective_dt()),
          type(static_cast<std::size_t>(c.nx) * c.ny, Active),
          sigma(static_cast<std::size_t>(c.nx) * c.ny, 0.0) {
        auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
        auto node = [&](int i, int j) {
            return Vec2{c.origin.x + i * h, c.origin.y + j * h};
        };

        // Outermost ring is always pinned to zero.
        for (int i = 0; i < nx; ++i) {
            type[idx(i, 0)] = Dead;
            type[idx(i, ny - 1)] = Dead;
        }
        for (int j = 0; j < ny; ++j) {
            type[idx(0, j)] = Dead;
            type[idx(nx - 1, j)] = Dead;
        }

        if (region == WaveRegion::full_plane || region == WaveRegion::outside_curve) {
            const int w = c.sponge_cells;
            const double width = w * h;
            const double smax =
                c.sponge_strength > 0 ? c.sponge_strength : 32.0 / width;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const int d = std::min(std::min(i, nx - 1 - i),
                                           std::min(j, ny - 1 - j));
                    if (d < w) {
                        const double xi = static_cast<double>(w - d) / w;
                        sigma[idx(i, j)] = smax * xi * xi * xi;
                    }
                }
        }

        if (region == WaveRegion::inside_curve || region == WaveRegion::outside_curve) {
            if (!curve || !curve->closed())
                throw config_error("WaveDomain: region needs a closed curve");
            const bool want_inside = region == WaveRegion::inside_curve;
            std::vector<std::uint8_t> in(type.size(), 0);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    in[idx(i, j)] = curve->contains(node(i, j)) ? 1 : 0;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const std::size_t k = idx(i, j);
                    if (in[k] != (want_inside ? 1 : 0)) {
                        type[k] = Dead;
                        continue;
                    }
                    if (type[k] == Dead) continue;  // outer frame
                    const bool edge = i == 0 || i == nx - 1 || j == 0 || j == ny - 1;
                    bool neighbor_across =
                        edge ||
                        in[idx(i - 1, j)] != in[k] || in[idx(i + 1, j)] != in[k] ||
                        in[idx(i, j - 1)] != in[k] || in[idx(i, j + 1)] != in[k];
                    if (neighbor_across) {
                        type[k] = Band;
                        band_index.push_back(static_cast<int>(k));
                        band_s.push_back(project_on_curve(*curve, node(i, j)));
                    }
                }
        }
    }

    static double project_on_curve(const Curve& curve, Vec2 x) {
        if (curve.kind() == Curve::Kind::AnalyticCircle) {
            const Vec2 rel = x - curve.center();
            double a = std::atan2(rel.y, rel.x);
            if (a < 0) a += 2.0 * M_PI;
            return a * curve.radius();
        }
        const auto& smp = curve.samples();
        const std::size_t n = smp.size();
        double best_d = std::numeric_limits<double>::max(), best_s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = smp[i].point;
            const Vec2 b = smp[(i + 1) % n].point;
            const double sb = (i + 1 == n) ? curve.length() : smp[i + 1].s;
            const Vec2 ab = b - a;
            double u = (x - a).dot(ab) / ab.norm2();
            u = std::clamp(u, 0.0, 1.0);
            const double d = dist(x, a + u * ab);
            if (d < best_d) {
                best_d = d;
                best_s = smp[i].s + u * (sb - smp[i].s);
            }
        }
        return best_s;
    }

    /// One leapfrog step: next = 2 cur - prev + dt^2 lap(cur), with graded
    /// damping inside the sponge. Dead and Band cells are left untouched.
    void step(const std::vector<double>& prev, const std::vector<double>& cur,
              std::vector<double>& next) const {
        const double r2 = dt * dt / (h * h);
        const int nx_ = nx, ny_ = ny;
        const double* p = prev.data();
        const double* u = cur.data();
        double* nxt = next.data();
        const std::uint8_t* ty = type.data();
        const double* sg = sigma.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int j = 1; j < ny_ - 1; ++j) {
            const std::size_t row = static_cast<std::size_t>(j) * nx_;
            for (int i = 1; i < nx_ - 1; ++i) {
                const std::size_t k = row + i;
                if (ty[k] != Active) continue;
                const double lap =
                    u[k - 1] + u[k + 1] + u[k - nx_] + u[k + nx_] - 4.0 * u[k];
                const double s = sg[k];
                if (s == 0.0) {
                    nxt[k] = 2.0 * u[k] - p[k] + r2 * lap;
                } else {
                    const double a = 0.5 * s * dt;
                    nxt[k] = (2.0 * u[k] - (1.0 - a) * p[k] + r2 * lap) / (1.0 + a);
                }
            }
        }
    }

    /// Impose Dirichlet values on the staircase band from a trace, bilinear
    /// in (t, s) with periodic wrap in s.
    void set_band(std::vector<double>& level, const BoundaryTrace& data,
                  double t, double chi) const {
        if (band_index.empty()) return;
        const int nt = data.nt(), ns = data.ns();
        const double t0 = data.t_grid.front(), dtt = data.dt();
        const double s0 = data.s_grid.front();
        const double ds = data.s_grid[1] - data.s_grid[0];
        for (std::size_t b = 0; b < band_index.size(); ++b) {
            double ft = (t - t0) / dtt;
            ft = std::clamp(ft, 0.0, static_cast<double>(nt - 1));
            int kt = std::min(static_cast<int>(ft), nt - 2);
            const double ut = ft - kt;
            double fs = (band_s[b] - s0) / ds;
            int js = static_cast<int>(std::floor(fs));
            const double us = fs - js;
            const int j0 = ((js % ns) + ns) % ns;
            const int j1 = (j0 + 1) % ns;
            const double v =
                (1 - ut) * ((1 - us) * data.at(kt, j0) + us * data.at(kt, j1)) +
                ut * ((1 - us) * data.at(kt + 1, j0) + us * data.at(kt + 1, j1));
            level[static_cast<std::size_t>(band_index[b])] = chi * v;
        }
    }
};

} // namespace detail

/// Boundary trace of the forward solution: leapfrog evolution of
/// u_tt = lap(u) from Cauchy data (0, f) on the sponged full-plane box,
/// sampled on gamma(s_j) at every time step.
inline BoundaryTrace forward_trace(const GridField& f, const WaveConfig& cfg,
                                   const Curve& curve) {
    cfg.validate(&curve);
    if (f.nx != cfg.nx || f.ny != cfg.ny ||
        std::abs(f.spacing - cfg.spacing) > 1e-12)
        throw config_error("forward_trace: f grid must match the config grid");

    detail::WaveDomain dom(cfg, WaveRegion::full_plane, &curve);
    const double dt = dom.dt;
    const int steps = cfg.n_steps();

    // Support must keep a margin from the sponge layer.
    bool touches_sponge = false;
    for (int j = 0; j < cfg.ny && !touches_sponge; ++j)
        for (int i = 0; i < cfg.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * cfg.nx + i;
            if (f.values[k] != 0.0 && (dom.sigma[k] > 0 || dom.type[k] == detail::Dead)) {
                touches_sponge = true;
                break;
            }
        }

    BoundaryTrace tr;
    tr.t_grid = uniform_grid(0.0, dt, steps + 1);
    tr.s_grid.resize(static_cast<std::size_t>(cfg.n_curve_samples));
    for (int j = 0; j < cfg.n_curve_samples; ++j)
        tr.s_grid[static_cast<std::size_t>(j)] =
            curve.length() * j / cfg.n_curve_samples;
    tr.s_periodic = curve.closed();
    tr.truncation_warning = touches_sponge;
    tr.values.assign(static_cast<std::size_t>(steps + 1) * cfg.n_curve_samples, 0.0);

    std::vector<Vec2> probes(tr.s_grid.size());
    for (std::size_t j = 0; j < probes.size(); ++j)
        probes[j] = curve.point(tr.s_grid[j]);

    const std::size_t ncell = f.values.size();
    std::vector<double> prev(ncell, 0.0), cur(ncell, 0.0), next(ncell, 0.0);

    // Second-order start from (u, u_t) = (0, f): u(dt) = dt f + dt^3/6 lap f.
    {
        const double c3 = dt * dt * dt / (6.0 * cfg.spacing * cfg.spacing);
        for (int j = 1; j < cfg.ny - 1; ++j)
            for (int i = 1; i < cfg.nx - 1; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * cfg.nx + i;
                if (dom.type[k] != detail::Active) continue;
                const double lap = f.values[k - 1] + f.values[k + 1] +
                                   f.values[k - cfg.nx] + f.values[k + cfg.nx] -
                                   4.0 * f.values[k];
                cur[k] = dt * f.values[k] + c3 * lap;
            }
    }

    auto sample_row = [&](int step, const std::vector<double>& level) {
        for (std::size_t j = 0; j < probes.size(); ++j) {
            const double fx = (probes[j].x - cfg.origin.x) / cfg.spacing;
            const double fy = (probes[j].y - cfg.origin.y) / cfg.spacing;
            int i = std::clamp(static_cast<int>(fx), 0, cfg.nx - 2);
            int jj = std::clamp(static_cast<int>(fy), 0, cfg.ny - 2);
            const double u = fx - i, v = fy - jj;
            const std::size_t k = static_cast<std::size_t>(jj) * cfg.nx + i;
            tr.at(step, static_cast<int>(j)) =
                (1 - u) * (1 - v) * level[k] + u * (1 - v) * level[k + 1] +
                (1 - u) * v * level[k + cfg.nx] + u * v * level[k + cfg.nx + 1];
        }
    };

    sample_row(0, prev);
    sample_row(1, cur);
    for (int n = 1; n < steps; ++n) {
        dom.step(prev, cur, next);
        std::swap(prev, cur);
        std::swap(cur, next);
        sample_row(n + 1, cur);
    }
    return tr;
}

namespace detail {

/// Backward Dirichlet solve shared by the time-reversal and the one-sided
/// inverses. The backward problem in t is run as a forward problem in
/// tau = T - t with band data chi(T-tau) h(T-tau, s); the returned field is
/// d/dt at t=0, i.e. minus the one-sided d/dtau at tau=T from the final
/// three levels.
inline GridField reverse_dirichlet_solve(const BoundaryTrace& hdata,
                                         const WaveConfig& cfg,
                                         const Curve& curve, WaveRegion region,
                                         bool apply_chi) {
    cfg.validate(&curve);
    if (hdata.nt() < 2 || hdata.ns() < 2)
        throw config_error("reverse solve: trace too small");
    const double trace_dt = hdata.dt();
    for (std::size_t k = 1; k < hdata.t_grid.size(); ++k)
        if (std::abs(hdata.t_grid[k] - hdata.t_grid[k - 1] - trace_dt) >
            1e-9 * trace_dt)
            throw config_error("reverse solve: t grid must be uniform");

    WaveDomain dom(cfg, region, &curve);
    const double dt = dom.dt;
    const int steps = cfg.n_steps();
    if (steps < 3) throw config_error("reverse solve: need at least 3 steps");
    const double T = cfg.T;

    const std::size_t ncell = static_cast<std::size_t>(cfg.nx) * cfg.ny;
    std::vector<double> prev(ncell, 0.0), cur(ncell, 0.0), next(ncell, 0.0);
    std::vector<double> third(ncell, 0.0);

    auto chi_at = [&](double t) {
        return apply_chi ? time_cutoff(t, cfg.T0, cfg.T) : 1.0;
    };

    dom.set_band(prev, hdata, T, chi_at(T));
    dom.set_band(cur, hdata, T - dt, chi_at(T - dt));
    for (int n = 1; n < steps; ++n) {
        dom.step(prev, cur, next);
        const double t = T - (n + 1) * dt;
        dom.set_band(next, hdata, t, chi_at(t));
        std::swap(third, prev);  // keep the previous level for the derivative
        std::swap(prev, cur);
        std::swap(cur, next);
    }

    // d/dt v at t=0 by the one-sided 2nd-order formula on the last three
    // backward levels: cur is t=0, prev is t=dt, third is t=2dt.
    GridField out(cfg.origin, cfg.spacing, cfg.nx, cfg.ny);
    for (std::size_t k = 0; k < ncell; ++k) {
        if (dom.type[k] != Active) continue;
        out.values[k] = (-3.0 * cur[k] + 4.0 * prev[k] - third[k]) / (2.0 * dt);
    }
    return out;
}

} // namespace detail

/// Time-reversal backprojection G: solve backward inside the curve with zero
/// state at t=T and Dirichlet values h on the boundary staircase; return
/// d/dt v at t=0. The data is expected to be already cut off smoothly near
/// t=T (see apply_time_cutoff).
inline GridField time_reversal(const BoundaryTrace& hdata, const WaveConfig& cfg,
                               const Curve& curve) {
    return detail::reverse_dirichlet_solve(hdata, cfg, curve,
                                           WaveRegion::inside_curve,
                                           /*apply_chi=*/false);
}

/// Full pipeline from sinogram data: Abel in r, smooth cutoff, time reversal.
inline GridField parametrix_reconstruct(const Sinogram& sg, const WaveConfig& cfg,
                                        const Curve& curve) {
    cfg.validate(&curve);
    const int nt = cfg.n_steps() + 1;
    BoundaryTrace tr = lambda_from_sinogram(sg, cfg.T, nt, 200, curve.closed());
    apply_time_cutoff(tr, cfg.T0, cfg.T);
    return time_reversal(tr, cfg, curve);
}

/// One-sided inverse of the trace operator: backward (incoming) solve on the
/// chosen side of the curve with Dirichlet data h, returning 2 d/dt u at t=0.
/// The cutoff chi is applied to the data as part of the solve.
inline GridField incoming_inverse(const BoundaryTrace& hdata, Side side,
                                  const WaveConfig& cfg, const Curve& curve) {
    const WaveRegion region = side == Side::left ? WaveRegion::inside_curve
                                                 : WaveRegion::outside_curve;
    GridField out = detail::reverse_dirichlet_solve(hdata, cfg, curve, region,
                                                    /*apply_chi=*/true);
    out *= 2.0;
    return out;
}

/// The ghost of an interior wavepacket: h = forward trace of f_L, then
/// f_R = -(incoming solve on the right). R_gamma(f_L + f_R) has a suppressed
/// singular band near the packet's forward arrival event provided T is
/// chosen so that only that event is recorded.
inline GridField unitary_ghost(const GridField& f_L, const Covector& center,
                               const WaveConfig& cfg, const Curve& curve) {
    ClassifyOptions opt;
    opt.t_range = {opt.on_curve_tol, detail::line_reach(curve, center.x)};
    const Classification cl = classify_covector(curve, center, opt);
    if (cl.tag != SigmaTag::SigmaL_plus)
        throw not_applicable_error(
            std::string("unitary_ghost: forward ray classifies as ") +
            to_string(cl.tag));
    BoundaryTrace h = forward_trace(f_L, cfg, curve);
    GridField f_R = incoming_inverse(h, Side::right, cfg, curve);
    f_R *= -1.0;
    return f_R;
}

/// Relative drift of the discrete energy sum(u_t^2 + grad(u)^n . grad(u)^{n+1})
/// over a closed reflecting box, run for 2T.
inline double closed_box_energy_drift(const GridField& f, const WaveConfig& cfg) {
    cfg.validate();
    if (f.nx != cfg.nx || f.ny != cfg.ny)
        throw config_error("closed_box_energy_drift: grid mismatch");
    detail::WaveDomain dom(cfg, WaveRegion::closed_box, nullptr);
    const double dt = dom.dt;
    const double h = cfg.spacing;
    const int steps = 2 * cfg.n_steps();

    const std::size_t ncell = f.values.size();
    std::vector<double> prev(ncell, 0.0), cur(ncell, 0.0), next(ncell, 0.0);
    const double c3 = dt * dt * dt / (6.0 * h * h);
    for (int j = 1; j < cfg.ny - 1; ++j)
        for (int i = 1; i < cfg.nx - 1; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * cfg.nx + i;
            const double lap = f.values[k - 1] + f.values[k + 1] -
                               4.0 * f.values[k] + f.values[k - cfg.nx] +
                               f.values[k + cfg.nx];
            cur[k] = dt * f.values[k] + c3 * lap;
        }

    auto energy = [&]() {
        double e = 0.0;
        for (int j = 0; j < cfg.ny - 1; ++j)
            for (int i = 0; i < cfg.nx - 1; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * cfg.nx + i;
                const double ut = (cur[k] - prev[k]) / dt;
                const double gx = (cur[k + 1] - cur[k]) * (prev[k + 1] - prev[k]);
                const double gy = (cur[k + cfg.nx] - cur[k]) *
                                  (prev[k + cfg.nx] - prev[k]);
                e += ut * ut + (gx + gy) / (h * h);
            }
        return e * h * h;
    };

    const double e0 = energy();
    double drift = 0.0;
    for (int n = 1; n < steps; ++n) {
        dom.step(prev, cur, next);
        std::swap(prev, cur);
        std::swap(cur, next);
        drift = std::max(drift, std::abs(energy() - e0));
    }
    return e0 > 0 ? drift / e0 : 0.0;
}

} // namespace cradon
