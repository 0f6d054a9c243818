#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cradon/errors.hpp"
#include "cradon/fields.hpp"
#include "cradon/geometry.hpp"
#include "cradon/quadrature.hpp"

namespace cradon {

enum class SinogramConvention {
    raw,                // integrals against arc length, Eq-style R_gamma
    radial_normalized,  // (1/(2r)) R_gamma, the half-angle integral
};

/// Sampled circular transform on an (r, s) rectangle, r-major.
struct Sinogram {
    std::vector<double> r_grid;  // strictly increasing, positive
    std::vector<double> s_grid;  // curve parameters
    std::vector<double> values;  // values[i*ns + j], i over r
    SinogramConvention convention = SinogramConvention::raw;
    bool truncated = false;  // set when a circle left the grid with f nonzero there

    int nr() const { return static_cast<int>(r_grid.size()); }
    int ns() const { return static_cast<int>(s_grid.size()); }
    double& at(int i, int j) {
        return values[static_cast<std::size_t>(i) * s_grid.size() + j];
    }
    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * s_grid.size() + j];
    }
};

inline std::vector<double> uniform_grid(double x0, double dx, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = x0 + i * dx;
    return g;
}

/// Raw circular transform of a sampled field by the n_theta-node trapezoid
/// rule on each circle: values[i,j] ~ integral of f over |x - gamma(s_j)| = r_i
/// against arc length.
inline Sinogram forward_sinogram(const GridField& f, const Curve& curve,
                                 std::vector<double> r_grid,
                                 std::vector<double> s_grid, int n_theta) {
    if (n_theta < 64)
        throw invalid_input_error("forward_sinogram: n_theta must be >= 64");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > 0) || (i > 0 && r_grid[i] <= r_grid[i - 1]))
            throw invalid_input_error(
                "forward_sinogram: r_grid must be positive and increasing");
    }
    Sinogram sg;
    sg.r_grid = std::move(r_grid);
    sg.s_grid = std::move(s_grid);
    sg.convention = SinogramConvention::raw;
    sg.values.assign(sg.r_grid.size() * sg.s_grid.size(), 0.0);

    const bool f_touches_boundary = f.nonzero_on_boundary(0.0);
    const double dtheta = 2.0 * M_PI / n_theta;
    const int nr = sg.nr(), ns = sg.ns();
    bool truncated = false;

#ifdef _OPENMP
#pragma omp parallel for reduction(|| : truncated) schedule(static)
#endif
    for (int j = 0; j < ns; ++j) {
        const Vec2 p = curve.point(sg.s_grid[static_cast<std::size_t>(j)]);
        for (int i = 0; i < nr; ++i) {
            const double r = sg.r_grid[static_cast<std::size_t>(i)];
            double sum = 0.0;
            for (int m = 0; m < n_theta; ++m) {
                const double th = m * dtheta;
                const Vec2 x = p + r * Vec2{std::cos(th), std::sin(th)};
                if (!f.contains_point(x)) {
                    if (f_touches_boundary) truncated = true;
                    continue;
                }
                sum += f.sample(x);
            }
            sg.at(i, j) = sum * r * dtheta;
        }
    }
    sg.truncated = truncated;
    return sg;
}

/// Radial-normalized transform of a radial profile on the unit circle:
/// Rf(r) = integral_0^pi F(1 + r^2 + 2 r cos(theta)) dtheta, integrated
/// adaptively with the integrand split at the angles where F jumps.
inline double radial_transform(const RadialProfile& F, double r,
                               double abs_tol = 1e-12) {
    if (!(r > 0)) throw invalid_input_error("radial_transform: r must be > 0");
    auto integrand = [&](double theta) {
        return F(1.0 + r * r + 2.0 * r * std::cos(theta));
    };
    std::vector<double> breaks;
    for (double rho2 : F.jumps()) {
        const double c = (rho2 - 1.0 - r * r) / (2.0 * r);
        if (c > -1.0 && c < 1.0) breaks.push_back(std::acos(c));
    }
    // Support clipping is another kink of the integrand.
    const double smax = F.support_rho2_max();
    if (std::isfinite(smax)) {
        const double c = (smax - 1.0 - r * r) / (2.0 * r);
        if (c > -1.0 && c < 1.0) breaks.push_back(std::acos(c));
    }
    QuadResult q = integrate_with_breakpoints(integrand, 0.0, M_PI,
                                              std::move(breaks), abs_tol);
    if (!q.converged)
        throw numerics_error("radial_transform: quadrature did not converge");
    return q.value;
}

/// Min and max distance from gamma(s) to the disc |x - center| <= radius.
inline std::pair<double, double> support_bounds(Vec2 disc_center,
                                                double disc_radius,
                                                const Curve& curve, double s) {
    const double d = dist(curve.point(s), disc_center);
    return {std::max(0.0, d - disc_radius), d + disc_radius};
}

/// CSV layout: one header line `convention,r0,dr,nr,s0,ds,ns` (uniform grids),
/// then nr rows of ns comma-separated values.
inline void save_sinogram_csv(const Sinogram& sg, const std::string& path) {
    const int nr = sg.nr(), ns = sg.ns();
    if (nr < 2 || ns < 2)
        throw invalid_input_error("save_sinogram_csv: need at least 2x2 samples");
    std::ofstream out(path);
    if (!out) throw io_error("save_sinogram_csv: cannot write " + path);
    out.precision(17);
    const char* conv = sg.convention == SinogramConvention::raw
                           ? "raw"
                           : "radial-normalized";
    out << conv << ',' << sg.r_grid.front() << ','
        << sg.r_grid[1] - sg.r_grid[0] << ',' << nr << ',' << sg.s_grid.front()
        << ',' << sg.s_grid[1] - sg.s_grid[0] << ',' << ns << '\n';
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < ns; ++j) {
            if (j) out << ',';
            out << sg.at(i, j);
        }
        out << '\n';
    }
}

inline Sinogram load_sinogram_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("load_sinogram_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw io_error("load_sinogram_csv: empty file " + path);
    std::istringstream hs(line);
    std::string conv;
    std::getline(hs, conv, ',');
    double r0, dr, s0, ds;
    int nr, ns;
    char c;
    hs >> r0 >> c >> dr >> c >> nr >> c >> s0 >> c >> ds >> c >> ns;
    if (!hs) throw io_error("load_sinogram_csv: malformed header in " + path);
    Sinogram sg;
    if (conv == "raw") sg.convention = SinogramConvention::raw;
    else if (conv == "radial-normalized")
        sg.convention = SinogramConvention::radial_normalized;
    else throw io_error("load_sinogram_csv: unknown convention " + conv);
    sg.r_grid = uniform_grid(r0, dr, nr);
    sg.s_grid = uniform_grid(s0, ds, ns);
    sg.values.reserve(static_cast<std::size_t>(nr) * ns);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) sg.values.push_back(std::stod(tok));
    }
    if (sg.values.size() != static_cast<std::size_t>(nr) * ns)
        throw io_error("load_sinogram_csv: value count mismatch in " + path);
    return sg;
}

inline void save_sinogram_pgm(const Sinogram& sg, const std::string& path) {
    save_pgm(sg.values, sg.ns(), sg.nr(), path);
}

} // namespace cradon
