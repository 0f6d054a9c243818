#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cradon/errors.hpp"
#include "cradon/interp.hpp"
#include "cradon/vec2.hpp"

namespace cradon {

/// Sampled 2D scalar function on a square-cell grid. Values are stored
/// row-major: values[j*nx + i] lives at (origin.x + i*h, origin.y + j*h).
struct GridField {
    Vec2 origin;
    double spacing = 1.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;

    GridField() = default;
    GridField(Vec2 origin_, double spacing_, int nx_, int ny_)
        : origin(origin_), spacing(spacing_), nx(nx_), ny(ny_),
          values(static_cast<std::size_t>(nx_) * ny_, 0.0) {
        if (!(spacing_ > 0) || nx_ <= 0 || ny_ <= 0)
            throw invalid_input_error("GridField: bad grid spec");
    }

    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const {
        return values[static_cast<std::size_t>(j) * nx + i];
    }

    Vec2 node(int i, int j) const {
        return {origin.x + i * spacing, origin.y + j * spacing};
    }

    Vec2 max_corner() const {
        return {origin.x + (nx - 1) * spacing, origin.y + (ny - 1) * spacing};
    }

    bool contains_point(Vec2 p) const {
        const Vec2 c = max_corner();
        return p.x >= origin.x && p.y >= origin.y && p.x <= c.x && p.y <= c.y;
    }

    /// Bilinear sample; zero outside the grid.
    double sample(Vec2 p) const {
        const double fx = (p.x - origin.x) / spacing;
        const double fy = (p.y - origin.y) / spacing;
        if (fx < 0 || fy < 0 || fx > nx - 1 || fy > ny - 1) return 0.0;
        int i = static_cast<int>(fx), j = static_cast<int>(fy);
        if (i >= nx - 1) i = nx - 2;
        if (j >= ny - 1) j = ny - 2;
        const double u = fx - i, v = fy - j;
        return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) +
               (1 - u) * v * at(i, j + 1) + u * v * at(i + 1, j + 1);
    }

    void fill(const std::function<double(Vec2)>& f) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) at(i, j) = f(node(i, j));
    }

    double integral() const {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum * spacing * spacing;
    }

    double norm_l2() const {
        double sum = 0.0;
        for (double v : values) sum += v * v;
        return std::sqrt(sum * spacing * spacing);
    }

    double norm_inf() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    /// True when any node of the outermost ring carries a nonzero value.
    bool nonzero_on_boundary(double tol = 0.0) const {
        for (int i = 0; i < nx; ++i)
            if (std::abs(at(i, 0)) > tol || std::abs(at(i, ny - 1)) > tol)
                return true;
        for (int j = 0; j < ny; ++j)
            if (std::abs(at(0, j)) > tol || std::abs(at(nx - 1, j)) > tol)
                return true;
        return false;
    }

    GridField& operator+=(const GridField& o) {
        for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
        return *this;
    }
    GridField& operator-=(const GridField& o) {
        for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
        return *this;
    }
    GridField& operator*=(double a) {
        for (double& v : values) v *= a;
        return *this;
    }
};

/// Binary format: an 80-byte text header `nx ny ox oy h` padded with spaces,
/// followed by nx*ny little-endian 64-bit reals in row-major order.
inline void save_grid_field(const GridField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("save_grid_field: cannot write " + path);
    char header[80];
    std::memset(header, ' ', sizeof(header));
    const int written =
        std::snprintf(header, sizeof(header), "%d %d %.17g %.17g %.17g", f.nx,
                      f.ny, f.origin.x, f.origin.y, f.spacing);
    if (written < 0 || written >= static_cast<int>(sizeof(header)))
        throw io_error("save_grid_field: header overflow");
    header[written] = ' ';  // undo the terminating NUL, keep the pad printable
    header[79] = '\n';
    out.write(header, sizeof(header));
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!out) throw io_error("save_grid_field: write failed for " + path);
}

inline GridField load_grid_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("load_grid_field: cannot open " + path);
    char header[81] = {};
    in.read(header, 80);
    if (!in) throw io_error("load_grid_field: truncated header in " + path);
    int nx = 0, ny = 0;
    double ox = 0, oy = 0, h = 0;
    if (std::sscanf(header, "%d %d %lg %lg %lg", &nx, &ny, &ox, &oy, &h) != 5)
        throw io_error("load_grid_field: malformed header in " + path);
    GridField f({ox, oy}, h, nx, ny);
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!in) throw io_error("load_grid_field: truncated data in " + path);
    return f;
}

/// Min-max normalized 8-bit PGM for visual inspection (row 0 at the top).
inline void save_pgm(const std::vector<double>& values, int nx, int ny,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("save_pgm: cannot write " + path);
    double lo = std::numeric_limits<double>::max(), hi = -lo;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    out << "P5\n" << nx << ' ' << ny << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(nx));
    for (int j = ny - 1; j >= 0; --j) {
        for (int i = 0; i < nx; ++i) {
            const double v = values[static_cast<std::size_t>(j) * nx + i];
            row[static_cast<std::size_t>(i)] = static_cast<unsigned char>(
                std::lround(255.0 * (v - lo) / (hi - lo)));
        }
        out.write(reinterpret_cast<const char*>(row.data()), nx);
    }
}

inline void save_pgm(const GridField& f, const std::string& path) {
    save_pgm(f.values, f.nx, f.ny, path);
}

/// Indicator of a disc, optionally mollified over one cell (a smoothstep ramp
/// across the jump) to tame Gibbs ringing when the field feeds the wave solver.
inline GridField disc_indicator(double radius, Vec2 center, Vec2 origin,
                                double spacing, int nx, int ny,
                                bool smooth_edge = false) {
    if (!(radius > 0)) throw invalid_input_error("disc_indicator: radius <= 0");
    if (radius < 2 * spacing)
        throw resolution_error("disc_indicator: radius below 2 grid cells");
    GridField f(origin, spacing, nx, ny);
    f.fill([&](Vec2 p) -> double {
        const double d = dist(p, center);
        if (!smooth_edge) return d < radius ? 1.0 : 0.0;
        return smoothstep5((radius - d) / spacing + 0.5);
    });
    return f;
}

/// An oscillatory Gaussian probe localized at (x0, k) in phase space.
struct WavePacket {
    Vec2 x0;
    Vec2 k;
    double sigma = 0.0;
};

/// f(x) = cos(k.(x-x0)) exp(-|x-x0|^2/(2 sigma^2)).
inline GridField wavepacket_field(const WavePacket& p, Vec2 origin,
                                  double spacing, int nx, int ny) {
    if (!(p.sigma > 0) || !(p.k.norm() > 0))
        throw invalid_input_error("wavepacket_field: need sigma>0 and |k|>0");
    const double wavelength = 2.0 * M_PI / p.k.norm();
    if (wavelength < 4 * spacing)
        throw resolution_error("wavepacket_field: wavelength below 4 grid cells");
    GridField f(origin, spacing, nx, ny);
    const Vec2 hi = f.max_corner();
    const double margin = 4.0 * p.sigma;
    if (p.x0.x - margin < origin.x || p.x0.y - margin < origin.y ||
        p.x0.x + margin > hi.x || p.x0.y + margin > hi.y)
        throw resolution_error("wavepacket_field: packet breaks the 4-sigma margin");
    f.fill([&](Vec2 x) {
        const Vec2 r = x - p.x0;
        return std::cos(p.k.dot(r)) * std::exp(-r.norm2() / (2 * p.sigma * p.sigma));
    });
    return f;
}

/// Radial function F with f(x) = F(|x|^2). Carries the squared radii of its
/// jump discontinuities so quadratures can split cleanly, plus a support bound.
class RadialProfile {
public:
    RadialProfile() = default;

    static RadialProfile from_function(std::function<double(double)> f,
                                       std::vector<double> jump_rho2 = {},
                                       double support_rho2_max =
                                           std::numeric_limits<double>::infinity()) {
        RadialProfile p;
        p.f_ = std::move(f);
        p.jumps_ = std::move(jump_rho2);
        p.support_max_ = support_rho2_max;
        return p;
    }

    /// Indicator of the disc |x| < radius as a radial profile.
    static RadialProfile disc(double radius) {
        const double r2 = radius * radius;
        return from_function([r2](double rho2) { return rho2 < r2 ? 1.0 : 0.0; },
                             {r2}, r2);
    }

    /// One-sided jump series H(t) * sum_k a_k t^k at t = rho^2 - t_jump, on
    /// top of an optional smooth background.
    static RadialProfile jump_series(double t_jump, std::vector<double> coeffs,
                                     std::function<double(double)> background = {}) {
        if (!(t_jump > 0))
            throw invalid_input_error("RadialProfile: jump radius must be > 0");
        RadialProfile p;
        p.jumps_ = {t_jump};
        p.f_ = [t_jump, coeffs = std::move(coeffs),
                background = std::move(background)](double rho2) {
            double v = background ? background(rho2) : 0.0;
            const double t = rho2 - t_jump;
            if (t >= 0) {
                double tp = 1.0, poly = 0.0;
                for (double a : coeffs) {
                    poly += a * tp;
                    tp *= t;
                }
                v += poly;
            }
            return v;
        };
        return p;
    }

    /// Pointwise difference of two profiles; jump lists merge.
    static RadialProfile difference(const RadialProfile& a, const RadialProfile& b) {
        RadialProfile p;
        p.f_ = [fa = a.f_, fb = b.f_](double rho2) { return fa(rho2) - fb(rho2); };
        p.jumps_ = a.jumps_;
        p.jumps_.insert(p.jumps_.end(), b.jumps_.begin(), b.jumps_.end());
        p.support_max_ = std::max(a.support_max_, b.support_max_);
        return p;
    }

    const std::vector<double>& jumps() const { return jumps_; }
    double support_rho2_max() const { return support_max_; }

    double operator()(double rho2) const { return f_ ? f_(rho2) : 0.0; }

private:
    std::function<double(double)> f_;
    std::vector<double> jumps_;
    double support_max_ = std::numeric_limits<double>::infinity();
};

/// F(rho^2) evaluated at the squared radius rho2.
inline double eval_radial(const RadialProfile& p, double rho2) {
    if (rho2 < 0) throw invalid_input_error("eval_radial: rho2 must be >= 0");
    return p(rho2);
}

/// Sample a radial profile onto a grid: f(x) = F(|x - center|^2).
inline GridField radial_field(const RadialProfile& p, Vec2 center, Vec2 origin,
                              double spacing, int nx, int ny) {
    GridField f(origin, spacing, nx, ny);
    f.fill([&](Vec2 x) { return p((x - center).norm2()); });
    return f;
}

} // namespace cradon
