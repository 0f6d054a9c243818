#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cradon/errors.hpp"
#include "cradon/interp.hpp"
#include "cradon/quadrature.hpp"
#include "cradon/radon.hpp"

namespace cradon {

/// Samples of a function of one positive variable. The operators act on
/// distributions supported in t > 0; values are extended by zero outside
/// the grid.
struct Samples1D {
    std::vector<double> grid;    // strictly increasing, positive
    std::vector<double> values;
    int support_first = 0;       // first/last index with a nonzero value
    int support_last = -1;
    bool resolution_warning = false;

    static Samples1D on_grid(std::vector<double> grid) {
        Samples1D s;
        s.values.assign(grid.size(), 0.0);
        s.grid = std::move(grid);
        s.validate();
        return s;
    }

    void validate() const {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!(grid[i] > 0) || (i > 0 && grid[i] <= grid[i - 1]))
                throw invalid_input_error(
                    "Samples1D: grid must be positive and strictly increasing");
            if (i < values.size() && !std::isfinite(values[i]))
                throw invalid_input_error("Samples1D: non-finite value");
        }
    }

    void update_support(double tol = 0.0) {
        support_first = 0;
        support_last = -1;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (std::abs(values[i]) > tol) {
                if (support_last < 0) support_first = static_cast<int>(i);
                support_last = static_cast<int>(i);
            }
        }
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Pointwise Abel transform of a callable:
///   A h(t) = integral_0^t r h(r) / sqrt(t^2 - r^2) dr
///          = t * integral_0^{pi/2} sin(phi) h(t sin phi) dphi,
/// the substitution r = t sin(phi) removing the square-root singularity.
template <class F>
double abel_apply_fn(F&& h, double t, int n_nodes = 200) {
    if (t <= 0) return 0.0;
    const QuadRule& rule = gauss_legendre(n_nodes);
    double sum = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        const double phi = 0.25 * M_PI * (rule.nodes[i] + 1.0);
        const double sp = std::sin(phi);
        sum += rule.weights[i] * sp * h(t * sp);
    }
    return t * sum * 0.25 * M_PI;
}

/// A applied to sampled data, evaluated back on the same grid. The samples
/// are interpolated piecewise-cubically between nodes.
inline Samples1D abel_apply(const Samples1D& h, int n_nodes = 200) {
    h.validate();
    Samples1D out = Samples1D::on_grid(h.grid);
    auto hfun = [&](double r) { return interp_cubic(h.grid, h.values, r); };
    for (std::size_t i = 0; i < h.grid.size(); ++i)
        out.values[i] = abel_apply_fn(hfun, h.grid[i], n_nodes);
    // Flag sample-to-sample jumps the grid clearly does not resolve.
    const double scale = h.max_abs();
    for (std::size_t i = 1; i < h.values.size(); ++i)
        if (std::abs(h.values[i] - h.values[i - 1]) > 0.5 * scale)
            out.resolution_warning = true;
    out.update_support(1e-300);
    return out;
}

enum class AbelKernel {
    corrected,  // inner integrand t H(t) / sqrt(r^2 - t^2); B A = Id
    printed,    // inner integrand H(t) / sqrt(r^2 - t^2); kept for mutation tests
};

/// Left inverse of A:
///   B H(r) = (2 / (pi r)) d/dr integral_0^r t H(t) / sqrt(r^2 - t^2) dt.
/// The inner integral is evaluated with the same sin substitution as A; the
/// outer derivative uses centered finite differences (4th order in the
/// interior, one-sided 2nd order at the ends).
inline Samples1D abel_invert(const Samples1D& H, int n_nodes = 200,
                             AbelKernel kernel = AbelKernel::corrected) {
    H.validate();
    const std::size_t n = H.grid.size();
    if (n < 5) throw invalid_input_error("abel_invert: need at least 5 samples");

    // Data must vanish toward t = 0: extrapolate the first two samples.
    const double scale = H.max_abs();
    if (scale > 0 && n >= 2) {
        const double slope = (H.values[1] - H.values[0]) / (H.grid[1] - H.grid[0]);
        const double at_zero = H.values[0] - slope * H.grid[0];
        if (std::abs(at_zero) > 1e-8 * scale)
            throw domain_error("abel_invert: data does not vanish near t = 0");
    }

    auto hfun = [&](double t) { return interp_cubic(H.grid, H.values, t); };
    std::vector<double> inner(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = H.grid[i];
        if (kernel == AbelKernel::corrected) {
            inner[i] = abel_apply_fn(hfun, r, n_nodes);
        } else {
            const QuadRule& rule = gauss_legendre(n_nodes);
            double sum = 0.0;
            for (int q = 0; q < n_nodes; ++q) {
                const double phi = 0.25 * M_PI * (rule.nodes[q] + 1.0);
                sum += rule.weights[q] * hfun(r * std::sin(phi));
            }
            inner[i] = sum * 0.25 * M_PI;
        }
    }

    Samples1D out = Samples1D::on_grid(H.grid);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo, stencil;
        if (n >= 5 && i >= 2 && i + 2 < n) {
            lo = i - 2;
            stencil = 5;
        } else {
            stencil = 3;
            lo = (i == 0) ? 0 : (i + 1 >= n ? n - 3 : i - 1);
        }
        const auto w = fd_weights(H.grid[i],
                                  std::span<const double>(&H.grid[lo], stencil), 1);
        double d = 0.0;
        for (std::size_t k = 0; k < stencil; ++k) d += w[k] * inner[lo + k];
        out.values[i] = 2.0 / (M_PI * H.grid[i]) * d;
    }
    out.update_support(1e-300);
    return out;
}

/// Principal symbol of A at (r, tau):
///   sqrt(pi/2) e^{-i pi/4} sqrt(r) (tau_+^{-1/2} + i tau_-^{-1/2}).
inline std::complex<double> principal_symbol_A(double r, double tau) {
    if (!(r > 0)) throw invalid_input_error("principal_symbol_A: r must be > 0");
    if (tau == 0.0)
        throw singular_frequency_error("principal_symbol_A: tau = 0");
    const std::complex<double> phase = std::polar(1.0, -M_PI / 4.0);
    const double mag = std::sqrt(M_PI / 2.0) * std::sqrt(r) /
                       std::sqrt(std::abs(tau));
    if (tau > 0) return mag * phase;
    return mag * phase * std::complex<double>(0.0, 1.0);
}

/// Principal symbol of B: the reciprocal of that of A.
inline std::complex<double> principal_symbol_B(double r, double tau) {
    return 1.0 / principal_symbol_A(r, tau);
}

/// Samples of the boundary trace of the wave solution on a uniform time grid.
struct BoundaryTrace {
    std::vector<double> t_grid;  // uniform, from 0 to T
    std::vector<double> s_grid;  // curve parameters
    std::vector<double> values;  // values[k*ns + j], k over t
    bool s_periodic = true;
    bool truncation_warning = false;

    int nt() const { return static_cast<int>(t_grid.size()); }
    int ns() const { return static_cast<int>(s_grid.size()); }
    double& at(int k, int j) {
        return values[static_cast<std::size_t>(k) * s_grid.size() + j];
    }
    double at(int k, int j) const {
        return values[static_cast<std::size_t>(k) * s_grid.size() + j];
    }
    double dt() const { return t_grid.size() > 1 ? t_grid[1] - t_grid[0] : 0.0; }

    double norm_l2() const {
        double sum = 0.0;
        for (double v : values) sum += v * v;
        return std::sqrt(sum);
    }
};

/// The trace operator Lambda assembled from a sinogram: A acting in the
/// first variable, column by column in s. The raw (arc-length) sinogram is
/// first normalized to circular means, which makes the result match the
/// trace of the wave solution with Cauchy data (0, f) exactly rather than
/// up to elliptic factors.
inline BoundaryTrace lambda_from_sinogram(const Sinogram& sg, double T, int nt,
                                          int n_nodes = 200,
                                          bool s_periodic = true) {
    if (!(T > 0) || nt < 2)
        throw invalid_input_error("lambda_from_sinogram: bad t grid spec");
    BoundaryTrace tr;
    tr.t_grid = uniform_grid(0.0, T / (nt - 1), nt);
    tr.s_grid = sg.s_grid;
    tr.s_periodic = s_periodic;
    tr.values.assign(static_cast<std::size_t>(nt) * sg.s_grid.size(), 0.0);

    const int nr = sg.nr(), ns = sg.ns();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < ns; ++j) {
        std::vector<double> h(static_cast<std::size_t>(nr));
        for (int i = 0; i < nr; ++i) {
            const double r = sg.r_grid[static_cast<std::size_t>(i)];
            h[static_cast<std::size_t>(i)] =
                sg.convention == SinogramConvention::raw
                    ? sg.at(i, j) / (2.0 * M_PI * r)
                    : sg.at(i, j) / M_PI;
        }
        auto hfun = [&](double r) { return interp_cubic(sg.r_grid, h, r); };
        for (int k = 0; k < nt; ++k)
            tr.at(k, j) = abel_apply_fn(hfun, tr.t_grid[static_cast<std::size_t>(k)],
                                        n_nodes);
    }
    return tr;
}

/// Trace CSV mirrors the sinogram format with a `kind=trace` header field:
/// `kind=trace,t0,dt,nt,s0,ds,ns` then nt rows of ns values.
inline void save_trace_csv(const BoundaryTrace& tr, const std::string& path) {
    const int nt = tr.nt(), ns = tr.ns();
    if (nt < 2 || ns < 2)
        throw invalid_input_error("save_trace_csv: need at least 2x2 samples");
    std::ofstream out(path);
    if (!out) throw io_error("save_trace_csv: cannot write " + path);
    out.precision(17);
    out << "kind=trace," << tr.t_grid.front() << ',' << tr.dt() << ',' << nt
        << ',' << tr.s_grid.front() << ',' << tr.s_grid[1] - tr.s_grid[0] << ','
        << ns << '\n';
    for (int k = 0; k < nt; ++k) {
        for (int j = 0; j < ns; ++j) {
            if (j) out << ',';
            out << tr.at(k, j);
        }
        out << '\n';
    }
}

inline BoundaryTrace load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("load_trace_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw io_error("load_trace_csv: empty " + path);
    std::istringstream hs(line);
    std::string kind;
    std::getline(hs, kind, ',');
    if (kind != "kind=trace")
        throw io_error("load_trace_csv: not a trace file: " + path);
    double t0, dt, s0, ds;
    int nt, ns;
    char c;
    hs >> t0 >> c >> dt >> c >> nt >> c >> s0 >> c >> ds >> c >> ns;
    if (!hs) throw io_error("load_trace_csv: malformed header in " + path);
    BoundaryTrace tr;
    tr.t_grid = uniform_grid(t0, dt, nt);
    tr.s_grid = uniform_grid(s0, ds, ns);
    tr.values.reserve(static_cast<std::size_t>(nt) * ns);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) tr.values.push_back(std::stod(tok));
    }
    if (tr.values.size() != static_cast<std::size_t>(nt) * ns)
        throw io_error("load_trace_csv: value count mismatch in " + path);
    return tr;
}

} // namespace cradon
