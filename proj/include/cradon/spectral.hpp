#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "cradon/abel.hpp"
#include "cradon/errors.hpp"

namespace cradon {

namespace detail {

// FFTW planning is not thread safe; execution of a ready plan is.
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

} // namespace detail

/// 2D complex DFT power spectrum |F[k][m]|^2 of a real nt x ns array.
inline std::vector<double> power_spectrum_2d(const std::vector<double>& values,
                                             int nt, int ns) {
    std::vector<std::complex<double>> in(static_cast<std::size_t>(nt) * ns),
        out(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) in[k] = values[k];
    {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_plan plan = fftw_plan_dft_2d(
            nt, ns, reinterpret_cast<fftw_complex*>(in.data()),
            reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
            FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    std::vector<double> power(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) power[k] = std::norm(out[k]);
    return power;
}

/// Fraction of the spectral energy of the trace lying in the region
/// |sigma| > delta |tau|, where (tau, sigma) are the angular frequencies dual
/// to (t, s). The 4 lowest bins of each variable (|index| < 4) are excluded
/// from both numerator and denominator: that is where the smooth bulk of the
/// data lives and the cone condition constrains only the singular content.
inline double cone_diagnostic(const BoundaryTrace& tr, double delta) {
    if (!tr.s_periodic)
        throw config_error("cone_diagnostic: s grid must be periodic");
    if (tr.nt() < 16 || tr.ns() < 16)
        throw config_error("cone_diagnostic: trace too small");
    const double dtt = tr.dt();
    for (std::size_t k = 1; k < tr.t_grid.size(); ++k)
        if (std::abs(tr.t_grid[k] - tr.t_grid[k - 1] - dtt) > 1e-9 * dtt)
            throw config_error("cone_diagnostic: t grid must be uniform");

    const int nt = tr.nt(), ns = tr.ns();
    const std::vector<double> power = power_spectrum_2d(tr.values, nt, ns);

    const double ds = tr.s_grid[1] - tr.s_grid[0];
    const double dtau = 2.0 * M_PI / (nt * dtt);
    const double dsig = 2.0 * M_PI / (ns * ds);

    double total = 0.0, outside = 0.0;
    for (int k = 0; k < nt; ++k) {
        const int ks = (k <= nt / 2) ? k : k - nt;  // signed bin
        if (std::abs(ks) < 4) continue;
        for (int m = 0; m < ns; ++m) {
            const int ms = (m <= ns / 2) ? m : m - ns;
            if (std::abs(ms) < 4) continue;
            const double p = power[static_cast<std::size_t>(k) * ns + m];
            total += p;
            const double tau = std::abs(ks) * dtau;
            const double sigma = std::abs(ms) * dsig;
            if (sigma > delta * tau) outside += p;
        }
    }
    return total > 0 ? outside / total : 0.0;
}

} // namespace cradon
