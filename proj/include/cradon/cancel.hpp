#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cradon/errors.hpp"
#include "cradon/fields.hpp"
#include "cradon/radon.hpp"

namespace cradon {

/// Coefficients of a one-sided half-integer expansion
///   F(h) ~ sum_j coeffs[j] h^{j+1/2},  0 < h <= h_max,
/// describing the trace of a jump singularity at base radius r0.
struct ConormalSeries {
    double base_radius = 0.5;
    std::vector<double> coeffs;
    std::vector<double> uncertainty;
    double h_max = 1e-2;
    double condition_number = 0.0;
};

struct FitOptions {
    int n_samples = 40;
    double h_min = 1e-6;
    int guard_terms = 2;        // extra terms fitted to absorb truncation bias
    double cond_limit = 1e10;
};

/// Least-squares extraction of half-power coefficients from samples of F on
/// a geometric grid in (h_min, h_max]. Rows are weighted by h^{-1/2} so the
/// residuals are relative to the leading singular scale; a few guard terms
/// beyond the requested order absorb the truncation bias of the series tail.
inline ConormalSeries conormal_expand(const std::function<double(double)>& F,
                                      int n_terms, double h_max,
                                      const FitOptions& opt = {}) {
    if (n_terms < 1 || n_terms > 4)
        throw invalid_input_error("conormal_expand: n_terms must be in [1,4]");
    if (!(h_max > opt.h_min))
        throw invalid_input_error("conormal_expand: h_max too small");

    const int n_fit = n_terms + opt.guard_terms;
    const int m = opt.n_samples;
    if (m < 2 * n_fit)
        throw invalid_input_error("conormal_expand: too few samples");

    using LD = long double;
    using MatX = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
    using VecX = Eigen::Matrix<LD, Eigen::Dynamic, 1>;

    const double ratio = std::pow(h_max / opt.h_min, 1.0 / (m - 1));
    MatX A(m, n_fit);
    VecX b(m);
    for (int i = 0; i < m; ++i) {
        const double h = opt.h_min * std::pow(ratio, i);
        const LD z = static_cast<LD>(h / h_max);
        LD zp = 1.0L;
        for (int j = 0; j < n_fit; ++j) {
            A(i, j) = zp;
            zp *= z;
        }
        // weight h^{-1/2}: model becomes sum_j (c_j h_max^j) z^j
        b(i) = static_cast<LD>(F(h)) / std::sqrt(static_cast<LD>(h));
    }

    Eigen::JacobiSVD<MatX> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const LD smax = svd.singularValues()(0);
    const LD smin = svd.singularValues()(n_fit - 1);
    const double cond = static_cast<double>(smax / smin);
    if (!(smin > 0) || cond > opt.cond_limit)
        throw fit_error("conormal_expand: fit is ill conditioned");
    const VecX d = svd.solve(b);

    const VecX resid = A * d - b;
    const LD sigma2 = resid.squaredNorm() / std::max(1, m - n_fit);
    const auto& V = svd.matrixV();
    const auto& S = svd.singularValues();

    ConormalSeries out;
    out.h_max = h_max;
    out.condition_number = cond;
    out.coeffs.resize(static_cast<std::size_t>(n_terms));
    out.uncertainty.resize(static_cast<std::size_t>(n_terms));
    LD scale = 1.0L;
    for (int j = 0; j < n_terms; ++j) {
        out.coeffs[static_cast<std::size_t>(j)] =
            static_cast<double>(d(j) / scale);
        LD var = 0.0L;
        for (int k = 0; k < n_fit; ++k) var += V(j, k) * V(j, k) / (S(k) * S(k));
        out.uncertainty[static_cast<std::size_t>(j)] =
            static_cast<double>(std::sqrt(sigma2 * var) / scale);
        scale *= static_cast<LD>(h_max);
    }
    return out;
}

/// Expansion of A_k(h): the radial-normalized transform of the basis jump
/// H(t) t^k at t = |x|^2 - 9/4, evaluated at r = 1/2 + h and fitted.
inline ConormalSeries basis_series(int k, int n_terms, double h_max,
                                   const FitOptions& opt = {},
                                   double quad_tol = 1e-13) {
    if (k < 0 || k > 3)
        throw invalid_input_error("basis_series: k must be in [0,3]");
    std::vector<double> coeffs(static_cast<std::size_t>(k + 1), 0.0);
    coeffs.back() = 1.0;
    const RadialProfile basis = RadialProfile::jump_series(2.25, coeffs);
    auto F = [basis, quad_tol](double h) {
        return radial_transform(basis, 0.5 + h, quad_tol);
    };
    ConormalSeries s = conormal_expand(F, n_terms, h_max, opt);
    s.base_radius = 0.5;
    return s;
}

/// A radial ghost: jump location (squared radius) and jump-series
/// coefficients. Supported outside the unit disc, so t_jump > 1.
struct GhostSpec {
    double t_jump = 2.25;
    std::vector<double> a;

    RadialProfile to_profile(int n_terms = -1) const {
        std::vector<double> coeffs = a;
        if (n_terms >= 0 && static_cast<std::size_t>(n_terms) < coeffs.size())
            coeffs.resize(static_cast<std::size_t>(n_terms));
        return RadialProfile::jump_series(t_jump, std::move(coeffs));
    }
};

/// Sequential elimination on the triangular system: choose a_k so that
/// target - sum_k a_k A_k loses its coefficients through order h^{n-1/2}.
inline GhostSpec solve_ghost_coeffs(const ConormalSeries& target,
                                    const std::vector<ConormalSeries>& basis,
                                    double t_jump = 2.25) {
    const std::size_t n = basis.size();
    if (n == 0 || target.coeffs.size() < n)
        throw invalid_input_error("solve_ghost_coeffs: need n basis series and "
                                  "at least n target coefficients");
    double scale = 0.0;
    for (const auto& s : basis)
        for (double c : s.coeffs) scale = std::max(scale, std::abs(c));

    GhostSpec g;
    g.t_jump = t_jump;
    g.a.resize(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (basis[k].coeffs.size() <= k)
            throw invalid_input_error("solve_ghost_coeffs: basis series too short");
        double rhs = target.coeffs[k];
        for (std::size_t j = 0; j < k; ++j) rhs -= g.a[j] * basis[j].coeffs[k];
        const double pivot = basis[k].coeffs[k];
        if (std::abs(pivot) < 1e-8 * scale)
            throw ellipticity_violation_error(
                "solve_ghost_coeffs: vanishing leading coefficient");
        g.a[k] = rhs / pivot;
    }
    return g;
}

struct ResidualOrder {
    double slope = 0.0;           // log-log fitted exponent
    double leading_coeff = 0.0;   // coefficient of h^{n+1/2} in the residual
    bool indeterminate = false;   // residual fell below the quadrature noise floor
    std::vector<double> h;
    std::vector<double> residual;
};

/// Decay order of R(f - g) at r = 1/2 + h over h in [1e-4, 1e-2]: log-log
/// slope of the residual plus a two-term fit of its leading coefficient at
/// the expected exponent n_terms_used + 1/2. Sample points below the noise
/// floor are dropped; if too few survive the result is flagged indeterminate.
inline ResidualOrder residual_order(const RadialProfile& f, const GhostSpec& g,
                                    int n_terms_used, int n_samples = 25,
                                    double noise_floor = 5e-13,
                                    double quad_tol = 1e-13) {
    const RadialProfile diff =
        RadialProfile::difference(f, g.to_profile(n_terms_used));
    ResidualOrder out;
    const double h_lo = 1e-4, h_hi = 1e-2;
    const double ratio = std::pow(h_hi / h_lo, 1.0 / (n_samples - 1));
    for (int i = 0; i < n_samples; ++i) {
        const double h = h_lo * std::pow(ratio, i);
        out.h.push_back(h);
        out.residual.push_back(radial_transform(diff, 0.5 + h, quad_tol));
    }

    std::vector<double> lx, ly;
    for (int i = 0; i < n_samples; ++i) {
        if (std::abs(out.residual[static_cast<std::size_t>(i)]) < noise_floor)
            continue;
        lx.push_back(std::log(out.h[static_cast<std::size_t>(i)]));
        ly.push_back(std::log(std::abs(out.residual[static_cast<std::size_t>(i)])));
    }
    if (lx.size() < 5) {
        out.indeterminate = true;
        return out;
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double npts = static_cast<double>(lx.size());
    out.slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);

    // residual ~ C h^p + D h^{p+1} with p pinned to the expected order.
    const double p = n_terms_used + 0.5;
    long double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
    for (int i = 0; i < n_samples; ++i) {
        const long double hp = std::pow(static_cast<long double>(
                                            out.h[static_cast<std::size_t>(i)]),
                                        static_cast<long double>(p));
        const long double hq = hp * out.h[static_cast<std::size_t>(i)];
        const long double v = out.residual[static_cast<std::size_t>(i)];
        a11 += hp * hp;
        a12 += hp * hq;
        a22 += hq * hq;
        r1 += hp * v;
        r2 += hq * v;
    }
    const long double det = a11 * a22 - a12 * a12;
    if (det != 0.0L)
        out.leading_coeff = static_cast<double>((r1 * a22 - r2 * a12) / det);
    return out;
}

} // namespace cradon
