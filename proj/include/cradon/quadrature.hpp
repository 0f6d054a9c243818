#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include "cradon/errors.hpp"

namespace cradon {

struct QuadRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of order n, computed by Newton iteration on P_n and
/// cached process-wide.
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

/// Fixed-order Gauss-Legendre integral of f over [a, b].
template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const QuadRule& rule = gauss_legendre(n);
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(c + hw * rule.nodes[i]);
    return hw * sum;
}

namespace detail {

// Kronrod-15 nodes/weights with the embedded Gauss-7 rule.
inline constexpr double kGK15Nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813};
inline constexpr double kGK15Weights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double kG7Weights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

template <class F>
void gk15(F&& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double fk[15];
    for (int i = 0; i < 15; ++i) fk[i] = f(c + hw * kGK15Nodes[i]);
    double k15 = 0.0;
    for (int i = 0; i < 15; ++i) k15 += kGK15Weights[i] * fk[i];
    double g7 = 0.0;
    for (int i = 0; i < 7; ++i) g7 += kG7Weights[i] * fk[2 * i + 1];
    kronrod = hw * k15;
    err = std::abs(hw * (k15 - g7));
}

template <class F>
double adaptive_gk(F&& f, double a, double b, double abs_tol, int depth,
                   bool& converged) {
    double val = 0.0, err = 0.0;
    gk15(f, a, b, val, err);
    if (err <= abs_tol || b - a < 1e-14 * (1.0 + std::abs(a))) {
        if (err > abs_tol) converged = false;
        return val;
    }
    if (depth <= 0) {
        converged = false;
        return val;
    }
    const double m = 0.5 * (a + b);
    return adaptive_gk(f, a, m, 0.5 * abs_tol, depth - 1, converged) +
           adaptive_gk(f, m, b, 0.5 * abs_tol, depth - 1, converged);
}

} // namespace detail

struct QuadResult {
    double value = 0.0;
    bool converged = true;
};

/// Adaptive Gauss-Kronrod integral of f over [a, b] to absolute tolerance.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-12,
                              int max_depth = 40) {
    QuadResult res;
    if (b <= a) return res;
    res.value = detail::adaptive_gk(f, a, b, abs_tol, max_depth, res.converged);
    return res;
}

/// Adaptive integration of f over [a, b] split at the given interior
/// breakpoints. Each smooth piece converges at Gauss-Kronrod rates, so
/// integrands with known kinks/jumps are integrated to near machine accuracy.
template <class F>
QuadResult integrate_with_breakpoints(F&& f, double a, double b,
                                      std::vector<double> breakpoints,
                                      double abs_tol = 1e-12) {
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> edges{a};
    for (double t : breakpoints)
        if (t > a + 1e-15 && t < b - 1e-15) edges.push_back(t);
    edges.push_back(b);
    QuadResult res;
    const double piece_tol = abs_tol / static_cast<double>(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        QuadResult piece = integrate_adaptive(f, edges[i], edges[i + 1], piece_tol);
        res.value += piece.value;
        res.converged = res.converged && piece.converged;
    }
    return res;
}

} // namespace cradon
