#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cradon {

/// Piecewise-cubic (4-point Lagrange) interpolation of samples (grid, values)
/// at x. Returns 0 outside [grid.front(), grid.back()]. The grid must be
/// strictly increasing. Falls back to linear when fewer than 4 samples exist.
inline double interp_cubic(std::span<const double> grid,
                           std::span<const double> values, double x) {
    const std::size_t n = grid.size();
    if (n == 0) return 0.0;
    if (x < grid.front() || x > grid.back()) return 0.0;
    if (n == 1) return values[0];

    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = static_cast<std::size_t>(std::distance(grid.begin(), it));
    if (i > 0) --i;              // grid[i] <= x
    if (i >= n - 1) i = n - 2;   // keep a right neighbor

    if (n < 4) {
        const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
        return (1.0 - t) * values[i] + t * values[i + 1];
    }

    // 4-point stencil centered on the bracketing interval.
    std::size_t j0 = (i == 0) ? 0 : i - 1;
    if (j0 + 3 >= n) j0 = n - 4;
    double result = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
        double basis = 1.0;
        for (std::size_t b = 0; b < 4; ++b) {
            if (a == b) continue;
            basis *= (x - grid[j0 + b]) / (grid[j0 + a] - grid[j0 + b]);
        }
        result += basis * values[j0 + a];
    }
    return result;
}

/// Linear interpolation with zero extension outside the grid.
inline double interp_linear(std::span<const double> grid,
                            std::span<const double> values, double x) {
    const std::size_t n = grid.size();
    if (n == 0 || x < grid.front() || x > grid.back()) return 0.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = static_cast<std::size_t>(std::distance(grid.begin(), it));
    if (i > 0) --i;
    if (i >= n - 1) i = n - 2;
    const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - t) * values[i] + t * values[i + 1];
}

/// Finite-difference weights for the m-th derivative at x0 from the given
/// stencil nodes (Fornberg's recurrence).
inline std::vector<double> fd_weights(double x0, std::span<const double> nodes,
                                      int m) {
    const int n = static_cast<int>(nodes.size());
    std::vector<std::vector<double>> c(
        static_cast<std::size_t>(n),
        std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[static_cast<std::size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[static_cast<std::size_t>(i)] -
                              nodes[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                        c1 *
                        (k * c[static_cast<std::size_t>(i - 1)]
                              [static_cast<std::size_t>(k - 1)] -
                         c5 * c[static_cast<std::size_t>(i - 1)]
                               [static_cast<std::size_t>(k)]) /
                        c2;
                c[static_cast<std::size_t>(i)][0] =
                    -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                    (c4 * c[static_cast<std::size_t>(j)]
                           [static_cast<std::size_t>(k)] -
                     k * c[static_cast<std::size_t>(j)]
                          [static_cast<std::size_t>(k - 1)]) /
                    c3;
            c[static_cast<std::size_t>(j)][0] =
                c4 * c[static_cast<std::size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        w[static_cast<std::size_t>(i)] =
            c[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
    return w;
}

/// Quintic smoothstep: 0 for x<=0, 1 for x>=1, C^2 monotone in between.
inline double smoothstep5(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

} // namespace cradon
