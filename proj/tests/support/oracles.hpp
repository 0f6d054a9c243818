#pragma once

// Independent reference computations for the test suites. Everything here
// deliberately takes a different numerical route from the library:
// adaptive Simpson instead of Gauss rules, time marching with bisection
// instead of closed-form event solving.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cradon/geometry.hpp"
#include "cradon/vec2.hpp"

namespace oracle {

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int depth = 50) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// Reference Abel transform: integral_0^t r h(r)/sqrt(t^2-r^2) dr with the
/// endpoint singularity removed explicitly by the substitution r = t - u^2
/// on the last stretch, adaptive Simpson on both pieces.
inline double abel_reference(const std::function<double(double)>& h, double t,
                             double tol = 1e-12) {
    if (t <= 0) return 0.0;
    const double split = 0.8 * t;
    auto smooth = [&](double r) {
        return r * h(r) / std::sqrt(t * t - r * r);
    };
    const double part1 = adaptive_simpson(smooth, 0.0, split, 0.5 * tol);
    // r = t - u^2: dr = -2u du, sqrt(t^2-r^2) = u sqrt(2t - u^2)
    const double umax = std::sqrt(t - split);
    auto desing = [&](double u) {
        const double r = t - u * u;
        return 2.0 * r * h(r) / std::sqrt(2.0 * t - u * u);
    };
    const double part2 = adaptive_simpson(desing, 0.0, umax, 0.5 * tol);
    return part1 + part2;
}

/// Billiard flow in the unit-circle disc by blind time marching: small steps
/// with bisection-refined boundary crossings and reflection at the bisected
/// point. Slow but independent of the event-driven implementation.
inline cradon::Covector billiard_marching(const cradon::Curve& circle,
                                          const cradon::Covector& cv, double t,
                                          double step = 1e-3) {
    using cradon::Vec2;
    const double xi_norm = cv.xi.norm();
    const bool backward = t < 0;
    Vec2 pos = cv.x;
    Vec2 dir = (backward ? -1.0 : 1.0) * (cv.xi / xi_norm);
    double remaining = std::abs(t);
    auto outside = [&](Vec2 p) {
        return cradon::dist(p, circle.center()) - circle.radius();
    };
    while (remaining > 0) {
        const double dt = std::min(step, remaining);
        Vec2 trial = pos + dt * dir;
        if (outside(trial) <= 0) {
            pos = trial;
            remaining -= dt;
            continue;
        }
        // bisect the crossing time
        double lo = 0.0, hi = dt;
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (outside(pos + mid * dir) <= 0) lo = mid;
            else hi = mid;
        }
        pos = pos + lo * dir;
        remaining -= lo;
        const Vec2 n = (pos - circle.center()).unit();
        dir = dir - 2.0 * dir.dot(n) * n;
    }
    const Vec2 fwd = backward ? -dir : dir;
    return cradon::Covector{pos, xi_norm * fwd};
}

/// Closed-form circle billiard: bounce points advance by a fixed polar angle
/// and the chord angle with the circle is preserved. Returns the unrolled
/// covector of the segment after `n_bounce` forward reflections, plus the
/// reflection time at which that segment starts.
struct ChordUnroll {
    cradon::Vec2 position;
    cradon::Vec2 direction;
    double segment_start = 0.0;
    double segment_end = 0.0;
};

inline std::vector<ChordUnroll> chord_unroll_forward(const cradon::Curve& circle,
                                                     const cradon::Covector& cv,
                                                     double t_max) {
    using cradon::Vec2;
    const Vec2 c = circle.center();
    const double R = circle.radius();
    Vec2 d = cv.xi.unit();
    // First boundary hit of the forward ray.
    const Vec2 w = cv.x - c;
    const double b = d.dot(w);
    const double disc = b * b - (w.norm2() - R * R);
    const double t1 = -b + std::sqrt(disc);
    Vec2 p = cv.x + t1 * d;

    // Chord geometry: incidence angle against the inward radius stays fixed.
    std::vector<ChordUnroll> segs;
    double t_here = t1;
    while (t_here < t_max) {
        const Vec2 n = (p - c).unit();  // outward
        d = d - 2.0 * d.dot(n) * n;
        const double chord = -2.0 * R * d.dot(n);  // next flight length
        ChordUnroll seg;
        seg.direction = d;
        seg.position = p - t_here * d;
        seg.segment_start = t_here;
        seg.segment_end = t_here + chord;
        segs.push_back(seg);
        p = p + chord * d;
        t_here += chord;
    }
    return segs;
}

/// Deterministic smooth random bump supported in (lo, hi): a sum of cosine
/// modes under an infinitely flat window.
inline std::function<double(double)> random_smooth_bump(std::mt19937_64& rng,
                                                        double lo, double hi) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_int_distribution<int> modes(1, 4);
    const int n = modes(rng);
    std::vector<double> a(static_cast<std::size_t>(n)), ph(a.size());
    for (int k = 0; k < n; ++k) {
        a[static_cast<std::size_t>(k)] = amp(rng);
        ph[static_cast<std::size_t>(k)] = M_PI * amp(rng);
    }
    return [=](double r) {
        if (r <= lo || r >= hi) return 0.0;
        const double z = (r - lo) / (hi - lo);           // (0,1)
        const double window = std::exp(-1.0 / (z * (1.0 - z)));
        double osc = 1.0;
        for (int k = 0; k < n; ++k)
            osc += a[static_cast<std::size_t>(k)] *
                   std::cos((k + 1) * M_PI * z + ph[static_cast<std::size_t>(k)]);
        return window * osc;
    };
}

} // namespace oracle
