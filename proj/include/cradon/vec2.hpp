#pragma once

#include <cmath>

namespace cradon {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double a) const { return {a * x, a * y}; }
    constexpr Vec2 operator/(double a) const { return {x / a, y / a}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    /// z-component of the 2D cross product.
    constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm2() const { return x * x + y * y; }
    Vec2 unit() const { const double n = norm(); return {x / n, y / n}; }
    /// Counterclockwise rotation by 90 degrees: (-y, x).
    constexpr Vec2 perp() const { return {-y, x}; }
};

inline constexpr Vec2 operator*(double a, Vec2 v) { return {a * v.x, a * v.y}; }

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Reflection of v across the line spanned by the unit vector u.
inline constexpr Vec2 reflect_across(Vec2 v, Vec2 u) {
    return 2.0 * v.dot(u) * u - v;
}

} // namespace cradon
