#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace nuhlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(Vec2 v) { return v / norm(v); }
/// Counter-clockwise quarter turn.
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

/// Angle in [0, pi/2] between the lines spanned by a and b.
inline double line_angle(Vec2 a, Vec2 b) {
    const double c = std::abs(dot(a, b));
    const double s = std::abs(cross(a, b));
    return std::atan2(s, c);
}

/// Row-major 2x2 real matrix [[a, b], [c, d]].
struct RealMatrix2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static constexpr RealMatrix2 identity() { return {}; }

    constexpr double det() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }
    constexpr Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    constexpr RealMatrix2 operator*(const RealMatrix2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    constexpr RealMatrix2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    constexpr RealMatrix2 transposed() const { return {a, c, b, d}; }
    /// Caller guarantees det() != 0.
    constexpr RealMatrix2 inverse() const {
        const double k = 1.0 / det();
        return {d * k, -b * k, -c * k, a * k};
    }
    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }
    bool finite() const {
        return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
    }
};

/// Solves M w = v without forming the inverse.
inline Vec2 solve(const RealMatrix2& m, Vec2 v) {
    const double k = 1.0 / m.det();
    return {(m.d * v.x - m.b * v.y) * k, (-m.c * v.x + m.a * v.y) * k};
}

/// Row-major 2x2 integer matrix.
struct IntMatrix2 {
    std::int64_t e11 = 1, e12 = 0, e21 = 0, e22 = 1;

    constexpr std::int64_t det() const { return e11 * e22 - e12 * e21; }
    constexpr std::int64_t trace() const { return e11 + e22; }
    constexpr RealMatrix2 to_real() const {
        return {static_cast<double>(e11), static_cast<double>(e12), static_cast<double>(e21),
                static_cast<double>(e22)};
    }
    constexpr IntMatrix2 operator*(const IntMatrix2& o) const {
        return {e11 * o.e11 + e12 * o.e21, e11 * o.e12 + e12 * o.e22, e21 * o.e11 + e22 * o.e21,
                e21 * o.e12 + e22 * o.e22};
    }
    constexpr bool operator==(const IntMatrix2&) const = default;
};

/// Integer inverse of a unimodular matrix.
constexpr IntMatrix2 unimodular_inverse(const IntMatrix2& m) {
    const std::int64_t k = m.det();  // +-1
    return {m.e22 * k, -m.e12 * k, -m.e21 * k, m.e11 * k};
}

}  // namespace nuhlab
