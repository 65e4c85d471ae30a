#pragma once

#include <cmath>
#include <numbers>

#include "triflex/errors.hpp"

namespace triflex {

inline constexpr double kPi = std::numbers::pi;

/// Norm threshold below which a vector counts as degenerate (agents
/// coincide). Converting the "agents do not start at the same positions"
/// assumption into a hard runtime error instead of a silent NaN.
inline constexpr double kDegenerateNorm = 1e-9;

/// Planar vector, double precision. Value type; all operations are pure.
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double px, double py) : x(px), y(py) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    friend constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

    Vec2& operator+=(const Vec2& r) { x += r.x; y += r.y; return *this; }
    Vec2& operator-=(const Vec2& r) { x -= r.x; y -= r.y; return *this; }

    constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm2() const { return x * x + y * y; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

/// 2D cross product u_x v_y - u_y v_x. Zero exactly on collinear inputs;
/// used as the collinearity residual throughout.
constexpr double cross2(const Vec2& u, const Vec2& v) {
    return u.x * v.y - u.y * v.x;
}

/// v / ||v||. Throws DegenerateVector when ||v|| <= kDegenerateNorm.
inline Vec2 unit(const Vec2& v) {
    const double n = v.norm();
    if (!(n > kDegenerateNorm)) {
        throw DegenerateVector("unit(): vector norm " + std::to_string(n) +
                               " at or below coincidence threshold");
    }
    return {v.x / n, v.y / n};
}

/// Rotation by a fixed angle, stored as (cos, sin) of the matrix
/// [[c, -s], [s, c]]. Orthogonal with determinant +1 by construction.
struct Rot2 {
    double c{1.0};
    double s{0.0};

    static Rot2 from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }
    static constexpr Rot2 identity() { return {1.0, 0.0}; }

    constexpr double m00() const { return c; }
    constexpr double m01() const { return -s; }
    constexpr double m10() const { return s; }
    constexpr double m11() const { return c; }

    constexpr Vec2 apply(const Vec2& v) const { return {c * v.x - s * v.y, s * v.x + c * v.y}; }
    constexpr Vec2 apply_transposed(const Vec2& v) const {
        return {c * v.x + s * v.y, -s * v.x + c * v.y};
    }
    constexpr Rot2 transposed() const { return {c, -s}; }
    constexpr Rot2 operator*(const Rot2& r) const {
        return {c * r.c - s * r.s, s * r.c + c * r.s};
    }
    double angle() const { return std::atan2(s, c); }

    /// max |(R^T R - I)_ij|; zero (to roundoff) for any Rot2 built here.
    double orthogonality_residual() const {
        const double d = c * c + s * s;
        return std::abs(d - 1.0);
    }
};

/// Rotation matrix [[cos t, -sin t], [sin t, cos t]].
inline Rot2 rot2(double theta) { return Rot2::from_angle(theta); }

/// Signed angle a in (-pi, pi] with rot2(a) * unit(u) = unit(v).
/// Counterclockwise positive. Throws DegenerateVector on degenerate input.
inline double signed_angle(const Vec2& u, const Vec2& v) {
    const Vec2 uu = unit(u);
    const Vec2 vv = unit(v);
    double a = std::atan2(cross2(uu, vv), uu.dot(vv));
    if (a <= -kPi) a = kPi;  // wrap the -pi branch cut to +pi
    return a;
}

/// Proper rigid motion of the plane: p -> R p + t.
struct SE2Transform {
    Rot2 R{};
    Vec2 t{};

    static constexpr SE2Transform identity() { return {Rot2::identity(), Vec2{}}; }

    constexpr Vec2 apply(const Vec2& p) const { return R.apply(p) + t; }

    /// Composition: (this * g)(p) = this(g(p)).
    constexpr SE2Transform operator*(const SE2Transform& g) const {
        return {R * g.R, R.apply(g.t) + t};
    }
};

}  // namespace triflex
