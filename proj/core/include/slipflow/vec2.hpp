#pragma once

#include <array>
#include <cmath>

namespace slipflow {

/// Plain 2-vector. Field values, points and directions all use this type;
/// the heavier Eigen types are reserved for the assembled linear systems.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 b) const { return {x + b.x, y + b.y}; }
    constexpr Vec2 operator-(Vec2 b) const { return {x - b.x, y - b.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 b) { x += b.x; y += b.y; return *this; }
    Vec2& operator-=(Vec2 b) { x -= b.x; y -= b.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    constexpr double dot(Vec2 b) const { return x * b.x + y * b.y; }
    /// z-component of the cross product (a.x b.y - a.y b.x).
    constexpr double cross(Vec2 b) const { return x * b.y - y * b.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double squared_norm() const { return x * x + y * y; }
    Vec2 normalized() const { const double n = norm(); return {x / n, y / n}; }
    /// Counter-clockwise rotation by pi/2.
    constexpr Vec2 perp() const { return {-y, x}; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

/// 2x2 matrix, row-major storage: a[r][c].
struct Mat2 {
    std::array<std::array<double, 2>, 2> a{{{0.0, 0.0}, {0.0, 0.0}}};

    constexpr Mat2() = default;
    constexpr Mat2(double a00, double a01, double a10, double a11)
        : a{{{a00, a01}, {a10, a11}}} {}

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    constexpr double operator()(int r, int c) const { return a[r][c]; }
    double& operator()(int r, int c) { return a[r][c]; }

    constexpr Vec2 operator*(Vec2 v) const {
        return {a[0][0] * v.x + a[0][1] * v.y, a[1][0] * v.x + a[1][1] * v.y};
    }
    constexpr Mat2 operator*(Mat2 b) const {
        return {a[0][0] * b.a[0][0] + a[0][1] * b.a[1][0],
                a[0][0] * b.a[0][1] + a[0][1] * b.a[1][1],
                a[1][0] * b.a[0][0] + a[1][1] * b.a[1][0],
                a[1][0] * b.a[0][1] + a[1][1] * b.a[1][1]};
    }
    constexpr Mat2 operator+(Mat2 b) const {
        return {a[0][0] + b.a[0][0], a[0][1] + b.a[0][1],
                a[1][0] + b.a[1][0], a[1][1] + b.a[1][1]};
    }
    constexpr Mat2 operator-(Mat2 b) const {
        return {a[0][0] - b.a[0][0], a[0][1] - b.a[0][1],
                a[1][0] - b.a[1][0], a[1][1] - b.a[1][1]};
    }
    constexpr Mat2 operator*(double s) const {
        return {a[0][0] * s, a[0][1] * s, a[1][0] * s, a[1][1] * s};
    }
    constexpr Mat2 transpose() const {
        return {a[0][0], a[1][0], a[0][1], a[1][1]};
    }
    constexpr double det() const { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }
    constexpr double trace() const { return a[0][0] + a[1][1]; }
    constexpr Mat2 inverse() const {
        const double d = det();
        return {a[1][1] / d, -a[0][1] / d, -a[1][0] / d, a[0][0] / d};
    }
    constexpr double frobenius_sq() const {
        return a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] +
               a[1][1] * a[1][1];
    }
    double frobenius() const { return std::sqrt(frobenius_sq()); }
};

constexpr Mat2 operator*(double s, Mat2 m) { return m * s; }

/// Outer product a b^T.
constexpr Mat2 outer(Vec2 a, Vec2 b) {
    return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
}

}  // namespace slipflow
