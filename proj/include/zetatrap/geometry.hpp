#pragma once

// Smooth closed curves parameterized over [0, 2pi), counterclockwise.

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "zetatrap/errors.hpp"
#include "zetatrap/specfun.hpp"

namespace zetatrap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(const Vec2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, const Vec2& a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(const Vec2& a, double s) { return {s * a.x, s * a.y}; }
    friend Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

inline constexpr double kTwoPi = 2.0 * kPi;

/// Closed curve rho(t), t in [0, 2pi), with analytic first and second derivatives.
struct ParametricCurve {
    using Map = std::function<Vec2(double)>;

    std::string name;
    Map position;
    Map d1;
    Map d2;

    double period() const { return kTwoPi; }
};

/// Local data consumed by every quadrature row.
struct CurveJet {
    Vec2 pos;
    Vec2 d1;
    Vec2 d2;
    double speed = 0.0;
    Vec2 normal;     // outward unit normal (d1.y, -d1.x)/speed
    double c0 = 0.0; // (rho'' . n) / (4 pi |rho'|^2)

    Vec2 tangent() const { return d1 / speed; }
    /// Signed curvature; positive on a counterclockwise circle.
    double curvature() const { return cross(d1, d2) / (speed * speed * speed); }
};

inline CurveJet jet(const ParametricCurve& curve, double t) {
    CurveJet j;
    j.pos = curve.position(t);
    j.d1 = curve.d1(t);
    j.d2 = curve.d2(t);
    j.speed = norm(j.d1);
    if (!(j.speed >= 1e-12))
        throw InvalidGeometry("degenerate parameterization: |rho'(t)| < 1e-12 at t = " + std::to_string(t) +
                              " on curve '" + curve.name + "'");
    j.normal = Vec2{j.d1.y, -j.d1.x} / j.speed;
    j.c0 = dot(j.d2, j.normal) / (4.0 * kPi * j.speed * j.speed);
    return j;
}

/// Polar star r(t) = base + amplitude cos(lobes t).
inline ParametricCurve star_curve(double base = 1.0, double amplitude = 0.3, int lobes = 5) {
    if (!std::isfinite(base) || !std::isfinite(amplitude))
        throw InvalidGeometry("star_curve: non-finite parameters");
    if (lobes < 0)
        throw InvalidGeometry("star_curve: lobes must be nonnegative");
    // min over t of base + amplitude cos(lobes t)
    const double min_radius = lobes == 0 ? base + amplitude : base - std::abs(amplitude);
    if (!(min_radius > 0.0))
        throw InvalidGeometry("star_curve: radius base + amplitude cos(lobes t) must stay positive (min " +
                              std::to_string(min_radius) + ")");

    const double a = amplitude;
    const double L = lobes;
    const auto p = [=](double t) { return base + a * std::cos(L * t); };
    const auto dp = [=](double t) { return -a * L * std::sin(L * t); };
    const auto ddp = [=](double t) { return -a * L * L * std::cos(L * t); };

    ParametricCurve c;
    c.name = "star(" + std::to_string(base) + "," + std::to_string(amplitude) + "," + std::to_string(lobes) + ")";
    c.position = [=](double t) { return Vec2{p(t) * std::cos(t), p(t) * std::sin(t)}; };
    c.d1 = [=](double t) {
        const double ct = std::cos(t), st = std::sin(t);
        return Vec2{dp(t) * ct - p(t) * st, dp(t) * st + p(t) * ct};
    };
    c.d2 = [=](double t) {
        const double ct = std::cos(t), st = std::sin(t);
        return Vec2{(ddp(t) - p(t)) * ct - 2.0 * dp(t) * st, (ddp(t) - p(t)) * st + 2.0 * dp(t) * ct};
    };
    return c;
}

inline ParametricCurve circle_curve(double radius = 1.0) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw InvalidGeometry("circle_curve: radius must be positive");
    ParametricCurve c;
    c.name = "circle(" + std::to_string(radius) + ")";
    c.position = [radius](double t) { return Vec2{radius * std::cos(t), radius * std::sin(t)}; };
    c.d1 = [radius](double t) { return Vec2{-radius * std::sin(t), radius * std::cos(t)}; };
    c.d2 = [radius](double t) { return Vec2{-radius * std::cos(t), -radius * std::sin(t)}; };
    return c;
}

/// Checks a user-supplied curve: periodicity, regularity, derivative consistency
/// against central differences, and counterclockwise orientation (positive area).
inline void validate_curve(const ParametricCurve& curve, int samples = 32) {
    if (!curve.position || !curve.d1 || !curve.d2)
        throw InvalidGeometry("curve '" + curve.name + "' must supply position, d1 and d2");
    const double step = 1e-5;
    double area = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = kTwoPi * (i + 0.37) / samples;
        const CurveJet j = jet(curve, t);
        const Vec2 wrap = curve.position(t + kTwoPi) - j.pos;
        if (norm(wrap) > 1e-12 * (1.0 + norm(j.pos)))
            throw InvalidGeometry("curve '" + curve.name + "' is not 2pi-periodic");
        const Vec2 fd1 = (curve.position(t + step) - curve.position(t - step)) / (2.0 * step);
        const Vec2 fd2 = (curve.d1(t + step) - curve.d1(t - step)) / (2.0 * step);
        if (norm(fd1 - j.d1) > 1e-6 * (1.0 + j.speed) || norm(fd2 - j.d2) > 1e-6 * (1.0 + norm(j.d2)))
            throw InvalidGeometry("curve '" + curve.name + "': derivatives disagree with finite differences");
        area += 0.5 * cross(j.pos, j.d1) * kTwoPi / samples;
    }
    if (!(area > 0.0))
        throw InvalidGeometry("curve '" + curve.name + "' must be counterclockwise");
}

} // namespace zetatrap
