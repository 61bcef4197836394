#pragma once

#include <cmath>
#include <algorithm>

namespace vortexlab {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Counter-clockwise quarter turn: (x, y) -> (-y, x).
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

struct Rect {
    Vec2 lo;
    Vec2 hi;

    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    double area() const { return width() * height(); }
    bool contains(const Vec2& p) const {
        return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y;
    }
    bool contains_closed(const Vec2& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    /// Distance from an interior point to the rectangle boundary.
    double boundary_distance(const Vec2& p) const {
        return std::min(std::min(p.x - lo.x, hi.x - p.x),
                        std::min(p.y - lo.y, hi.y - p.y));
    }
    /// Area of the overlap with another axis-aligned rectangle.
    double overlap_area(const Rect& o) const {
        const double w = std::min(hi.x, o.hi.x) - std::max(lo.x, o.lo.x);
        const double h = std::min(hi.y, o.hi.y) - std::max(lo.y, o.lo.y);
        return (w > 0.0 && h > 0.0) ? w * h : 0.0;
    }
    bool intersects(const Rect& o) const {
        return std::min(hi.x, o.hi.x) > std::max(lo.x, o.lo.x) &&
               std::min(hi.y, o.hi.y) > std::max(lo.y, o.lo.y);
    }
};

/// Polar angle with the branch cut on the downward ray {x1 = 0, x2 < 0}:
/// arctan(x2/x1) continued so the range is (-pi/2, 3*pi/2].
double branch_angle(const Vec2& p);

/// Signed angle increment from a to b wrapped to (-pi, pi].
double wrapped_angle_increment(const Vec2& a, const Vec2& b);

/// Nearest integer (half-away-from-zero) and the fractional residual.
inline long long nearest_int(double v) { return std::llround(v); }
inline double frac_residual(double v) { return v - static_cast<double>(nearest_int(v)); }

/// Exact area of the intersection of the disk B_r(c) with an
/// axis-aligned rectangle.
double circle_rect_area(const Vec2& c, double r, const Rect& rect);

}  // namespace vortexlab
