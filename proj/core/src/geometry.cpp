#include "vortexlab/geometry.hpp"

#include <cmath>

namespace vortexlab {

double branch_angle(const Vec2& p) {
    if (p.x > 0.0) return std::atan(p.y / p.x);
    if (p.x < 0.0) return M_PI + std::atan(p.y / p.x);
    return p.y >= 0.0 ? M_PI / 2.0 : 3.0 * M_PI / 2.0;
}

double wrapped_angle_increment(const Vec2& a, const Vec2& b) {
    // atan2 of the relative rotation; exact wrap to (-pi, pi].
    return std::atan2(a.cross(b), a.dot(b));
}

namespace {

// Area of the disk B_r(0) inside the quadrant {x <= X, y <= Y}, computed as
// ∫ width(y) dy with width(y) = max(0, min(X, s(y)) + s(y)), s(y) = sqrt(r²-y²).
double quadrant_area(double X, double Y, double r) {
    const double Ym = std::min(Y, r);
    if (Ym <= -r || X <= -r) return 0.0;

    auto anti = [r](double y) {  // antiderivative of s(y)
        const double t = std::clamp(y / r, -1.0, 1.0);
        return 0.5 * (y * std::sqrt(std::max(0.0, r * r - y * y)) +
                      r * r * std::asin(t));
    };
    auto seg2 = [&](double a, double b) {  // ∫ 2 s(y) dy over [a, b]
        return b > a ? 2.0 * (anti(b) - anti(a)) : 0.0;
    };
    auto seg1 = [&](double a, double b) {  // ∫ (X + s(y)) dy over [a, b]
        return b > a ? X * (b - a) + (anti(b) - anti(a)) : 0.0;
    };

    const double ax = std::min(std::abs(X), r);
    const double yx = std::sqrt(std::max(0.0, r * r - ax * ax));
    // |y| <= yx  =>  s(y) >= |X|  => width = X + s(y)
    // |y| >  yx  =>  s(y) <  |X|  => width = 2 s(y) if X >= 0, else 0
    double area = seg1(-yx, std::clamp(Ym, -yx, yx));
    if (X >= 0.0) {
        area += seg2(-r, std::min(Ym, -yx));
        area += seg2(yx, std::max(Ym, yx));
    }
    return area;
}

}  // namespace

double circle_rect_area(const Vec2& c, double r, const Rect& rect) {
    if (r <= 0.0) return 0.0;
    const Rect grown{{rect.lo.x - r, rect.lo.y - r}, {rect.hi.x + r, rect.hi.y + r}};
    if (!grown.contains_closed(c)) return 0.0;

    // Inclusion-exclusion of quadrant areas in circle-centered coordinates.
    const double x0 = rect.lo.x - c.x, x1 = rect.hi.x - c.x;
    const double y0 = rect.lo.y - c.y, y1 = rect.hi.y - c.y;
    const double a = quadrant_area(x1, y1, r) - quadrant_area(x0, y1, r) -
                     quadrant_area(x1, y0, r) + quadrant_area(x0, y0, r);
    return std::clamp(a, 0.0, std::min(M_PI * r * r, rect.area()));
}

}  // namespace vortexlab
