#include "vortexlab/domain.hpp"

#include <cmath>

namespace vortexlab {

namespace {

std::size_t checked_steps(double length, double h, const char* axis) {
    const double steps = length / h;
    const double rounded = std::round(steps);
    if (rounded < 1.0 || std::abs(steps - rounded) > 1e-12 * std::max(1.0, steps)) {
        throw std::invalid_argument(std::string("Domain: side length along ") + axis +
                                    " is not an integer multiple of h");
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

Domain::Domain(Vec2 lower, Vec2 upper, double spacing, double inner_margin)
    : lower_(lower), upper_(upper), h_(spacing), delta_(inner_margin) {
    if (!(h_ > 0.0)) throw std::invalid_argument("Domain: h must be positive");
    if (!(upper_.x > lower_.x) || !(upper_.y > lower_.y)) {
        throw std::invalid_argument("Domain: upper corner must exceed lower corner");
    }
    nx_ = checked_steps(upper_.x - lower_.x, h_, "x");
    ny_ = checked_steps(upper_.y - lower_.y, h_, "y");
    if (delta_ < 0.0) throw std::invalid_argument("Domain: inner margin must be >= 0");
    if (2.0 * delta_ >= upper_.x - lower_.x || 2.0 * delta_ >= upper_.y - lower_.y) {
        throw std::invalid_argument("Domain: 2*inner_margin must be smaller than each side");
    }
}

}  // namespace vortexlab
