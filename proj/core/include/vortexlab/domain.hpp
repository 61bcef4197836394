#pragma once

#include <cstddef>
#include <stdexcept>

#include "vortexlab/geometry.hpp"

namespace vortexlab {

/// Uniform axis-aligned rectangular grid. Nodes sit at the lattice
/// lo + h*(i, j), i = 0..nx, j = 0..ny; cells are the h x h squares between
/// them. The inner margin delta defines the compactly contained subdomain
/// used for jump-set admissibility.
class Domain {
public:
    Domain(Vec2 lower, Vec2 upper, double spacing, double inner_margin = 0.0);

    const Vec2& lower() const { return lower_; }
    const Vec2& upper() const { return upper_; }
    double h() const { return h_; }
    double inner_margin() const { return delta_; }

    std::size_t nx() const { return nx_; }  // cells along x
    std::size_t ny() const { return ny_; }
    std::size_t node_count() const { return (nx_ + 1) * (ny_ + 1); }
    std::size_t cell_count() const { return nx_ * ny_; }

    std::size_t node_index(std::size_t i, std::size_t j) const { return j * (nx_ + 1) + i; }
    std::size_t cell_index(std::size_t i, std::size_t j) const { return j * nx_ + i; }

    Vec2 node(std::size_t i, std::size_t j) const {
        return {lower_.x + h_ * static_cast<double>(i), lower_.y + h_ * static_cast<double>(j)};
    }
    Vec2 cell_center(std::size_t i, std::size_t j) const {
        return {lower_.x + h_ * (static_cast<double>(i) + 0.5),
                lower_.y + h_ * (static_cast<double>(j) + 0.5)};
    }
    Rect cell_rect(std::size_t i, std::size_t j) const {
        const Vec2 a = node(i, j);
        return {a, {a.x + h_, a.y + h_}};
    }
    Rect bounds() const { return {lower_, upper_}; }
    /// Omega' = Omega shrunk by the inner margin on each side.
    Rect inner_bounds() const {
        return {{lower_.x + delta_, lower_.y + delta_}, {upper_.x - delta_, upper_.y - delta_}};
    }

    bool contains(const Vec2& p) const { return bounds().contains(p); }
    double boundary_distance(const Vec2& p) const { return bounds().boundary_distance(p); }

    bool same_grid(const Domain& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && std::abs(h_ - o.h_) < 1e-15 &&
               dist(lower_, o.lower_) < 1e-12;
    }

private:
    Vec2 lower_;
    Vec2 upper_;
    double h_;
    double delta_;
    std::size_t nx_;
    std::size_t ny_;
};

}  // namespace vortexlab
