#pragma once

#include <vector>

#include "vortexlab/geometry.hpp"

namespace vortexlab {

struct WeightedBall {
    Vec2 center;
    double radius{0.0};
    int weight{0};
};

/// Pairwise essentially disjoint family (closures may touch, tolerance 1e-10).
class BallFamily {
public:
    BallFamily() = default;
    BallFamily(std::vector<WeightedBall> balls, double time);

    const std::vector<WeightedBall>& balls() const { return balls_; }
    double time() const { return time_; }
    bool empty() const { return balls_.empty(); }
    double total_radius() const;

private:
    std::vector<WeightedBall> balls_;
    double time_{0.0};
};

}  // namespace vortexlab
