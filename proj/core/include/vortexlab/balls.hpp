#pragma once

#include <optional>
#include <string>

#include "vortexlab/balls_fwd.hpp"
#include "vortexlab/currents.hpp"
#include "vortexlab/measures.hpp"

namespace vortexlab {

/// Ball state inside a growth trace; the radius at time t >= birth is
/// rate * (1 + t). `budget` is the sum of the constituent initial radii; the
/// rate never exceeds it, which gives the global radius bound.
struct TraceBall {
    Vec2 center;
    double rate{0.0};
    int weight{0};
    double budget{0.0};

    double radius_at(double t) const { return rate * (1.0 + t); }
};

struct TraceEvent {
    double t{0.0};
    std::vector<TraceBall> family;  // state valid on [t, next event)
};

struct GrowthTrace {
    std::vector<TraceEvent> events;  // events.front().t == 0
    double t_end{0.0};

    BallFamily family_at(double t) const;
};

/// Repeatedly replaces overlapping pairs (lexicographic center order) by the
/// minimal enclosing ball with summed weight until pairwise essentially
/// disjoint. Never increases the sum of radii.
BallFamily merge_family(std::vector<WeightedBall> balls);

/// Synchronized dilation r -> r(1+t) with event-driven merging.
GrowthTrace grow_family(const BallFamily& initial, double t_target);

/// pi * sum over balls contained in `region` (everywhere when nullopt) of
/// |weight| * log((1+b)/(1+a)), accumulated over the trace intervals
/// intersected with [t1, t2]; weights re-read after each merge event.
double annular_lower_bound(const GrowthTrace& trace, double t1, double t2,
                           const std::optional<Rect>& region = std::nullopt);

struct CoverResult {
    BallFamily family;
    double jump_length{0.0};   // H^1 of the full lifting jump set
    double total_radius{0.0};
    double budget{0.0};        // C_cov * eps * log(1/eps)^2
};

/// Greedy 2*eps cover of all jump edges (integer and fractional), merged and
/// clamped below by total radius eps. Throws when the jump mass exceeds the
/// cover budget.
CoverResult cover_jump_set(const S1GridField& u, double eps, double c_cov = 10.0);

/// One atom per ball at its center, weight = circle degree; zero weights
/// dropped. Requires 2h clearance between each circle and the fractional
/// jump set.
AtomicMeasure vortex_measure(const S1GridField& u, const BallFamily& family);

/// CSV rows: event_index,t,ball_id,cx,cy,r,weight,lower_bound_accumulated
void write_trace_csv(const GrowthTrace& trace, const std::string& path);

}  // namespace vortexlab
