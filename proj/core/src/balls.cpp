#include "vortexlab/balls.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace vortexlab {

namespace {

constexpr double kDisjointTol = 1e-10;

bool lex_less(const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// Minimal enclosing ball of two disks.
std::pair<Vec2, double> enclosing(const Vec2& c1, double r1, const Vec2& c2, double r2) {
    const double d = dist(c1, c2);
    if (d + r2 <= r1) return {c1, r1};
    if (d + r1 <= r2) return {c2, r2};
    const double r = 0.5 * (d + r1 + r2);
    const Vec2 dir = (c2 - c1) / d;
    return {c1 + dir * (r - r1), r};
}

}  // namespace

BallFamily::BallFamily(std::vector<WeightedBall> balls, double time)
    : balls_(std::move(balls)), time_(time) {
    for (const WeightedBall& b : balls_) {
        if (!(b.radius > 0.0)) throw std::invalid_argument("BallFamily: nonpositive radius");
    }
    for (std::size_t a = 0; a < balls_.size(); ++a) {
        for (std::size_t b = a + 1; b < balls_.size(); ++b) {
            if (dist(balls_[a].center, balls_[b].center) <
                balls_[a].radius + balls_[b].radius - kDisjointTol) {
                throw std::invalid_argument("BallFamily: balls are not essentially disjoint");
            }
        }
    }
}

double BallFamily::total_radius() const {
    double s = 0.0;
    for (const WeightedBall& b : balls_) s += b.radius;
    return s;
}

BallFamily merge_family(std::vector<WeightedBall> balls) {
    std::sort(balls.begin(), balls.end(),
              [](const WeightedBall& a, const WeightedBall& b) {
                  return lex_less(a.center, b.center);
              });
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t a = 0; a < balls.size() && !merged; ++a) {
            for (std::size_t b = a + 1; b < balls.size() && !merged; ++b) {
                if (dist(balls[a].center, balls[b].center) <
                    balls[a].radius + balls[b].radius - kDisjointTol) {
                    const auto [c, r] = enclosing(balls[a].center, balls[a].radius,
                                                  balls[b].center, balls[b].radius);
                    balls[a] = {c, r, balls[a].weight + balls[b].weight};
                    balls.erase(balls.begin() + static_cast<std::ptrdiff_t>(b));
                    merged = true;
                }
            }
        }
    }
    return {std::move(balls), 0.0};
}

BallFamily GrowthTrace::family_at(double t) const {
    if (events.empty()) return {};
    std::size_t k = 0;
    while (k + 1 < events.size() && events[k + 1].t <= t) ++k;
    std::vector<WeightedBall> out;
    out.reserve(events[k].family.size());
    for (const TraceBall& b : events[k].family) {
        out.push_back({b.center, b.radius_at(t), b.weight});
    }
    return {std::move(out), t};
}

GrowthTrace grow_family(const BallFamily& initial, double t_target) {
    if (!(t_target > 0.0)) throw std::invalid_argument("grow_family: t_target must be > 0");
    GrowthTrace trace;
    trace.t_end = t_target;
    std::vector<TraceBall> state;
    state.reserve(initial.balls().size());
    for (const WeightedBall& b : initial.balls()) {
        state.push_back({b.center, b.radius, b.weight, b.radius});
    }
    trace.events.push_back({0.0, state});

    double t = 0.0;
    while (true) {
        // Earliest pairwise touching time: (rate_i + rate_j)(1+t) = |c_i - c_j|.
        double t_next = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < state.size(); ++a) {
            for (std::size_t b = a + 1; b < state.size(); ++b) {
                const double rates = state[a].rate + state[b].rate;
                if (rates <= 0.0) continue;
                const double tt = dist(state[a].center, state[b].center) / rates - 1.0;
                if (tt > t + 1e-12 && tt < t_next) t_next = tt;
            }
        }
        if (t_next >= t_target) break;
        t = t_next;
        // Merge everything touching at time t (lexicographic order), repeating
        // in case an enclosing ball overlaps further balls.
        std::sort(state.begin(), state.end(), [](const TraceBall& a, const TraceBall& b) {
            return lex_less(a.center, b.center);
        });
        bool merged = true;
        while (merged) {
            merged = false;
            for (std::size_t a = 0; a < state.size() && !merged; ++a) {
                for (std::size_t b = a + 1; b < state.size() && !merged; ++b) {
                    const double ra = state[a].radius_at(t), rb = state[b].radius_at(t);
                    if (dist(state[a].center, state[b].center) <= ra + rb + 1e-12) {
                        const auto [c, r] = enclosing(state[a].center, ra, state[b].center, rb);
                        TraceBall nb;
                        nb.center = c;
                        nb.weight = state[a].weight + state[b].weight;
                        nb.budget = state[a].budget + state[b].budget;
                        nb.rate = std::min(r / (1.0 + t), nb.budget);
                        state[a] = nb;
                        state.erase(state.begin() + static_cast<std::ptrdiff_t>(b));
                        merged = true;
                    }
                }
            }
        }
        trace.events.push_back({t, state});
    }
    return trace;
}

double annular_lower_bound(const GrowthTrace& trace, double t1, double t2,
                           const std::optional<Rect>& region) {
    if (!(t1 >= 0.0) || !(t2 > t1) || t2 > trace.t_end + 1e-12) {
        throw std::invalid_argument("annular_lower_bound: need 0 <= t1 < t2 <= trace end");
    }
    auto inside = [&](const Vec2& c, double r) {
        if (!region) return true;
        return c.x - r >= region->lo.x && c.x + r <= region->hi.x && c.y - r >= region->lo.y &&
               c.y + r <= region->hi.y;
    };
    double acc = 0.0;
    for (std::size_t k = 0; k < trace.events.size(); ++k) {
        const double a = std::max(trace.events[k].t, t1);
        const double b_end = (k + 1 < trace.events.size()) ? trace.events[k + 1].t : trace.t_end;
        const double b = std::min(b_end, t2);
        if (b <= a) continue;
        for (const TraceBall& ball : trace.events[k].family) {
            if (ball.weight == 0) continue;
            if (!inside(ball.center, ball.radius_at(b))) continue;
            acc += M_PI * std::abs(ball.weight) * std::log((1.0 + b) / (1.0 + a));
        }
    }
    return acc;
}

CoverResult cover_jump_set(const S1GridField& u, double eps, double c_cov) {
    if (!(eps > 0.0)) throw std::invalid_argument("cover_jump_set: eps must be > 0");
    const Domain& d = u.domain();
    const double h = d.h();
    CoverResult out;
    out.jump_length = u.total_jump_length();
    const double log_eps = std::log(1.0 / eps);
    out.budget = c_cov * eps * log_eps * log_eps;
    if (u.jump_edges().empty()) return out;
    if (out.jump_length > out.budget) {
        throw std::runtime_error("cover_jump_set: jump mass " + std::to_string(out.jump_length) +
                                 " exceeds cover budget " + std::to_string(out.budget));
    }

    std::vector<Vec2> mids;
    mids.reserve(u.jump_edges().size());
    for (const JumpEdge& e : u.jump_edges()) {
        const Vec2 a = d.node(e.i, e.j);
        mids.push_back(e.horizontal ? Vec2{a.x + h / 2.0, a.y} : Vec2{a.x, a.y + h / 2.0});
    }
    std::vector<bool> covered(mids.size(), false);
    std::vector<WeightedBall> balls;
    const double r = 2.0 * eps;
    for (std::size_t n = 0; n < mids.size(); ++n) {
        if (covered[n]) continue;
        balls.push_back({mids[n], r, 0});
        // A ball covers an edge when both endpoints are inside; endpoints are
        // h/2 from the midpoint, so midpoint distance r - h suffices.
        for (std::size_t m = n; m < mids.size(); ++m) {
            if (!covered[m] && dist(mids[m], mids[n]) <= r - h) covered[m] = true;
        }
    }
    BallFamily family = merge_family(std::move(balls));
    for (int round = 0; round < 8 && family.total_radius() < eps; ++round) {
        std::vector<WeightedBall> grown = family.balls();
        grown.front().radius += eps - family.total_radius();
        family = merge_family(std::move(grown));
    }
    out.total_radius = family.total_radius();
    out.family = std::move(family);
    return out;
}

AtomicMeasure vortex_measure(const S1GridField& u, const BallFamily& family) {
    const Domain& d = u.domain();
    const double h = d.h();
    AtomicMeasure mu;
    for (const WeightedBall& b : family.balls()) {
        for (const JumpEdge& e : u.jump_edges()) {
            if (e.integer_jump) continue;
            const Vec2 a = d.node(e.i, e.j);
            const Vec2 mid = e.horizontal ? Vec2{a.x + h / 2.0, a.y} : Vec2{a.x, a.y + h / 2.0};
            if (std::abs(dist(mid, b.center) - b.radius) < 2.0 * h) {
                throw std::runtime_error(
                    "vortex_measure: ball boundary lacks 2h clearance from the jump set");
            }
        }
        const int deg = degree_on_circle(u, {b.center, b.radius, 0});
        if (deg != 0) mu.add(b.center, static_cast<double>(deg));
    }
    return mu;
}

void write_trace_csv(const GrowthTrace& trace, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
    std::fprintf(f, "event_index,t,ball_id,cx,cy,r,weight,lower_bound_accumulated\n");
    for (std::size_t k = 0; k < trace.events.size(); ++k) {
        const TraceEvent& ev = trace.events[k];
        const double bound = (ev.t > 0.0) ? annular_lower_bound(trace, 0.0, ev.t) : 0.0;
        for (std::size_t n = 0; n < ev.family.size(); ++n) {
            const TraceBall& b = ev.family[n];
            std::fprintf(f, "%zu,%.17g,%zu,%.17g,%.17g,%.17g,%d,%.17g\n", k, ev.t, n, b.center.x,
                         b.center.y, b.radius_at(ev.t), b.weight, bound);
        }
    }
    std::fclose(f);
}

}  // namespace vortexlab
