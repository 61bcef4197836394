#include "vortexlab/measures.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace vortexlab {

namespace {

constexpr double kUnitScale = 1e6;  // 1e-6 mass quantization

// Successive shortest augmenting paths with potentials (Dijkstra) on an
// explicit arc list; capacities in integer units, costs per unit of mass.
class MinCostFlow {
public:
    explicit MinCostFlow(int n) : head_(n, -1), potential_(n, 0.0) {}

    void add_arc(int from, int to, long long cap, double cost) {
        arcs_.push_back({to, head_[from], cap, cost});
        head_[from] = static_cast<int>(arcs_.size()) - 1;
        arcs_.push_back({from, head_[to], 0, -cost});
        head_[to] = static_cast<int>(arcs_.size()) - 1;
    }

    /// Sends `amount` units from s to t; returns the added cost. Throws if
    /// the demand cannot be routed.
    double send(int s, int t, long long amount) {
        double total = 0.0;
        while (amount > 0) {
            if (!dijkstra(s)) throw std::runtime_error("MinCostFlow: disconnected network");
            for (std::size_t v = 0; v < potential_.size(); ++v) {
                if (dist_[v] < kInf) potential_[v] += dist_[v];
            }
            if (dist_[t] >= kInf) throw std::runtime_error("MinCostFlow: sink unreachable");
            long long push = amount;
            for (int a = parent_arc_[t]; a != -1;) {
                push = std::min(push, arcs_[a].cap);
                const int u = arcs_[a ^ 1].to;
                a = (u == s) ? -1 : parent_arc_[u];
            }
            for (int a = parent_arc_[t]; a != -1;) {
                arcs_[a].cap -= push;
                arcs_[a ^ 1].cap += push;
                total += static_cast<double>(push) * arcs_[a].cost;
                const int u = arcs_[a ^ 1].to;
                a = (u == s) ? -1 : parent_arc_[u];
            }
            amount -= push;
        }
        return total;
    }

private:
    struct Arc {
        int to;
        int next;
        long long cap;
        double cost;
    };
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    bool dijkstra(int s) {
        const std::size_t n = potential_.size();
        dist_.assign(n, kInf);
        parent_arc_.assign(n, -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist_[s] = 0.0;
        heap.push({0.0, s});
        while (!heap.empty()) {
            auto [dv, v] = heap.top();
            heap.pop();
            if (dv > dist_[v] + 1e-15) continue;
            for (int a = head_[v]; a != -1; a = arcs_[a].next) {
                if (arcs_[a].cap <= 0) continue;
                const int to = arcs_[a].to;
                const double nd =
                    dist_[v] + std::max(0.0, arcs_[a].cost + potential_[v] - potential_[to]);
                if (nd < dist_[to] - 1e-15) {
                    dist_[to] = nd;
                    parent_arc_[to] = a;
                    heap.push({nd, to});
                }
            }
        }
        return true;
    }

    std::vector<Arc> arcs_;
    std::vector<int> head_;
    std::vector<double> potential_;
    std::vector<double> dist_;
    std::vector<int> parent_arc_;
};

}  // namespace

double flat_norm_atomic(const AtomicMeasure& mu, const Domain& omega) {
    std::vector<Atom> pos, neg;
    for (const Atom& a : mu.atoms()) {
        const double bd = omega.boundary_distance(a.position);
        if (!(bd > 0.0)) {
            throw std::invalid_argument("flat_norm_atomic: atom on or outside the boundary");
        }
        (a.weight > 0.0 ? pos : neg).push_back(a);
    }
    if (pos.empty() && neg.empty()) return 0.0;

    const int np = static_cast<int>(pos.size());
    const int nn = static_cast<int>(neg.size());
    // Nodes: [0, np) positives, [np, np+nn) negatives, absorb, source, sink.
    const int absorb = np + nn;
    const int source = absorb + 1;
    const int sink = absorb + 2;
    MinCostFlow flow(sink + 1);

    long long supply = 0;
    for (int i = 0; i < np; ++i) {
        const long long units = std::llround(pos[i].weight * kUnitScale);
        supply += units;
        flow.add_arc(source, i, units, 0.0);
        flow.add_arc(i, absorb, std::numeric_limits<long long>::max() / 4,
                     std::min(omega.boundary_distance(pos[i].position), 1.0));
        for (int j = 0; j < nn; ++j) {
            flow.add_arc(i, np + j, std::numeric_limits<long long>::max() / 4,
                         dist(pos[i].position, neg[j].position));
        }
    }
    long long demand = 0;
    for (int j = 0; j < nn; ++j) {
        const long long units = std::llround(-neg[j].weight * kUnitScale);
        demand += units;
        flow.add_arc(np + j, sink, units, 0.0);
        flow.add_arc(absorb, np + j, std::numeric_limits<long long>::max() / 4,
                     std::min(omega.boundary_distance(neg[j].position), 1.0));
    }
    // The absorption node balances the surplus on either side.
    flow.add_arc(source, absorb, demand, 0.0);
    flow.add_arc(absorb, sink, supply, 0.0);

    const double cost = flow.send(source, sink, supply + demand);
    return cost / kUnitScale;
}

}  // namespace vortexlab
