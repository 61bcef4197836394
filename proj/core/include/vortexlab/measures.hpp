#pragma once

#include <string>
#include <vector>

#include "vortexlab/domain.hpp"
#include "vortexlab/fields.hpp"

namespace vortexlab {

struct Atom {
    Vec2 position;
    double weight{0.0};
};

/// Finite sum of weighted Diracs; zero weights are dropped on construction.
class AtomicMeasure {
public:
    AtomicMeasure() = default;
    explicit AtomicMeasure(std::vector<Atom> atoms) {
        for (const Atom& a : atoms) {
            if (a.weight != 0.0) atoms_.push_back(a);
        }
    }
    void add(const Vec2& p, double w) {
        if (w != 0.0) atoms_.push_back({p, w});
    }
    const std::vector<Atom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }

    AtomicMeasure scaled(double s) const {
        AtomicMeasure m;
        for (const Atom& a : atoms_) m.add(a.position, a.weight * s);
        return m;
    }
    AtomicMeasure operator-(const AtomicMeasure& o) const {
        AtomicMeasure m = *this;
        for (const Atom& a : o.atoms_) m.add(a.position, -a.weight);
        return m;
    }

private:
    std::vector<Atom> atoms_;
};

struct DensityPiece {
    Rect region;
    double level{0.0};
};

/// Locally constant signed density sum_l m^l chi_{omega^l} with
/// axis-aligned rectangular pieces, pairwise disjoint up to null sets.
class PiecewiseDensity {
public:
    PiecewiseDensity() = default;
    explicit PiecewiseDensity(std::vector<DensityPiece> pieces);

    const std::vector<DensityPiece>& pieces() const { return pieces_; }
    double value_at(const Vec2& p) const;
    /// Integral of the density over a rectangle (exact).
    double integral(const Rect& r) const;
    double total_variation() const;

private:
    std::vector<DensityPiece> pieces_;
};

double total_variation(const AtomicMeasure& mu);

/// Flat norm of an atomic measure on Omega: minimum cost of cancelling,
/// paying in place (cost 1 per unit), or transporting to the boundary, by
/// min-cost flow on the bipartite atom graph with an absorption node.
double flat_norm_atomic(const AtomicMeasure& mu, const Domain& omega);

struct LpOracleResult {
    double value{0.0};
    double duality_gap{0.0};        // |primal objective - flow cost|
    double max_constraint_violation{0.0};
};

/// Independent grid LP for the same norm: maximize the pairing against grid
/// potentials with |phi| <= 1, Euclidean slope <= 1 along a 16-direction
/// stencil, phi = 0 on the boundary, plus exact atom nodes. Solved via the
/// network dual with primal recovery and a strong-duality certificate.
LpOracleResult flat_norm_lp_oracle_full(const AtomicMeasure& mu, const Domain& omega, double h);
double flat_norm_lp_oracle(const AtomicMeasure& mu, const Domain& omega, double h);

struct FlatDistanceResult {
    double value{0.0};
    double atomization_bound{0.0};
};

/// Flat distance between an atomic measure and a piecewise-constant density
/// after midpoint atomization of the density at spacing hq.
FlatDistanceResult flat_distance_to_density(const AtomicMeasure& nu, const PiecewiseDensity& mu,
                                            const Domain& omega, double hq);

/// CSV: rows "x,y,weight".
void write_measure_csv(const AtomicMeasure& mu, const std::string& path);
AtomicMeasure read_measure_csv(const std::string& path);
/// CSV: rows "x0,y0,x1,y1,level".
void write_density_csv(const PiecewiseDensity& mu, const std::string& path);
PiecewiseDensity read_density_csv(const std::string& path);

}  // namespace vortexlab
