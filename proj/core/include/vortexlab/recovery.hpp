#pragma once

#include <string>
#include <vector>

#include "vortexlab/energies.hpp"
#include "vortexlab/poisson.hpp"

namespace vortexlab {

/// Lattice of unit vortices realizing a piecewise-constant density: per
/// nonzero piece, points of 2 r^l Z^2 whose closed r^l-squares fit inside the
/// piece, with r^l = 1 / (2 sqrt(N |m^l|)). Vortices carry degree sign(m^l).
struct LatticePlacement {
    struct Piece {
        std::size_t piece_index{0};
        double level{0.0};
        double radius{0.0};            // r^l
        int sign{1};
        std::vector<Vec2> points;
        double coverage{0.0};          // N^l / N
        double coverage_deviation{0.0};  // |N^l/N - |m^l| |omega^l||
    };
    std::vector<Piece> pieces;
    int n_eps{0};

    std::size_t total_points() const;
    double min_radius() const;
    /// Signed vortex measure sum sign(m^l) delta_x.
    AtomicMeasure as_measure() const;
};

LatticePlacement lattice_vortices(const PiecewiseDensity& mu, int n_eps);

/// The diffuse background entering the construction; beta = -(1/pi) perp(T^D).
/// Line integrals of beta along segments are exact for all kinds.
struct BackgroundField {
    enum class Kind { Zero, Constant, Radial } kind{Kind::Zero};
    Vec2 td_constant;   // Kind::Constant: the T^D value
    Vec2 center;        // Kind::Radial: T^D = slope * (x - center)
    double slope{0.0};

    static BackgroundField zero() { return {}; }
    static BackgroundField constant(Vec2 td);
    /// T^D = slope (x - c); -Div T^D = -2 slope, so slope = -pi m / 2 matches
    /// a level-m density.
    static BackgroundField radial(Vec2 c, double slope);
    static BackgroundField for_density_level(Vec2 c, double level);

    Vec2 td_at(const Vec2& p) const;
    Vec2 beta_at(const Vec2& p) const;
    double beta_line_integral(const Vec2& p0, const Vec2& p1) const;
    VectorGridField td_field(const Domain& grid) const;
};

struct KernelFields {
    VectorGridField k_hat;
    VectorGridField k_tilde;
};

/// Cellwise evaluation of the per-vortex kernels on their supports (annuli
/// A_{eps, r^l} for k_hat, balls B_{r^l} for k_tilde), signed by the piece.
KernelFields vortex_kernels(const LatticePlacement& placement, double eps, const Domain& grid);

struct PoissonCorrection {
    ScalarGridField v;
    VectorGridField beta_correction;  // the term added to beta_bar: -perp(grad v)
    double grad_l2{0.0};              // ||grad v||_L2
    double scaled_norm{0.0};          // ||grad v|| / sqrt(N |log eps|)
};

/// Solves -Laplace v = mu_tilde - N mu (zero boundary) with exact cell
/// averages of the ball-uniform densities on the right-hand side.
PoissonCorrection poisson_correction(const LatticePlacement& placement,
                                     const PiecewiseDensity& mu, int n_eps, const Domain& grid,
                                     double eps);

struct CoreDiagnostics {
    Vec2 center;
    int sign{1};
    double piece_radius{0.0};
    double circulation_error{0.0};  // max over sampled radii in (eps, r^l)
    double jump_length{0.0};        // fractional H^1 on the local patch
    int degree{0};                  // winding on the patch circle of radius 2 eps
    double blend_energy{0.0};       // measured Dirichlet energy on B_{2 eps}
    double kernel_energy{0.0};      // measured |K-hat|^2 over A_{eps, r^l}
};

struct RecoveryField {
    double eps{0.0};
    int n_eps{0};
    LatticePlacement placement;
    S1GridField field;               // on the dual (cell-center) grid
    bool field_resolved{false};      // eps >= 4h for the global grid
    VectorGridField beta_bar;        // cell-sampled on the primal grid
    KernelFields kernels;
    PoissonCorrection correction;
    std::vector<CoreDiagnostics> cores;

    double jump_length{0.0};         // sum of per-core patch measurements
    double jump_bound{0.0};          // sum_l N^l 4 eps
    double max_curl_residual{0.0};   // off-core plaquette circulation / h^2
    double two_tree_discrepancy{0.0};
    double energy_dirichlet{0.0};    // termwise assembly
    double energy_jump{0.0};
    double energy_total{0.0};
    double direct_energy_total{-1.0};  // ms_energy route, when resolved
};

/// Builds the recovery field: lattice vortices, kernels, Poisson correction,
/// spanning-tree phase with cut rays, core blending, explicit jump set, and
/// the multiscale energy assembly.
RecoveryField assemble_recovery_field(const PiecewiseDensity& mu, const BackgroundField& td,
                                      double eps, int n_eps, const Domain& grid);

/// Default N_eps = floor(|log eps|).
int default_n_eps(double eps);

struct ReportRow {
    double eps{0.0};
    int n_eps{0};
    double scaled_energy{0.0};
    double gamma_target{0.0};
    double core_ratio{0.0};   // measured kernel energy / predicted
    double jump_ratio{0.0};   // (1/(N |log eps|)) (1/eps) H^1(S_u)
    double flat_dist{0.0};    // flat distance of mu_eps / N to mu
    double h1_resid{0.0};     // ||mu_tilde/N - mu||_{H^-1}
};

struct ConvergenceReport {
    Regime regime{Regime::Critical};
    std::vector<ReportRow> rows;
    /// CSV: epsilon,N_eps,scaled_energy,gamma_target,core_ratio,jump_ratio,flat_dist,h1_resid
    void write_csv(const std::string& path) const;
};

/// Runs the recovery pipeline over a strictly decreasing epsilon list
/// (length >= 3). n_eps_list may be empty (defaults per epsilon) or parallel
/// to eps_list.
ConvergenceReport convergence_report(const PiecewiseDensity& mu, const BackgroundField& td,
                                     const std::vector<double>& eps_list,
                                     const std::vector<int>& n_eps_list, Regime regime,
                                     const Domain& grid);

}  // namespace vortexlab
