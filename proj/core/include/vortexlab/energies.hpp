#pragma once

#include <optional>
#include <string>
#include <variant>

#include "vortexlab/balls_fwd.hpp"
#include "vortexlab/currents.hpp"
#include "vortexlab/measures.hpp"

namespace vortexlab {

enum class Regime { Subcritical, Critical, Supercritical };

const char* regime_name(Regime r);

/// Integration region for the energy quadratures; cells are weighted by the
/// exact area fraction inside the region.
class EnergyRegion {
public:
    static EnergyRegion everywhere() { return {}; }
    static EnergyRegion disk(Vec2 c, double r);
    static EnergyRegion annulus(Vec2 c, double r_in, double r_out);
    static EnergyRegion rect(Rect r);

    double cell_fraction(const Domain& d, std::size_t i, std::size_t j) const;

private:
    enum class Kind { All, Disk, Annulus, Rect } kind_{Kind::All};
    Vec2 center_;
    double r_in_{0.0};
    double r_out_{0.0};
    Rect rect_{};
};

struct EnergyReport {
    double dirichlet{0.0};
    double second_term{0.0};  // jump, potential or plastic term
    double total{0.0};
    double scaling_divisor{1.0};
    double scaled_total{0.0};
    Regime regime{Regime::Subcritical};
    bool admissible{true};
    std::string note;

    /// One CSV row: epsilon,regime,dirichlet,second_term,total,scaled_total,admissible
    std::string csv_row(double epsilon) const;
};

EnergyReport with_scaling(EnergyReport r, Regime regime, double divisor);

/// (1/2) sum |grad u|^2 h^2 + eps^-2 sum (1 - |u|^2)^2 h^2 over the region.
EnergyReport gl_energy(const RawVectorField& u_raw, double eps,
                       const EnergyRegion& region = EnergyRegion::everywhere());

RawVectorField as_raw_field(const S1GridField& u);

/// (1/2) integral over the region minus the closed eps-balls, plus |mu|(Omega);
/// verifies deg(u, dB^n) = mu(B^n) for every ball.
EnergyReport cr_energy(const S1GridField& u, const AtomicMeasure& mu, const BallFamily& cores,
                       double eps, const EnergyRegion& region = EnergyRegion::everywhere());

/// (1/2) sum |grad u|^2 h^2 + (1/eps) * (fractional jump count) * h; flags
/// inadmissible fields (fractional jumps outside the inner subdomain).
EnergyReport ms_energy(const S1GridField& u, double eps,
                       const EnergyRegion& region = EnergyRegion::everywhere());

using LimitMeasure = std::variant<AtomicMeasure, PiecewiseDensity>;

/// Gamma-limit values: pi|mu|(Omega) (subcritical), pi|mu|(Omega) +
/// 2 sum |T^D|^2 h^2 (critical, with the -Div T^D = pi mu compatibility
/// check), 2 sum |T^D|^2 h^2 (supercritical).
double gamma_limit_energy(Regime regime, const LimitMeasure& mu, const VectorGridField& td);

/// Worst relative residual of the distributional identity -Div T^D = pi mu
/// over 10 deterministic smooth compactly supported test functions.
double divergence_compatibility_residual(const LimitMeasure& mu, const VectorGridField& td);

}  // namespace vortexlab
