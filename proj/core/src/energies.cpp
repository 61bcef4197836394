#include "vortexlab/energies.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "vortexlab/balls.hpp"

namespace vortexlab {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

EnergyRegion EnergyRegion::disk(Vec2 c, double r) {
    EnergyRegion reg;
    reg.kind_ = Kind::Disk;
    reg.center_ = c;
    reg.r_out_ = r;
    return reg;
}

EnergyRegion EnergyRegion::annulus(Vec2 c, double r_in, double r_out) {
    EnergyRegion reg;
    reg.kind_ = Kind::Annulus;
    reg.center_ = c;
    reg.r_in_ = r_in;
    reg.r_out_ = r_out;
    return reg;
}

EnergyRegion EnergyRegion::rect(Rect r) {
    EnergyRegion reg;
    reg.kind_ = Kind::Rect;
    reg.rect_ = r;
    return reg;
}

double EnergyRegion::cell_fraction(const Domain& d, std::size_t i, std::size_t j) const {
    const Rect cell = d.cell_rect(i, j);
    const double area = cell.area();
    switch (kind_) {
        case Kind::All: return 1.0;
        case Kind::Disk: return circle_rect_area(center_, r_out_, cell) / area;
        case Kind::Annulus:
            return (circle_rect_area(center_, r_out_, cell) -
                    circle_rect_area(center_, r_in_, cell)) / area;
        case Kind::Rect: return rect_.overlap_area(cell) / area;
    }
    return 0.0;
}

std::string EnergyReport::csv_row(double epsilon) const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g,%.17g,%d", epsilon,
                  regime_name(regime), dirichlet, second_term, total, scaled_total,
                  admissible ? 1 : 0);
    return buf;
}

EnergyReport with_scaling(EnergyReport r, Regime regime, double divisor) {
    if (!(divisor > 0.0)) throw std::invalid_argument("with_scaling: divisor must be positive");
    r.regime = regime;
    r.scaling_divisor = divisor;
    r.scaled_total = r.total / divisor;
    return r;
}

RawVectorField as_raw_field(const S1GridField& u) {
    RawVectorField raw(u.domain());
    const Domain& d = u.domain();
    for (std::size_t j = 0; j <= d.ny(); ++j) {
        for (std::size_t i = 0; i <= d.nx(); ++i) raw.at(i, j) = u.unit(i, j);
    }
    return raw;
}

EnergyReport gl_energy(const RawVectorField& u_raw, double eps, const EnergyRegion& region) {
    if (!(eps > 0.0)) throw std::invalid_argument("gl_energy: eps must be positive");
    const Domain& d = u_raw.domain();
    const double h = d.h();
    double dirichlet = 0.0, potential = 0.0;
    for (std::size_t j = 0; j < d.ny(); ++j) {
        for (std::size_t i = 0; i < d.nx(); ++i) {
            const double frac = region.cell_fraction(d, i, j);
            if (frac <= 0.0) continue;
            const Vec2 u00 = u_raw(i, j), u10 = u_raw(i + 1, j);
            const Vec2 u01 = u_raw(i, j + 1), u11 = u_raw(i + 1, j + 1);
            const Vec2 dx = (u10 - u00 + u11 - u01) / (2.0 * h);
            const Vec2 dy = (u01 - u00 + u11 - u10) / (2.0 * h);
            dirichlet += 0.5 * frac * (dx.norm2() + dy.norm2()) * h * h;
            double pot = 0.0;
            for (const Vec2& v : {u00, u10, u01, u11}) {
                const double w = 1.0 - v.norm2();
                pot += w * w;
            }
            potential += frac * 0.25 * pot * h * h;
        }
    }
    EnergyReport r;
    r.dirichlet = dirichlet;
    r.second_term = potential / (eps * eps);
    r.total = r.dirichlet + r.second_term;
    r.scaled_total = r.total;
    return r;
}

EnergyReport cr_energy(const S1GridField& u, const AtomicMeasure& mu, const BallFamily& cores,
                       double eps, const EnergyRegion& region) {
    if (!(eps > 0.0)) throw std::invalid_argument("cr_energy: eps must be positive");
    const Domain& d = u.domain();
    for (std::size_t n = 0; n < cores.balls().size(); ++n) {
        const WeightedBall& b = cores.balls()[n];
        if (std::abs(b.radius - eps) > 1e-9 * std::max(1.0, eps)) {
            throw std::invalid_argument("cr_energy: core ball radius differs from eps");
        }
        double inside = 0.0;
        for (const Atom& a : mu.atoms()) {
            if (dist(a.position, b.center) < b.radius) inside += a.weight;
        }
        const int deg = degree_on_circle(u, {b.center, b.radius, 0});
        if (deg != static_cast<int>(std::llround(inside))) {
            throw std::runtime_error("cr_energy: degree mismatch on ball " + std::to_string(n) +
                                     ": deg=" + std::to_string(deg) +
                                     " mu=" + std::to_string(inside));
        }
    }

    const VectorGridField grad = approximate_gradient(u);
    const double h = d.h();
    const double c = 2.0 * M_PI;
    double dirichlet = 0.0;
    for (std::size_t j = 0; j < d.ny(); ++j) {
        for (std::size_t i = 0; i < d.nx(); ++i) {
            double frac = region.cell_fraction(d, i, j);
            if (frac <= 0.0) continue;
            const Rect cell = d.cell_rect(i, j);
            for (const WeightedBall& b : cores.balls()) {
                frac -= circle_rect_area(b.center, b.radius, cell) / cell.area();
            }
            if (frac <= 0.0) continue;
            dirichlet += 0.5 * frac * c * c * grad(i, j).norm2() * h * h;
        }
    }
    EnergyReport r;
    r.dirichlet = dirichlet;
    r.second_term = total_variation(mu);
    r.total = r.dirichlet + r.second_term;
    r.scaled_total = r.total;
    return r;
}

EnergyReport ms_energy(const S1GridField& u, double eps, const EnergyRegion& region) {
    if (!(eps > 0.0)) throw std::invalid_argument("ms_energy: eps must be positive");
    const Domain& d = u.domain();
    const VectorGridField grad = approximate_gradient(u);
    const double h = d.h();
    const double c = 2.0 * M_PI;
    double dirichlet = 0.0;
    for (std::size_t j = 0; j < d.ny(); ++j) {
        for (std::size_t i = 0; i < d.nx(); ++i) {
            const double frac = region.cell_fraction(d, i, j);
            if (frac <= 0.0) continue;
            dirichlet += 0.5 * frac * c * c * grad(i, j).norm2() * h * h;
        }
    }
    EnergyReport r;
    r.dirichlet = dirichlet;
    r.second_term = u.fractional_jump_length() / eps;
    r.total = r.dirichlet + r.second_term;
    r.scaled_total = r.total;
    r.admissible = u.jumps_admissible();
    r.note = "closed-jump functional coincides with the jump-set functional at grid scale";
    return r;
}

namespace {

double measure_pairing(const LimitMeasure& mu, const ScalarGridField& phi) {
    const Domain& d = phi.domain();
    if (std::holds_alternative<AtomicMeasure>(mu)) {
        double acc = 0.0;
        for (const Atom& a : std::get<AtomicMeasure>(mu).atoms()) {
            const double fx = (a.position.x - d.lower().x) / d.h();
            const double fy = (a.position.y - d.lower().y) / d.h();
            const auto i = static_cast<std::size_t>(std::clamp(
                std::floor(fx), 0.0, static_cast<double>(d.nx()) - 1.0));
            const auto j = static_cast<std::size_t>(std::clamp(
                std::floor(fy), 0.0, static_cast<double>(d.ny()) - 1.0));
            const double sx = fx - static_cast<double>(i), sy = fy - static_cast<double>(j);
            acc += a.weight * ((1 - sx) * (1 - sy) * phi(i, j) + sx * (1 - sy) * phi(i + 1, j) +
                               (1 - sx) * sy * phi(i, j + 1) + sx * sy * phi(i + 1, j + 1));
        }
        return acc;
    }
    const auto& pw = std::get<PiecewiseDensity>(mu);
    double acc = 0.0;
    for (std::size_t j = 0; j < d.ny(); ++j) {
        for (std::size_t i = 0; i < d.nx(); ++i) {
            const double rho = pw.integral(d.cell_rect(i, j));
            if (rho == 0.0) continue;
            const double center_phi = 0.25 * (phi(i, j) + phi(i + 1, j) + phi(i, j + 1) +
                                              phi(i + 1, j + 1));
            acc += rho * center_phi;
        }
    }
    return acc;
}

double measure_total_variation(const LimitMeasure& mu) {
    if (std::holds_alternative<AtomicMeasure>(mu)) {
        return total_variation(std::get<AtomicMeasure>(mu));
    }
    return std::get<PiecewiseDensity>(mu).total_variation();
}

}  // namespace

double divergence_compatibility_residual(const LimitMeasure& mu, const VectorGridField& td) {
    const Domain& d = td.domain();
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double h = d.h();
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double kx = 1.0 + 2.0 * unif(rng);
        const double ky = 1.0 + 2.0 * unif(rng);
        const double phase = 2.0 * M_PI * unif(rng);
        ScalarGridField phi(d);
        for (std::size_t j = 0; j <= d.ny(); ++j) {
            for (std::size_t i = 0; i <= d.nx(); ++i) {
                const Vec2 p = d.node(i, j);
                const double tx = (p.x - d.lower().x) / d.bounds().width();
                const double ty = (p.y - d.lower().y) / d.bounds().height();
                const double bump = std::sin(M_PI * tx) * std::sin(M_PI * tx) *
                                    std::sin(M_PI * ty) * std::sin(M_PI * ty);
                phi.at(i, j) = bump * std::cos(kx * M_PI * tx + ky * M_PI * ty + phase);
            }
        }
        // <T^D, grad phi> should equal pi <mu, phi>.
        double lhs = 0.0;
        for (std::size_t j = 0; j < d.ny(); ++j) {
            for (std::size_t i = 0; i < d.nx(); ++i) {
                const Vec2 g{(phi(i + 1, j) - phi(i, j) + phi(i + 1, j + 1) - phi(i, j + 1)) /
                                 (2.0 * h),
                             (phi(i, j + 1) - phi(i, j) + phi(i + 1, j + 1) - phi(i + 1, j)) /
                                 (2.0 * h)};
                lhs += g.dot(td(i, j)) * h * h;
            }
        }
        const double rhs = M_PI * measure_pairing(mu, phi);
        const double scale = std::max({std::abs(lhs), std::abs(rhs),
                                       M_PI * measure_total_variation(mu) * 0.1, 1e-12});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

double gamma_limit_energy(Regime regime, const LimitMeasure& mu, const VectorGridField& td) {
    const double field_term = 2.0 * td.l2_norm_sq();
    switch (regime) {
        case Regime::Subcritical: return M_PI * measure_total_variation(mu);
        case Regime::Critical: {
            const double resid = divergence_compatibility_residual(mu, td);
            if (resid > 0.02) {
                throw std::runtime_error(
                    "gamma_limit_energy: -Div T^D = pi mu fails, worst residual " +
                    std::to_string(resid));
            }
            return M_PI * measure_total_variation(mu) + field_term;
        }
        case Regime::Supercritical: return field_term;
    }
    throw std::logic_error("gamma_limit_energy: unknown regime");
}

}  // namespace vortexlab
