#include "vortexlab/currents.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace vortexlab {

namespace {

// Cell-level derivatives of u from the corrected lifting gradient
// (chain rule), so the algebraic identities between lambda, j and T^D hold
// exactly.
struct CellDerivatives {
    Vec2 u;    // unit value at the cell center
    Vec2 du1;  // d/dx1 of (u1, u2)
    Vec2 du2;  // d/dx2 of (u1, u2)
};

CellDerivatives cell_derivatives(const S1GridField& f, std::size_t i, std::size_t j,
                                 const VectorGridField& grad) {
    const double phi = f.cell_mean_lifting(i, j);
    const double a = 2.0 * M_PI * phi;
    const Vec2 u{std::cos(a), std::sin(a)};
    const Vec2 g = grad(i, j);
    const double c = 2.0 * M_PI;
    return {u, {-c * u.y * g.x, c * u.x * g.x}, {-c * u.y * g.y, c * u.x * g.y}};
}

}  // namespace

VectorGridField prejacobian_lambda(const S1GridField& u) {
    const Domain& d = u.domain();
    const VectorGridField grad = approximate_gradient(u);
    VectorGridField lambda(d);
    for (std::size_t j = 0; j < d.ny(); ++j) {
        for (std::size_t i = 0; i < d.nx(); ++i) {
            const CellDerivatives cd = cell_derivatives(u, i, j, grad);
            lambda.at(i, j) = {0.5 * (-cd.u.x * cd.du2.y + cd.u.y * cd.du2.x),
                               0.5 * (cd.u.x * cd.du1.y - cd.u.y * cd.du1.x)};
        }
    }
    return lambda;
}

VectorGridField current_j(const S1GridField& u) {
    const Domain& d = u.domain();
    const VectorGridField grad = approximate_gradient(u);
    VectorGridField jj(d);
    for (std::size_t j = 0; j < d.ny(); ++j) {
        for (std::size_t i = 0; i < d.nx(); ++i) {
            const CellDerivatives cd = cell_derivatives(u, i, j, grad);
            jj.at(i, j) = {0.5 * (cd.u.x * cd.du1.y - cd.u.y * cd.du1.x),
                           0.5 * (cd.u.x * cd.du2.y - cd.u.y * cd.du2.x)};
        }
    }
    return jj;
}

CurrentDecomposition t_current(const S1GridField& u) {
    const Domain& d = u.domain();
    const VectorGridField grad = approximate_gradient(u);
    VectorGridField diffuse(d);
    for (std::size_t j = 0; j < d.ny(); ++j) {
        for (std::size_t i = 0; i < d.nx(); ++i) {
            diffuse.at(i, j) = M_PI * perp(grad(i, j));
        }
    }
    CurrentDecomposition out{std::move(diffuse), {}, {}};
    for (const JumpEdge& e : u.jump_edges()) {
        if (e.integer_jump) continue;
        // w- is the value at the first node, w+ at the second, so
        // w- - w+ = -amplitude.
        out.singular_edges.push_back(e);
        out.singular_density.push_back(0.5 * std::sin(-2.0 * M_PI * e.amplitude));
    }
    return out;
}

int degree_on_circle(const S1GridField& u, const Circle& c) {
    const Domain& d = u.domain();
    if (!(c.radius > 0.0)) throw std::invalid_argument("degree_on_circle: radius must be > 0");
    if (d.boundary_distance(c.center) < c.radius) {
        throw std::domain_error("degree_on_circle: circle exits the domain");
    }
    int samples = c.samples;
    if (samples <= 0) {
        samples = std::max<int>(64, static_cast<int>(std::ceil(8.0 * 2.0 * M_PI * c.radius / d.h())));
    }
    if (samples < 8) throw std::invalid_argument("degree_on_circle: need at least 8 samples");

    auto interpolate_unit = [&](const Vec2& p) {
        const double fx = (p.x - d.lower().x) / d.h();
        const double fy = (p.y - d.lower().y) / d.h();
        std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(fx), 0.0,
                                                            static_cast<double>(d.nx()) - 1.0));
        std::size_t j = static_cast<std::size_t>(std::clamp(std::floor(fy), 0.0,
                                                            static_cast<double>(d.ny()) - 1.0));
        const double sx = fx - static_cast<double>(i);
        const double sy = fy - static_cast<double>(j);
        const Vec2 v = u.unit(i, j) * ((1 - sx) * (1 - sy)) + u.unit(i + 1, j) * (sx * (1 - sy)) +
                       u.unit(i, j + 1) * ((1 - sx) * sy) + u.unit(i + 1, j + 1) * (sx * sy);
        const double n = v.norm();
        if (n < 1e-12) return Vec2{1.0, 0.0};
        return v / n;
    };

    double total = 0.0;
    Vec2 prev = interpolate_unit({c.center.x + c.radius, c.center.y});
    for (int s = 1; s <= samples; ++s) {
        const double a = 2.0 * M_PI * static_cast<double>(s) / static_cast<double>(samples);
        const Vec2 p{c.center.x + c.radius * std::cos(a), c.center.y + c.radius * std::sin(a)};
        const Vec2 cur = interpolate_unit(p);
        total += wrapped_angle_increment(prev, cur);
        prev = cur;
    }
    const double winding = total / (2.0 * M_PI);
    const long long k = nearest_int(winding);
    if (std::abs(winding - static_cast<double>(k)) >= 0.05) {
        throw std::runtime_error("degree_on_circle: undersampled circle, residual " +
                                 std::to_string(std::abs(winding - static_cast<double>(k))));
    }
    return static_cast<int>(k);
}

double jacobian_pairing(const S1GridField& u, const ScalarGridField& test) {
    const Domain& d = u.domain();
    if (!test.domain().same_grid(d)) {
        throw std::invalid_argument("jacobian_pairing: test lives on a different grid");
    }
    // Compact support: zero on a band of width >= 2h inside the boundary.
    const std::size_t nx = d.nx(), ny = d.ny();
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            const bool band = i <= 1 || j <= 1 || i + 1 >= nx || j + 1 >= ny;
            if (band && test(i, j) != 0.0) {
                throw std::invalid_argument("jacobian_pairing: test not compactly supported");
            }
        }
    }

    const CurrentDecomposition t = t_current(u);
    const double h = d.h();
    double acc = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const double gx = (test(i + 1, j) - test(i, j) + test(i + 1, j + 1) - test(i, j + 1)) /
                              (2.0 * h);
            const double gy = (test(i, j + 1) - test(i, j) + test(i + 1, j + 1) - test(i + 1, j)) /
                              (2.0 * h);
            acc += Vec2{gx, gy}.dot(t.diffuse(i, j)) * h * h;
        }
    }
    // Singular part: density * (grad(test) . tau) * h per fractional edge,
    // tau = perp(edge direction).
    for (std::size_t n = 0; n < t.singular_edges.size(); ++n) {
        const JumpEdge& e = t.singular_edges[n];
        double dtau;
        if (e.horizontal) {
            if (e.j < 1 || e.j + 1 > ny) continue;  // test vanishes in the band
            // tau = perp((1,0)) = (0, 1): tangential derivative of test along +y.
            dtau = (test(e.i, e.j + 1) + test(e.i + 1, e.j + 1) - test(e.i, e.j - 1) -
                    test(e.i + 1, e.j - 1)) /
                   (4.0 * h);
        } else {
            if (e.i < 1 || e.i + 1 > nx) continue;
            // tau = perp((0,1)) = (-1, 0)
            dtau = -(test(e.i + 1, e.j) + test(e.i + 1, e.j + 1) - test(e.i - 1, e.j) -
                     test(e.i - 1, e.j + 1)) /
                   (4.0 * h);
        }
        acc += t.singular_density[n] * dtau * h;
    }
    return acc;
}

double current_mass_distance(const S1GridField& u, const S1GridField& v) {
    const Domain& d = u.domain();
    if (!v.domain().same_grid(d)) {
        throw std::invalid_argument("current_mass_distance: mismatched domains");
    }
    const CurrentDecomposition tu = t_current(u);
    const CurrentDecomposition tv = t_current(v);
    const double h = d.h();
    double acc = 0.0;
    for (std::size_t n = 0; n < tu.diffuse.values().size(); ++n) {
        acc += (tu.diffuse.values()[n] - tv.diffuse.values()[n]).norm() * h * h;
    }
    using Key = std::tuple<std::uint32_t, std::uint32_t, bool>;
    std::map<Key, double> dens;
    for (std::size_t n = 0; n < tu.singular_edges.size(); ++n) {
        const JumpEdge& e = tu.singular_edges[n];
        dens[{e.i, e.j, e.horizontal}] += tu.singular_density[n];
    }
    for (std::size_t n = 0; n < tv.singular_edges.size(); ++n) {
        const JumpEdge& e = tv.singular_edges[n];
        dens[{e.i, e.j, e.horizontal}] -= tv.singular_density[n];
    }
    for (const auto& [key, val] : dens) acc += std::abs(val) * h;
    return acc;
}

}  // namespace vortexlab
