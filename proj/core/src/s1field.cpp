#include "vortexlab/s1field.hpp"

#include <cmath>
#include <stdexcept>

namespace vortexlab {

namespace {

double tau(double phi) { return 2.0 * M_PI * phi; }

}  // namespace

S1GridField::S1GridField(ScalarGridField lifting) : lifting_(std::move(lifting)) {
    const Domain& d = lifting_.domain();
    unit_.resize(d.node_count());
    for (std::size_t j = 0; j <= d.ny(); ++j) {
        for (std::size_t i = 0; i <= d.nx(); ++i) {
            const double a = tau(lifting_(i, j));
            unit_[d.node_index(i, j)] = {std::cos(a), std::sin(a)};
        }
    }
    hdiff_.assign(d.nx() * (d.ny() + 1), 0.0);
    vdiff_.assign((d.nx() + 1) * d.ny(), 0.0);
}

S1GridField S1GridField::from_lifting(ScalarGridField lifting) {
    S1GridField f(std::move(lifting));
    const Domain& d = f.domain();
    const std::size_t nx = d.nx(), ny = d.ny();

    // Raw differences and integer parts per edge.
    std::vector<long long> hk(nx * (ny + 1)), vk((nx + 1) * ny);
    std::vector<double> hraw(nx * (ny + 1)), vraw((nx + 1) * ny);
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const double raw = f.lifting_(i + 1, j) - f.lifting_(i, j);
            hraw[j * nx + i] = raw;
            hk[j * nx + i] = nearest_int(raw);
        }
    }
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            const double raw = f.lifting_(i, j + 1) - f.lifting_(i, j);
            vraw[j * (nx + 1) + i] = raw;
            vk[j * (nx + 1) + i] = nearest_int(raw);
        }
    }

    // Plaquette winding from the integer parts (exact).
    std::vector<int> winding(nx * ny, 0);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const long long circ = hk[j * nx + i] + vk[j * (nx + 1) + i + 1] -
                                   hk[(j + 1) * nx + i] - vk[j * (nx + 1) + i];
            winding[j * nx + i] = static_cast<int>(-circ);
        }
    }
    auto near_singular_h = [&](std::size_t i, std::size_t j) {
        if (j > 0 && winding[(j - 1) * nx + i] != 0) return true;
        if (j < ny && winding[j * nx + i] != 0) return true;
        return false;
    };
    auto near_singular_v = [&](std::size_t i, std::size_t j) {
        if (i > 0 && winding[j * nx + i - 1] != 0) return true;
        if (i < nx && winding[j * nx + i] != 0) return true;
        return false;
    };

    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t e = j * nx + i;
            const long long k = hk[e];
            const double g = hraw[e] - static_cast<double>(k);
            if (k == 0) {
                f.hdiff_[e] = hraw[e];
                continue;
            }
            const bool integer = std::abs(g) <= kIntegerResidual || near_singular_h(i, j);
            f.hdiff_[e] = integer ? g : 0.0;
            f.jumps_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                true, integer,
                                integer ? static_cast<double>(k) : hraw[e]});
        }
    }
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            const std::size_t e = j * (nx + 1) + i;
            const long long k = vk[e];
            const double g = vraw[e] - static_cast<double>(k);
            if (k == 0) {
                f.vdiff_[e] = vraw[e];
                continue;
            }
            const bool integer = std::abs(g) <= kIntegerResidual || near_singular_v(i, j);
            f.vdiff_[e] = integer ? g : 0.0;
            f.jumps_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                false, integer,
                                integer ? static_cast<double>(k) : vraw[e]});
        }
    }
    return f;
}

S1GridField S1GridField::with_explicit_jumps(ScalarGridField lifting,
                                             std::vector<JumpEdge> jumps) {
    S1GridField f(std::move(lifting));
    const Domain& d = f.domain();
    const std::size_t nx = d.nx(), ny = d.ny();
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            f.hdiff_[j * nx + i] = f.lifting_(i + 1, j) - f.lifting_(i, j);
        }
    }
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            f.vdiff_[j * (nx + 1) + i] = f.lifting_(i, j + 1) - f.lifting_(i, j);
        }
    }
    for (const JumpEdge& e : jumps) {
        if ((e.horizontal && (e.i >= nx || e.j > ny)) ||
            (!e.horizontal && (e.i > nx || e.j >= ny))) {
            throw std::invalid_argument("with_explicit_jumps: edge outside grid");
        }
        double& slot = e.horizontal ? f.hdiff_[e.j * nx + e.i]
                                    : f.vdiff_[e.j * (nx + 1) + e.i];
        slot = e.integer_jump ? slot - e.amplitude : 0.0;
    }
    f.jumps_ = std::move(jumps);
    return f;
}

int S1GridField::cell_winding(std::size_t i, std::size_t j) const {
    const long long kb = nearest_int(lifting_(i + 1, j) - lifting_(i, j));
    const long long kr = nearest_int(lifting_(i + 1, j + 1) - lifting_(i + 1, j));
    const long long kt = nearest_int(lifting_(i + 1, j + 1) - lifting_(i, j + 1));
    const long long kl = nearest_int(lifting_(i, j + 1) - lifting_(i, j));
    return static_cast<int>(-(kb + kr - kt - kl));
}

double S1GridField::cell_mean_lifting(std::size_t i, std::size_t j) const {
    const double p00 = lifting_(i, j);
    const double p10 = p00 + hedge_diff(i, j);
    const double p01 = p00 + vedge_diff(i, j);
    const double p11 = p10 + vedge_diff(i + 1, j);
    return 0.25 * (p00 + p10 + p01 + p11);
}

double S1GridField::fractional_jump_length() const {
    std::size_t n = 0;
    for (const JumpEdge& e : jumps_) n += e.integer_jump ? 0 : 1;
    return static_cast<double>(n) * domain().h();
}

double S1GridField::total_jump_length() const {
    return static_cast<double>(jumps_.size()) * domain().h();
}

bool S1GridField::jumps_admissible() const {
    const Domain& d = domain();
    const Rect inner = d.inner_bounds();
    for (const JumpEdge& e : jumps_) {
        if (e.integer_jump) continue;
        const Vec2 a = d.node(e.i, e.j);
        const Vec2 mid = e.horizontal ? Vec2{a.x + d.h() / 2.0, a.y}
                                      : Vec2{a.x, a.y + d.h() / 2.0};
        if (!inner.contains_closed(mid)) return false;
    }
    return true;
}

double canonical_vortex_phase(const Vec2& center, int z, const Vec2& p) {
    return static_cast<double>(z) / (2.0 * M_PI) * branch_angle(p - center);
}

Vec2 snap_to_cell_center(const Domain& domain, const Vec2& p) {
    const double h = domain.h();
    auto snap1 = [h](double lo, double v, std::size_t n) {
        double k = std::floor((v - lo) / h);
        k = std::clamp(k, 0.0, static_cast<double>(n) - 1.0);
        return lo + (k + 0.5) * h;
    };
    return {snap1(domain.lower().x, p.x, domain.nx()), snap1(domain.lower().y, p.y, domain.ny())};
}

ScalarGridField canonical_vortex_lifting(const Domain& domain, const Vec2& center, int z) {
    if (z == 0) throw std::invalid_argument("canonical_vortex_lifting: z must be nonzero");
    if (!domain.contains(center)) {
        throw std::domain_error("canonical_vortex_lifting: center not strictly inside the domain");
    }
    const Vec2 c = snap_to_cell_center(domain, center);
    ScalarGridField phi(domain);
    for (std::size_t j = 0; j <= domain.ny(); ++j) {
        for (std::size_t i = 0; i <= domain.nx(); ++i) {
            phi.at(i, j) = canonical_vortex_phase(c, z, domain.node(i, j));
        }
    }
    return phi;
}

VectorGridField approximate_gradient(const S1GridField& field) {
    const Domain& d = field.domain();
    VectorGridField grad(d);
    const double inv2h = 1.0 / (2.0 * d.h());
    for (std::size_t j = 0; j < d.ny(); ++j) {
        for (std::size_t i = 0; i < d.nx(); ++i) {
            const double gx = field.hedge_diff(i, j) + field.hedge_diff(i, j + 1);
            const double gy = field.vedge_diff(i, j) + field.vedge_diff(i + 1, j);
            grad.at(i, j) = {gx * inv2h, gy * inv2h};
        }
    }
    return grad;
}

}  // namespace vortexlab
