#include "vortexlab/poisson.hpp"

#include <cmath>
#include <stdexcept>

namespace vortexlab {

PoissonResult solve_dirichlet(const ScalarGridField& f, double rel_tol) {
    const Domain& d = f.domain();
    const std::size_t nx = d.nx(), ny = d.ny();
    if (nx < 2 || ny < 2) throw std::invalid_argument("solve_dirichlet: grid too small");
    const std::size_t mi = nx - 1, mj = ny - 1;  // interior nodes
    const double inv_h2 = 1.0 / (d.h() * d.h());
    auto idx = [mi](std::size_t i, std::size_t j) { return j * mi + i; };

    std::vector<double> b(mi * mj);
    for (std::size_t j = 0; j < mj; ++j) {
        for (std::size_t i = 0; i < mi; ++i) b[idx(i, j)] = f(i + 1, j + 1);
    }
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (std::size_t j = 0; j < mj; ++j) {
            for (std::size_t i = 0; i < mi; ++i) {
                double acc = 4.0 * x[idx(i, j)];
                if (i > 0) acc -= x[idx(i - 1, j)];
                if (i + 1 < mi) acc -= x[idx(i + 1, j)];
                if (j > 0) acc -= x[idx(i, j - 1)];
                if (j + 1 < mj) acc -= x[idx(i, j + 1)];
                out[idx(i, j)] = acc * inv_h2;
            }
        }
    };

    std::vector<double> x(mi * mj, 0.0), r = b, p = b, ap(mi * mj);
    auto dot = [](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * c[k];
        return s;
    };
    const double b_norm = std::sqrt(dot(b, b));
    PoissonResult result{ScalarGridField(d), 0, 0.0};
    if (b_norm == 0.0) return result;

    double rr = dot(r, r);
    const long long max_iter = 20LL * static_cast<long long>(mi * mj);
    long long it = 0;
    while (std::sqrt(rr) > rel_tol * b_norm) {
        if (++it > max_iter) {
            throw std::runtime_error("solve_dirichlet: CG did not converge, residual " +
                                     std::to_string(std::sqrt(rr) / b_norm));
        }
        apply(p, ap);
        const double alpha = rr / dot(p, ap);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += alpha * p[k];
        for (std::size_t k = 0; k < r.size(); ++k) r[k] -= alpha * ap[k];
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
    }
    result.iterations = static_cast<int>(it);
    result.relative_residual = std::sqrt(rr) / b_norm;
    for (std::size_t j = 0; j < mj; ++j) {
        for (std::size_t i = 0; i < mi; ++i) result.solution.at(i + 1, j + 1) = x[idx(i, j)];
    }
    return result;
}

VectorGridField nodal_gradient(const ScalarGridField& v) {
    const Domain& d = v.domain();
    VectorGridField g(d);
    const double inv2h = 1.0 / (2.0 * d.h());
    for (std::size_t j = 0; j < d.ny(); ++j) {
        for (std::size_t i = 0; i < d.nx(); ++i) {
            g.at(i, j) = {(v(i + 1, j) - v(i, j) + v(i + 1, j + 1) - v(i, j + 1)) * inv2h,
                          (v(i, j + 1) - v(i, j) + v(i + 1, j + 1) - v(i + 1, j)) * inv2h};
        }
    }
    return g;
}

double h_minus1_norm(const ScalarGridField& f) {
    const PoissonResult r = solve_dirichlet(f);
    return std::sqrt(nodal_gradient(r.solution).l2_norm_sq());
}

ScalarGridField dirac_loads(const AtomicMeasure& mu, const Domain& domain) {
    ScalarGridField f(domain);
    const double inv_h2 = 1.0 / (domain.h() * domain.h());
    for (const Atom& a : mu.atoms()) {
        const double fi = (a.position.x - domain.lower().x) / domain.h();
        const double fj = (a.position.y - domain.lower().y) / domain.h();
        const auto i = static_cast<std::size_t>(
            std::clamp(std::round(fi), 1.0, static_cast<double>(domain.nx()) - 1.0));
        const auto j = static_cast<std::size_t>(
            std::clamp(std::round(fj), 1.0, static_cast<double>(domain.ny()) - 1.0));
        f.at(i, j) += a.weight * inv_h2;
    }
    return f;
}

}  // namespace vortexlab
