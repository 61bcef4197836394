#include "vortexlab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <stdexcept>

namespace vortexlab {

namespace {

constexpr double kRecoveryJumpTol = 1e-3;  // residual splitting integer vs fractional

struct Core {
    Vec2 center;
    int sign{1};
    double r{0.0};  // r^l of its piece
};

// --- exact line integrals ----------------------------------------------------

// t-values in (0,1) where |p0 + t d - c| = radius.
void circle_breakpoints(const Vec2& p0, const Vec2& d, const Vec2& c, double radius,
                        std::vector<double>& ts) {
    const Vec2 w = p0 - c;
    const double a = d.norm2();
    if (a == 0.0) return;
    const double b = 2.0 * w.dot(d);
    const double cc = w.norm2() - radius * radius;
    const double disc = b * b - 4.0 * a * cc;
    if (disc <= 0.0) return;
    const double s = std::sqrt(disc);
    for (double t : {(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)}) {
        if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
}

// Exact integral of sign * (Khat chi_{A(eps,r)} - Ktilde chi_{B_r}) . dl along
// the segment [p0, p1].
double kernel_line_integral(const Core& core, double eps, const Vec2& p0, const Vec2& p1) {
    const Vec2 d = p1 - p0;
    std::vector<double> ts{0.0, 1.0};
    circle_breakpoints(p0, d, core.center, eps, ts);
    circle_breakpoints(p0, d, core.center, core.r, ts);
    std::sort(ts.begin(), ts.end());
    double acc = 0.0;
    const double cross0 = (p0 - core.center).cross(d);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double ta = ts[k], tb = ts[k + 1];
        if (tb - ta < 1e-15) continue;
        const Vec2 pm = p0 + d * (0.5 * (ta + tb));
        const double rho = dist(pm, core.center);
        if (rho < core.r) {
            // -Ktilde: Ktilde . d = cross(x - c, d)/(2 pi r^2), constant in t.
            acc -= (tb - ta) * cross0 / (2.0 * M_PI * core.r * core.r);
        }
        if (rho > eps && rho < core.r) {
            const Vec2 va = p0 + d * ta - core.center;
            const Vec2 vb = p0 + d * tb - core.center;
            acc += wrapped_angle_increment(va, vb) / (2.0 * M_PI);
        }
    }
    return core.sign * acc;
}

Vec2 khat_value(const Core& core, double eps, const Vec2& p) {
    const Vec2 w = p - core.center;
    const double rho = w.norm();
    if (rho <= eps || rho >= core.r) return {0.0, 0.0};
    return perp(w) * (static_cast<double>(core.sign) / (2.0 * M_PI * rho * rho));
}

Vec2 ktilde_value(const Core& core, const Vec2& p) {
    const Vec2 w = p - core.center;
    if (w.norm() >= core.r) return {0.0, 0.0};
    return perp(w) * (static_cast<double>(core.sign) / (2.0 * M_PI * core.r * core.r));
}

// --- spatial binning ----------------------------------------------------------

struct CoreIndex {
    std::vector<Core> cores;
    double bin{1.0};
    Vec2 origin;
    int bx{0}, by{0};
    std::vector<std::vector<int>> bins;

    CoreIndex(std::vector<Core> cs, const Rect& bounds) : cores(std::move(cs)) {
        double rmax = 0.0;
        for (const Core& c : cores) rmax = std::max(rmax, c.r);
        bin = std::max({rmax * 1.25, 1e-3 * std::max(bounds.width(), bounds.height()), 1e-12});
        origin = bounds.lo;
        bx = static_cast<int>(std::ceil(bounds.width() / bin)) + 1;
        by = static_cast<int>(std::ceil(bounds.height() / bin)) + 1;
        bins.resize(static_cast<std::size_t>(bx) * by);
        for (std::size_t k = 0; k < cores.size(); ++k) {
            const auto [ix, iy] = locate(cores[k].center);
            bins[static_cast<std::size_t>(iy) * bx + ix].push_back(static_cast<int>(k));
        }
    }
    std::pair<int, int> locate(const Vec2& p) const {
        const int ix = std::clamp(static_cast<int>((p.x - origin.x) / bin), 0, bx - 1);
        const int iy = std::clamp(static_cast<int>((p.y - origin.y) / bin), 0, by - 1);
        return {ix, iy};
    }
    template <class F>
    void near(const Vec2& p, double reach, F&& fn) const {
        const int span = static_cast<int>(std::ceil((reach + bin) / bin));
        const auto [ix, iy] = locate(p);
        for (int dy = -span; dy <= span; ++dy) {
            for (int dx = -span; dx <= span; ++dx) {
                const int jx = ix + dx, jy = iy + dy;
                if (jx < 0 || jy < 0 || jx >= bx || jy >= by) continue;
                for (int k : bins[static_cast<std::size_t>(jy) * bx + jx]) fn(cores[k]);
            }
        }
    }
};

double segment_point_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 d = b - a;
    const double t = std::clamp((p - a).dot(d) / std::max(d.norm2(), 1e-300), 0.0, 1.0);
    return dist(a + d * t, p);
}

// --- cut geometry ---------------------------------------------------------------

struct CutColumns {
    std::vector<double> x;
    std::vector<double> y_top;

    void build(const std::vector<Core>& cores) {
        std::vector<std::pair<double, double>> cols;
        cols.reserve(cores.size());
        for (const Core& c : cores) cols.emplace_back(c.center.x, c.center.y);
        std::sort(cols.begin(), cols.end());
        for (const auto& [cx, cy] : cols) {
            if (!x.empty() && std::abs(cx - x.back()) < 1e-12) {
                y_top.back() = std::max(y_top.back(), cy);
            } else {
                x.push_back(cx);
                y_top.push_back(cy);
            }
        }
    }
    bool crosses(double x1, double x2, double y, double eta) const {
        auto lo = std::lower_bound(x.begin(), x.end(), x1 - eta);
        for (auto it = lo; it != x.end() && *it + eta < x2; ++it) {
            const auto k = static_cast<std::size_t>(it - x.begin());
            if (*it + eta > x1 && y < y_top[k]) return true;
        }
        return false;
    }
};

// --- phase construction -----------------------------------------------------------

struct PhaseBuild {
    Domain theta_dom;
    const CoreIndex* cores{nullptr};
    CutColumns cuts;
    BackgroundField bg;
    double n_scale{1.0};
    const ScalarGridField* v_exact{nullptr};  // theta nodes = v-grid cell centers
    const VectorGridField* v_grad{nullptr};   // interpolated mode (patches)
    double eps{0.0};
    double eta{0.0};

    std::vector<double> hinc, vinc;
    ScalarGridField theta_bar;
    ScalarGridField theta;
    std::vector<char> reached;
    std::vector<JumpEdge> jumps;
    double frac_jump_length{0.0};
    double two_tree{0.0};
    double max_plaquette{0.0};

    explicit PhaseBuild(Domain dom)
        : theta_dom(std::move(dom)), theta_bar(theta_dom), theta(theta_dom) {}

    std::size_t row() const { return theta_dom.nx() + 1; }

    Vec2 grad_v_interp(const Vec2& p) const {
        const VectorGridField& g = *v_grad;
        const Domain& d = g.domain();
        const double fx = (p.x - d.lower().x) / d.h() - 0.5;
        const double fy = (p.y - d.lower().y) / d.h() - 0.5;
        const double cx = std::clamp(fx, 0.0, static_cast<double>(d.nx() - 1));
        const double cy = std::clamp(fy, 0.0, static_cast<double>(d.ny() - 1));
        const auto i = static_cast<std::size_t>(
            std::min(cx, static_cast<double>(d.nx() - 2)));
        const auto j = static_cast<std::size_t>(
            std::min(cy, static_cast<double>(d.ny() - 2)));
        const double sx = std::clamp(cx - static_cast<double>(i), 0.0, 1.0);
        const double sy = std::clamp(cy - static_cast<double>(j), 0.0, 1.0);
        return g(i, j) * ((1 - sx) * (1 - sy)) + g(i + 1, j) * (sx * (1 - sy)) +
               g(i, j + 1) * ((1 - sx) * sy) + g(i + 1, j + 1) * (sx * sy);
    }

    double edge_increment(std::size_t i, std::size_t j, bool horizontal) const {
        const Vec2 p0 = theta_dom.node(i, j);
        const Vec2 p1 = horizontal ? theta_dom.node(i + 1, j) : theta_dom.node(i, j + 1);
        double acc = n_scale * bg.beta_line_integral(p0, p1);
        const Vec2 mid = (p0 + p1) / 2.0;
        cores->near(mid, theta_dom.h(), [&](const Core& c) {
            if (segment_point_distance(p0, p1, c.center) < c.r) {
                acc += kernel_line_integral(c, eps, p0, p1);
            }
        });
        if (v_exact) {
            const ScalarGridField& v = *v_exact;
            if (horizontal) {
                acc += v(i + 1, j + 1) - v(i + 1, j);
            } else {
                acc += v(i, j + 1) - v(i + 1, j + 1);
            }
        } else {
            acc += -perp(grad_v_interp(mid)).dot(p1 - p0);
        }
        return acc;
    }

    bool edge_allowed(std::size_t i, std::size_t j, bool horizontal) const {
        const Vec2 p0 = theta_dom.node(i, j);
        const Vec2 p1 = horizontal ? theta_dom.node(i + 1, j) : theta_dom.node(i, j + 1);
        if (horizontal && cuts.crosses(p0.x, p1.x, p0.y, eta)) return false;
        bool blocked = false;
        cores->near((p0 + p1) / 2.0, theta_dom.h() + eps, [&](const Core& c) {
            if (segment_point_distance(p0, p1, c.center) < eps) blocked = true;
        });
        return !blocked;
    }

    void compute_increments() {
        const std::size_t dnx = theta_dom.nx(), dny = theta_dom.ny();
        hinc.assign(dnx * (dny + 1), 0.0);
        vinc.assign((dnx + 1) * dny, 0.0);
        for (std::size_t j = 0; j <= dny; ++j) {
            for (std::size_t i = 0; i < dnx; ++i) hinc[j * dnx + i] = edge_increment(i, j, true);
        }
        for (std::size_t j = 0; j < dny; ++j) {
            for (std::size_t i = 0; i <= dnx; ++i) {
                vinc[j * (dnx + 1) + i] = edge_increment(i, j, false);
            }
        }
    }

    std::vector<double> integrate_tree(std::size_t root_i, std::size_t root_j, bool reverse,
                                       std::vector<char>& reach) const {
        const std::size_t dnx = theta_dom.nx(), dny = theta_dom.ny();
        std::vector<double> th(row() * (dny + 1), 0.0);
        reach.assign(th.size(), 0);
        auto id = [&](std::size_t i, std::size_t j) { return j * row() + i; };
        std::deque<std::pair<std::size_t, std::size_t>> queue;
        queue.emplace_back(root_i, root_j);
        reach[id(root_i, root_j)] = 1;
        while (!queue.empty()) {
            const auto [i, j] = queue.front();
            queue.pop_front();
            struct Step {
                int di, dj;
            };
            Step steps[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            if (reverse) {
                std::swap(steps[0], steps[2]);
                std::swap(steps[1], steps[3]);
            }
            for (const Step& s : steps) {
                const long long ni = static_cast<long long>(i) + s.di;
                const long long nj = static_cast<long long>(j) + s.dj;
                if (ni < 0 || nj < 0 || ni > static_cast<long long>(dnx) ||
                    nj > static_cast<long long>(dny)) {
                    continue;
                }
                const auto ui = static_cast<std::size_t>(ni);
                const auto uj = static_cast<std::size_t>(nj);
                if (reach[id(ui, uj)]) continue;
                double inc = 0.0;
                bool ok = false;
                if (s.di == 1) {
                    ok = edge_allowed(i, j, true);
                    inc = hinc[j * dnx + i];
                } else if (s.di == -1) {
                    ok = edge_allowed(ui, uj, true);
                    inc = -hinc[uj * dnx + ui];
                } else if (s.dj == 1) {
                    ok = edge_allowed(i, j, false);
                    inc = vinc[j * (dnx + 1) + i];
                } else {
                    ok = edge_allowed(ui, uj, false);
                    inc = -vinc[uj * (dnx + 1) + ui];
                }
                if (!ok) continue;
                th[id(ui, uj)] = th[id(i, j)] + inc;
                reach[id(ui, uj)] = 1;
                queue.emplace_back(ui, uj);
            }
        }
        return th;
    }

    void run() {
        compute_increments();
        const std::size_t dnx = theta_dom.nx(), dny = theta_dom.ny();
        auto id = [&](std::size_t i, std::size_t j) { return j * row() + i; };
        std::vector<char> reach_b;
        const std::vector<double> th_a = integrate_tree(0, 0, false, reached);
        const std::vector<double> th_b = integrate_tree(dnx, dny, true, reach_b);

        for (std::size_t j = 0; j <= dny; ++j) {
            for (std::size_t i = 0; i <= dnx; ++i) {
                if (reached[id(i, j)]) continue;
                const Vec2 p = theta_dom.node(i, j);
                double dmin = 1e300;
                cores->near(p, 4.0 * (eps + theta_dom.h()), [&](const Core& c) {
                    dmin = std::min(dmin, dist(p, c.center));
                });
                if (dmin > eps + 2.5 * theta_dom.h()) {
                    throw std::runtime_error(
                        "assemble_recovery_field: disconnected cut complement");
                }
            }
        }

        bool have_ref = false;
        double ref = 0.0;
        for (std::size_t j = 0; j <= dny; ++j) {
            for (std::size_t i = 0; i <= dnx; ++i) {
                if (!reached[id(i, j)] || !reach_b[id(i, j)]) continue;
                const Vec2 p = theta_dom.node(i, j);
                bool near_core = false;
                cores->near(p, eps + 3.0 * theta_dom.h(), [&](const Core& c) {
                    if (dist(p, c.center) < eps + 2.5 * theta_dom.h()) near_core = true;
                });
                if (near_core) continue;
                const double diff = th_a[id(i, j)] - th_b[id(i, j)];
                if (!have_ref) {
                    ref = diff;
                    have_ref = true;
                }
                two_tree = std::max(two_tree, std::abs(diff - ref));
            }
        }
        for (std::size_t j = 0; j <= dny; ++j) {
            for (std::size_t i = 0; i <= dnx; ++i) theta_bar.at(i, j) = th_a[id(i, j)];
        }

        for (std::size_t j = 0; j < dny; ++j) {
            for (std::size_t i = 0; i < dnx; ++i) {
                const Vec2 p = theta_dom.cell_center(i, j);
                bool near_core = false;
                cores->near(p, eps + 3.0 * theta_dom.h(), [&](const Core& c) {
                    if (dist(p, c.center) < eps + 2.0 * theta_dom.h()) near_core = true;
                });
                if (near_core) continue;
                const double circ = hinc[j * dnx + i] + vinc[j * (dnx + 1) + i + 1] -
                                    hinc[(j + 1) * dnx + i] - vinc[j * (dnx + 1) + i];
                max_plaquette = std::max(max_plaquette, std::abs(circ));
            }
        }
    }

    static double sigma_profile(double rho, double eps) {
        if (rho <= eps) return 0.0;
        if (rho >= 1.5 * eps) return 1.0;
        const double t = (rho - eps) / (0.5 * eps);
        return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    }

    void blend() {
        theta = theta_bar;
        const std::size_t dnx = theta_dom.nx(), dny = theta_dom.ny();
        auto id = [&](std::size_t i, std::size_t j) { return j * row() + i; };
        for (const Core& c : cores->cores) {
            const auto clampi = [&](double f, std::size_t n) {
                return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(n)));
            };
            const double hh = theta_dom.h();
            const std::size_t i0 =
                clampi(std::floor((c.center.x - 2.0 * eps - theta_dom.lower().x) / hh), dnx);
            const std::size_t i1 =
                clampi(std::ceil((c.center.x + 2.0 * eps - theta_dom.lower().x) / hh), dnx);
            const std::size_t j0 =
                clampi(std::floor((c.center.y - 2.0 * eps - theta_dom.lower().y) / hh), dny);
            const std::size_t j1 =
                clampi(std::ceil((c.center.y + 2.0 * eps - theta_dom.lower().y) / hh), dny);
            double sum_p = 0.0, sum_m = 0.0;
            std::size_t n_p = 0, n_m = 0;
            for (std::size_t j = j0; j <= j1; ++j) {
                for (std::size_t i = i0; i <= i1; ++i) {
                    if (!reached[id(i, j)]) continue;
                    const Vec2 p = theta_dom.node(i, j);
                    const double rho = dist(p, c.center);
                    if (rho <= eps || rho >= 2.0 * eps) continue;
                    if (p.x > c.center.x + eta) {
                        sum_p += theta_bar(i, j);
                        ++n_p;
                    } else {
                        sum_m += theta_bar(i, j);
                        ++n_m;
                    }
                }
            }
            if (n_p + n_m == 0) continue;  // core unresolved by this grid
            double a_p, a_m;
            if (n_p == 0 || n_m == 0) {
                a_p = a_m = (sum_p + sum_m) / static_cast<double>(n_p + n_m);
            } else {
                a_p = sum_p / static_cast<double>(n_p);
                a_m = sum_m / static_cast<double>(n_m);
            }
            for (std::size_t j = j0; j <= j1; ++j) {
                for (std::size_t i = i0; i <= i1; ++i) {
                    const Vec2 p = theta_dom.node(i, j);
                    const double rho = dist(p, c.center);
                    if (rho >= 2.0 * eps) continue;
                    const double s = sigma_profile(rho, eps);
                    const double a = (p.x > c.center.x + eta) ? a_p : a_m;
                    const double base = reached[id(i, j)] ? theta_bar(i, j) : a;
                    theta.at(i, j) = s * base + (1.0 - s) * a;
                }
            }
        }
    }

    void extract_jumps() {
        const std::size_t dnx = theta_dom.nx(), dny = theta_dom.ny();
        for (std::size_t j = 0; j <= dny; ++j) {
            for (std::size_t i = 0; i < dnx; ++i) {
                const Vec2 p0 = theta_dom.node(i, j);
                const Vec2 p1 = theta_dom.node(i + 1, j);
                bool candidate = cuts.crosses(p0.x, p1.x, p0.y, eta);
                if (!candidate) {
                    cores->near((p0 + p1) / 2.0, 2.0 * eps + theta_dom.h(), [&](const Core& c) {
                        if (p0.x < c.center.x + eta && c.center.x + eta < p1.x &&
                            std::abs(p0.y - c.center.y) < 2.0 * eps) {
                            candidate = true;
                        }
                    });
                }
                if (!candidate) continue;
                const double delta = theta(i + 1, j) - theta(i, j);
                const long long k = nearest_int(delta);
                const double g = delta - static_cast<double>(k);
                if (std::abs(g) > kRecoveryJumpTol) {
                    jumps.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                     true, false, delta});
                } else if (k != 0) {
                    jumps.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                     true, true, static_cast<double>(k)});
                }
            }
        }
        std::size_t frac = 0;
        for (const JumpEdge& e : jumps) frac += e.integer_jump ? 0 : 1;
        frac_jump_length = static_cast<double>(frac) * theta_dom.h();
    }
};

// Measured kernel energies for one core profile, streamed at resolution
// h <= eps/4 over the shifted window: full annulus A(eps, r) for |Khat|^2 and
// A(2 eps, r) for |F|^2 = |Khat - Ktilde|^2.
struct KernelEnergies {
    double khat_full{0.0};   // int_{A(eps,r)} |Khat|^2
    double f_outer{0.0};     // int_{B_r \ B_2eps} |F|^2
};

KernelEnergies stream_kernel_energies(double r, double eps) {
    KernelEnergies out;
    const double h = std::min(eps / 4.0, r / 256.0);
    const auto n = static_cast<long long>(std::ceil(2.0 * r / h)) + 1;
    for (long long j = 0; j < n; ++j) {
        for (long long i = 0; i < n; ++i) {
            const double x = -r + (static_cast<double>(i) + 0.5) * h;
            const double y = -r + (static_cast<double>(j) + 0.5) * h;
            const double rho2 = x * x + y * y;
            if (rho2 >= r * r) continue;
            const double rho = std::sqrt(rho2);
            if (rho > eps) {
                const double khat = 1.0 / (2.0 * M_PI * rho);
                out.khat_full += khat * khat * h * h;
                if (rho > 2.0 * eps) {
                    const double f = khat - rho / (2.0 * M_PI * r * r);
                    out.f_outer += f * f * h * h;
                }
            }
        }
    }
    return out;
}

}  // namespace

// --- lattice placement ---------------------------------------------------------

std::size_t LatticePlacement::total_points() const {
    std::size_t n = 0;
    for (const Piece& p : pieces) n += p.points.size();
    return n;
}

double LatticePlacement::min_radius() const {
    double r = 1e300;
    bool any = false;
    for (const Piece& p : pieces) {
        r = std::min(r, p.radius);
        any = true;
    }
    return any ? r : 0.0;
}

AtomicMeasure LatticePlacement::as_measure() const {
    AtomicMeasure mu;
    for (const Piece& p : pieces) {
        for (const Vec2& x : p.points) mu.add(x, static_cast<double>(p.sign));
    }
    return mu;
}

LatticePlacement lattice_vortices(const PiecewiseDensity& mu, int n_eps) {
    if (n_eps < 1) throw std::invalid_argument("lattice_vortices: N must be >= 1");
    LatticePlacement out;
    out.n_eps = n_eps;
    for (std::size_t l = 0; l < mu.pieces().size(); ++l) {
        const DensityPiece& piece = mu.pieces()[l];
        if (piece.level == 0.0) continue;
        LatticePlacement::Piece p;
        p.piece_index = l;
        p.level = piece.level;
        p.sign = piece.level > 0.0 ? 1 : -1;
        p.radius = 1.0 / (2.0 * std::sqrt(static_cast<double>(n_eps) * std::abs(piece.level)));
        const double inradius = std::min(piece.region.width(), piece.region.height()) / 2.0;
        if (!(p.radius < inradius / 2.0)) {
            throw std::runtime_error("lattice_vortices: piece too thin for the lattice (r^l = " +
                                     std::to_string(p.radius) + ")");
        }
        const double step = 2.0 * p.radius;
        const auto k0x = static_cast<long long>(std::floor(piece.region.lo.x / step)) - 1;
        const auto k1x = static_cast<long long>(std::ceil(piece.region.hi.x / step)) + 1;
        const auto k0y = static_cast<long long>(std::floor(piece.region.lo.y / step)) - 1;
        const auto k1y = static_cast<long long>(std::ceil(piece.region.hi.y / step)) + 1;
        for (long long ky = k0y; ky <= k1y; ++ky) {
            for (long long kx = k0x; kx <= k1x; ++kx) {
                const Vec2 z{step * static_cast<double>(kx), step * static_cast<double>(ky)};
                const bool fits = z.x - p.radius > piece.region.lo.x &&
                                  z.x + p.radius < piece.region.hi.x &&
                                  z.y - p.radius > piece.region.lo.y &&
                                  z.y + p.radius < piece.region.hi.y;
                if (fits) p.points.push_back(z);
            }
        }
        p.coverage = static_cast<double>(p.points.size()) / static_cast<double>(n_eps);
        p.coverage_deviation =
            std::abs(p.coverage - std::abs(piece.level) * piece.region.area());
        out.pieces.push_back(std::move(p));
    }
    return out;
}

// --- background field -------------------------------------------------------------

BackgroundField BackgroundField::constant(Vec2 td) {
    BackgroundField b;
    b.kind = Kind::Constant;
    b.td_constant = td;
    return b;
}

BackgroundField BackgroundField::radial(Vec2 c, double slope) {
    BackgroundField b;
    b.kind = Kind::Radial;
    b.center = c;
    b.slope = slope;
    return b;
}

BackgroundField BackgroundField::for_density_level(Vec2 c, double level) {
    // -Div(slope (x - c)) = -2 slope = pi * level
    return radial(c, -M_PI * level / 2.0);
}

Vec2 BackgroundField::td_at(const Vec2& p) const {
    switch (kind) {
        case Kind::Zero: return {0.0, 0.0};
        case Kind::Constant: return td_constant;
        case Kind::Radial: return (p - center) * slope;
    }
    return {0.0, 0.0};
}

Vec2 BackgroundField::beta_at(const Vec2& p) const { return perp(td_at(p)) * (-1.0 / M_PI); }

double BackgroundField::beta_line_integral(const Vec2& p0, const Vec2& p1) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return beta_at(p0).dot(p1 - p0);
        case Kind::Radial: return -(slope / M_PI) * (p0 - center).cross(p1 - p0);
    }
    return 0.0;
}

VectorGridField BackgroundField::td_field(const Domain& grid) const {
    VectorGridField f(grid);
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) f.at(i, j) = td_at(grid.cell_center(i, j));
    }
    return f;
}

// --- kernels and Poisson correction ------------------------------------------------

namespace {

std::vector<Core> collect_cores(const LatticePlacement& placement) {
    std::vector<Core> cores;
    for (const auto& piece : placement.pieces) {
        for (const Vec2& x : piece.points) cores.push_back({x, piece.sign, piece.radius});
    }
    return cores;
}

}  // namespace

KernelFields vortex_kernels(const LatticePlacement& placement, double eps, const Domain& grid) {
    if (!(eps > 0.0)) throw std::invalid_argument("vortex_kernels: eps must be > 0");
    if (placement.total_points() > 0 && !(eps < placement.min_radius())) {
        throw std::runtime_error("vortex_kernels: eps >= some r^l (regime violation)");
    }
    KernelFields out{VectorGridField(grid), VectorGridField(grid)};
    const CoreIndex index(collect_cores(placement), grid.bounds());
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const Vec2 p = grid.cell_center(i, j);
            Vec2 hat{0, 0}, tilde{0, 0};
            index.near(p, 0.0, [&](const Core& c) {
                hat += khat_value(c, eps, p);
                tilde += ktilde_value(c, p);
            });
            out.k_hat.at(i, j) = hat;
            out.k_tilde.at(i, j) = tilde;
        }
    }
    return out;
}

PoissonCorrection poisson_correction(const LatticePlacement& placement,
                                     const PiecewiseDensity& mu, int n_eps, const Domain& grid,
                                     double eps) {
    ScalarGridField rhs(grid);
    const double h = grid.h();
    for (const auto& piece : placement.pieces) {
        const double density = 1.0 / (M_PI * piece.radius * piece.radius);
        for (const Vec2& c : piece.points) {
            const auto i0 = static_cast<long long>((c.x - piece.radius - grid.lower().x) / h) - 1;
            const auto i1 = static_cast<long long>((c.x + piece.radius - grid.lower().x) / h) + 1;
            const auto j0 = static_cast<long long>((c.y - piece.radius - grid.lower().y) / h) - 1;
            const auto j1 = static_cast<long long>((c.y + piece.radius - grid.lower().y) / h) + 1;
            for (long long j = std::max(1LL, j0); j <= std::min<long long>(grid.ny() - 1, j1);
                 ++j) {
                for (long long i = std::max(1LL, i0); i <= std::min<long long>(grid.nx() - 1, i1);
                     ++i) {
                    const Vec2 node =
                        grid.node(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                    const Rect dual{{node.x - h / 2, node.y - h / 2},
                                    {node.x + h / 2, node.y + h / 2}};
                    const double overlap = circle_rect_area(c, piece.radius, dual);
                    if (overlap > 0.0) {
                        rhs.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) +=
                            piece.sign * density * overlap / (h * h);
                    }
                }
            }
        }
    }
    for (std::size_t j = 1; j < grid.ny(); ++j) {
        for (std::size_t i = 1; i < grid.nx(); ++i) {
            const Vec2 node = grid.node(i, j);
            const Rect dual{{node.x - h / 2, node.y - h / 2}, {node.x + h / 2, node.y + h / 2}};
            rhs.at(i, j) -= static_cast<double>(n_eps) * mu.integral(dual) / (h * h);
        }
    }
    PoissonResult sol = solve_dirichlet(rhs);
    PoissonCorrection out{std::move(sol.solution), VectorGridField(grid), 0.0, 0.0};
    const VectorGridField gv = nodal_gradient(out.v);
    out.grad_l2 = std::sqrt(gv.l2_norm_sq());
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            out.beta_correction.at(i, j) = perp(gv(i, j)) * -1.0;
        }
    }
    const double logeps = std::abs(std::log(eps));
    out.scaled_norm = out.grad_l2 / std::sqrt(std::max(1.0, static_cast<double>(n_eps) * logeps));
    return out;
}

int default_n_eps(double eps) {
    return std::max(1, static_cast<int>(std::floor(std::abs(std::log(eps)))));
}

// --- full assembly -------------------------------------------------------------------

RecoveryField assemble_recovery_field(const PiecewiseDensity& mu, const BackgroundField& td,
                                      double eps, int n_eps, const Domain& grid) {
    if (!(eps > 0.0)) throw std::invalid_argument("assemble_recovery_field: eps must be > 0");
    if (n_eps < 1) throw std::invalid_argument("assemble_recovery_field: N must be >= 1");
    {
        const double resid = divergence_compatibility_residual(mu, td.td_field(grid));
        if (resid > 0.02) {
            throw std::runtime_error("assemble_recovery_field: -Div T^D = pi mu fails, residual " +
                                     std::to_string(resid));
        }
    }
    LatticePlacement placement = lattice_vortices(mu, n_eps);
    if (placement.total_points() > 0 && !(2.0 * eps < placement.min_radius())) {
        throw std::runtime_error("assemble_recovery_field: 2 eps must stay below min r^l");
    }

    const double h = grid.h();
    const double n_scale = static_cast<double>(n_eps);
    PoissonCorrection correction = poisson_correction(placement, mu, n_eps, grid, eps);
    const std::vector<Core> cores = collect_cores(placement);
    const CoreIndex index(cores, grid.bounds());

    const Domain dual({grid.lower().x + h / 2, grid.lower().y + h / 2},
                      {grid.upper().x - h / 2, grid.upper().y - h / 2}, h);
    PhaseBuild build(dual);
    build.cores = &index;
    build.cuts.build(cores);
    build.bg = td;
    build.n_scale = n_scale;
    build.v_exact = &correction.v;
    build.eps = eps;
    build.eta = 1e-7 * h;
    build.run();
    build.blend();
    build.extract_jumps();

    RecoveryField out{eps,
                      n_eps,
                      std::move(placement),
                      S1GridField::with_explicit_jumps(build.theta, build.jumps),
                      eps >= 4.0 * h,
                      VectorGridField(grid),
                      vortex_kernels(LatticePlacement{}, eps, grid),
                      std::move(correction),
                      {},
                      0.0,
                      0.0,
                      build.max_plaquette / (h * h),
                      build.two_tree,
                      0.0,
                      0.0,
                      0.0,
                      -1.0};
    out.kernels = vortex_kernels(out.placement, eps, grid);

    // Cell-sampled beta_bar on the primal grid.
    const VectorGridField gv = nodal_gradient(out.correction.v);
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const Vec2 p = grid.cell_center(i, j);
            out.beta_bar.at(i, j) = td.beta_at(p) * n_scale + out.kernels.k_hat(i, j) -
                                    out.kernels.k_tilde(i, j) - perp(gv(i, j));
        }
    }

    // Per-core diagnostics: circulation on sampled circles, a local fine patch
    // for the jump set, blend energy and the core degree.
    std::map<long long, KernelEnergies> kernel_memo;  // keyed by quantized r^l
    double jump_total = 0.0;
    double blend_total = 0.0;
    for (const Core& c : cores) {
        CoreDiagnostics diag;
        diag.center = c.center;
        diag.sign = c.sign;
        diag.piece_radius = c.r;

        // Circulation of beta_bar on circles rho in (eps, r^l).
        for (int ring = 0; ring < 5; ++ring) {
            const double f = static_cast<double>(ring) / 4.0;
            const double rho = std::exp(std::log(1.3 * eps) * (1.0 - f) +
                                        std::log(0.85 * c.r) * f);
            const int m = 512;
            double circ = 0.0;
            for (int s = 0; s < m; ++s) {
                const double a = 2.0 * M_PI * (static_cast<double>(s) + 0.5) / m;
                const Vec2 p{c.center.x + rho * std::cos(a), c.center.y + rho * std::sin(a)};
                const Vec2 tau{-std::sin(a), std::cos(a)};
                Vec2 val = td.beta_at(p) * n_scale;
                index.near(p, 0.0, [&](const Core& cc) {
                    val += khat_value(cc, eps, p);
                    val += ktilde_value(cc, p) * -1.0;
                });
                // interpolated -perp(grad v)
                {
                    const double fx = (p.x - grid.lower().x) / h - 0.5;
                    const double fy = (p.y - grid.lower().y) / h - 0.5;
                    const double cx = std::clamp(fx, 0.0, static_cast<double>(grid.nx() - 1));
                    const double cy = std::clamp(fy, 0.0, static_cast<double>(grid.ny() - 1));
                    const auto i = static_cast<std::size_t>(
                        std::min(cx, static_cast<double>(grid.nx() - 2)));
                    const auto j = static_cast<std::size_t>(
                        std::min(cy, static_cast<double>(grid.ny() - 2)));
                    const double sx = std::clamp(cx - static_cast<double>(i), 0.0, 1.0);
                    const double sy = std::clamp(cy - static_cast<double>(j), 0.0, 1.0);
                    const Vec2 g = gv(i, j) * ((1 - sx) * (1 - sy)) +
                                   gv(i + 1, j) * (sx * (1 - sy)) +
                                   gv(i, j + 1) * ((1 - sx) * sy) + gv(i + 1, j + 1) * (sx * sy);
                    val += perp(g) * -1.0;
                }
                circ += val.dot(tau) * (2.0 * M_PI * rho / m);
            }
            diag.circulation_error =
                std::max(diag.circulation_error, std::abs(circ - static_cast<double>(c.sign)));
        }

        // Local patch: half-width 2.5 eps at h = eps/8.
        {
            const double hp = eps / 8.0;
            const double w = 20.0 * hp;  // 2.5 eps
            const Domain patch({c.center.x - w, c.center.y - w},
                               {c.center.x + w, c.center.y + w}, hp);
            PhaseBuild local(patch);
            std::vector<Core> own{c};
            const CoreIndex own_index(own, patch.bounds());
            local.cores = &own_index;
            local.cuts.build(own);
            local.bg = td;
            local.n_scale = n_scale;
            local.v_grad = &gv;
            local.eps = eps;
            local.eta = 1e-7 * hp;
            local.run();
            local.blend();
            local.extract_jumps();
            diag.jump_length = local.frac_jump_length;
            const S1GridField u_loc =
                S1GridField::with_explicit_jumps(local.theta, local.jumps);
            diag.degree = degree_on_circle(u_loc, {c.center, 2.0 * eps, 0});
            // Blend energy: (1/2) int_{B_2eps} |grad u|^2.
            const VectorGridField g_loc = approximate_gradient(u_loc);
            double acc = 0.0;
            for (std::size_t j = 0; j < patch.ny(); ++j) {
                for (std::size_t i = 0; i < patch.nx(); ++i) {
                    if (dist(patch.cell_center(i, j), c.center) < 2.0 * eps) {
                        acc += g_loc(i, j).norm2();
                    }
                }
            }
            diag.blend_energy = 2.0 * M_PI * M_PI * acc * hp * hp;
        }

        // Measured kernel energy over A(eps, r^l), memoized per radius.
        const long long key = std::llround(c.r * 1e12);
        auto it = kernel_memo.find(key);
        if (it == kernel_memo.end()) {
            it = kernel_memo.emplace(key, stream_kernel_energies(c.r, eps)).first;
        }
        diag.kernel_energy = it->second.khat_full;

        jump_total += diag.jump_length;
        blend_total += diag.blend_energy;
        out.cores.push_back(diag);
    }
    out.jump_length = jump_total;
    out.jump_bound = 0.0;
    for (const auto& piece : out.placement.pieces) {
        out.jump_bound += static_cast<double>(piece.points.size()) * 4.0 * eps;
    }

    // Termwise Dirichlet energy: 2 pi^2 int_{Omega \ D} |G + sum F|^2 plus the
    // measured blend energies, with G = N beta - perp(grad v) and D the union
    // of the B_2eps disks.
    {
        double g_quad = 0.0;
        for (std::size_t j = 0; j < grid.ny(); ++j) {
            for (std::size_t i = 0; i < grid.nx(); ++i) {
                const Vec2 p = grid.cell_center(i, j);
                const Vec2 g = td.beta_at(p) * n_scale - perp(gv(i, j));
                g_quad += g.norm2();
            }
        }
        g_quad *= h * h;
        double g_holes = 0.0;
        double f_outer = 0.0;
        double cross = 0.0;
        for (const Core& c : cores) {
            const Vec2 gc = td.beta_at(c.center) * n_scale -
                            perp(grad_interp_cellfield(gv, c.center));
            g_holes += gc.norm2() * M_PI * (2.0 * eps) * (2.0 * eps);
            const long long key = std::llround(c.r * 1e12);
            f_outer += kernel_memo.at(key).f_outer;
            // Cross term int_{B_r \ B_2eps} 2 G . F, medium-resolution stream.
            const double hm = c.r / 128.0;
            const auto n = static_cast<long long>(std::ceil(2.0 * c.r / hm)) + 1;
            double cacc = 0.0;
            for (long long jj = 0; jj < n; ++jj) {
                for (long long ii = 0; ii < n; ++ii) {
                    const Vec2 p{c.center.x - c.r + (static_cast<double>(ii) + 0.5) * hm,
                                 c.center.y - c.r + (static_cast<double>(jj) + 0.5) * hm};
                    const double rho = dist(p, c.center);
                    if (rho <= 2.0 * eps || rho >= c.r) continue;
                    const Vec2 f = khat_value(c, eps, p) + ktilde_value(c, p) * -1.0;
                    const Vec2 g = td.beta_at(p) * n_scale -
                                   perp(grad_interp_cellfield(gv, p));
                    cacc += 2.0 * g.dot(f) * hm * hm;
                }
            }
            cross += cacc;
        }
        out.energy_dirichlet =
            2.0 * M_PI * M_PI * (g_quad - g_holes + f_outer + cross) + blend_total;
        out.energy_jump = out.jump_length / eps;
        out.energy_total = out.energy_dirichlet + out.energy_jump;
    }
    if (out.field_resolved) {
        out.direct_energy_total = ms_energy(out.field, eps).total;
    }
    return out;
}

// --- report -----------------------------------------------------------------------

void ConvergenceReport::write_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("ConvergenceReport: cannot open " + path);
    std::fprintf(f, "epsilon,N_eps,scaled_energy,gamma_target,core_ratio,jump_ratio,flat_dist,"
                    "h1_resid\n");
    for (const ReportRow& r : rows) {
        std::fprintf(f, "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.eps, r.n_eps,
                     r.scaled_energy, r.gamma_target, r.core_ratio, r.jump_ratio, r.flat_dist,
                     r.h1_resid);
    }
    std::fclose(f);
}

ConvergenceReport convergence_report(const PiecewiseDensity& mu, const BackgroundField& td,
                                     const std::vector<double>& eps_list,
                                     const std::vector<int>& n_eps_list, Regime regime,
                                     const Domain& grid) {
    if (eps_list.size() < 3) {
        throw std::invalid_argument("convergence_report: need at least 3 epsilon values");
    }
    for (std::size_t k = 0; k + 1 < eps_list.size(); ++k) {
        if (!(eps_list[k] > eps_list[k + 1])) {
            throw std::invalid_argument("convergence_report: epsilon list not decreasing");
        }
    }
    if (!n_eps_list.empty() && n_eps_list.size() != eps_list.size()) {
        throw std::invalid_argument("convergence_report: n_eps list length mismatch");
    }
    ConvergenceReport report;
    report.regime = regime;
    const double target = gamma_limit_energy(regime, mu, td.td_field(grid));
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        const double eps = eps_list[k];
        const int n = n_eps_list.empty() ? default_n_eps(eps) : n_eps_list[k];
        const RecoveryField rf = assemble_recovery_field(mu, td, eps, n, grid);
        ReportRow row;
        row.eps = eps;
        row.n_eps = n;
        const double logeps = std::abs(std::log(eps));
        const double divisor = regime == Regime::Supercritical
                                   ? static_cast<double>(n) * n
                                   : static_cast<double>(n) * logeps;
        row.scaled_energy = rf.energy_total / divisor;
        row.gamma_target = target;
        double predicted = 0.0, measured = 0.0;
        for (const auto& piece : rf.placement.pieces) {
            predicted += static_cast<double>(piece.points.size()) *
                         std::log(piece.radius / eps) / (2.0 * M_PI);
        }
        for (const CoreDiagnostics& c : rf.cores) measured += c.kernel_energy;
        row.core_ratio = predicted > 0.0 ? measured / predicted : 1.0;
        row.jump_ratio = rf.jump_length / (eps * static_cast<double>(n) * logeps);
        // Flat distance of the measured vortex measure / N to mu.
        AtomicMeasure extracted;
        for (const CoreDiagnostics& c : rf.cores) {
            extracted.add(c.center, static_cast<double>(c.degree));
        }
        row.flat_dist =
            flat_distance_to_density(extracted.scaled(1.0 / n), mu, grid, 1.0 / 12.0).value;
        row.h1_resid = rf.correction.grad_l2 / static_cast<double>(n);
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace vortexlab
