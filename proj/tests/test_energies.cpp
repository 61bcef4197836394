#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "vortexlab/balls.hpp"
#include "vortexlab/energies.hpp"

using namespace vortexlab;
using namespace vtest;

TEST_CASE("gl energy") {
    const Domain d = unit_square(1.0 / 64);
    SUBCASE("unit constant -> 0") {
        RawVectorField u(d, {1.0, 0.0});
        const EnergyReport r = gl_energy(u, 0.1);
        CHECK(r.total == 0.0);
    }
    SUBCASE("zero field -> area / eps^2") {
        RawVectorField u(d, {0.0, 0.0});
        const EnergyReport r = gl_energy(u, 0.2);
        CHECK(r.second_term == doctest::Approx(1.0 / 0.04).epsilon(1e-12));
        CHECK(r.dirichlet == 0.0);
        CHECK(r.total == r.dirichlet + r.second_term);
    }
    SUBCASE("S1-valued field has machine-zero potential") {
        const Domain dc = centered_square(129);
        const S1GridField u = build_s1_field(canonical_vortex_lifting(dc, {0, 0}, 1));
        const EnergyReport r = gl_energy(as_raw_field(u), 0.05,
                                         EnergyRegion::annulus({0, 0}, 0.2, 0.8));
        CHECK(r.second_term < 1e-20);
    }
    SUBCASE("vortex on the annulus: pi log(1/eps) within 3%") {
        // side 513/256 is an exact multiple of h = 1/512 and leaves room for B_1
        const Domain dc({0, 0}, {513.0 / 256.0, 513.0 / 256.0}, 1.0 / 512.0);
        const Vec2 c = snap_to_cell_center(dc, {1.002, 1.002});
        const S1GridField u = build_s1_field(canonical_vortex_lifting(dc, c, 1));
        const double eps = 0.05;
        const EnergyReport r =
            gl_energy(as_raw_field(u), eps, EnergyRegion::annulus(c, eps, 1.0));
        CHECK(r.dirichlet == doctest::Approx(M_PI * std::log(1.0 / eps)).epsilon(0.03));
    }
    SUBCASE("eps <= 0 rejected") {
        RawVectorField u(d, {1.0, 0.0});
        CHECK_THROWS_AS(gl_energy(u, 0.0), std::invalid_argument);
    }
}

TEST_CASE("cr energy") {
    const Domain dc = centered_square(513);
    const Vec2 c = snap_to_cell_center(dc, {0, 0});
    SUBCASE("mu = 0, constant field -> 0") {
        const S1GridField u = build_s1_field(constant_lifting(dc, 0.2));
        const EnergyReport r = cr_energy(u, AtomicMeasure{}, BallFamily{}, 0.05);
        CHECK(r.total == 0.0);
    }
    SUBCASE("single vortex on B_1: pi log 20 + 1 within 3%") {
        const double eps = 0.05;
        const S1GridField u = build_s1_field(canonical_vortex_lifting(dc, c, 1));
        AtomicMeasure mu;
        mu.add(c, 1.0);
        const BallFamily cores({{c, eps, 1}}, 0.0);
        const EnergyReport r = cr_energy(u, mu, cores, eps, EnergyRegion::disk(c, 1.0));
        CHECK(r.total ==
              doctest::Approx(M_PI * std::log(1.0 / eps) + 1.0).epsilon(0.03));
    }
    SUBCASE("two far vortices: 2 pi log(1/eps) + 2 within 5%") {
        const double eps = 0.02;
        const Vec2 c1 = snap_to_cell_center(dc, {-0.45, 0.0});
        const Vec2 c2 = snap_to_cell_center(dc, {0.45, 0.0});
        const S1GridField u =
            build_s1_field(multi_vortex_lifting(dc, {{c1, 1}, {c2, 1}}));
        AtomicMeasure mu;
        mu.add(c1, 1.0);
        mu.add(c2, 1.0);
        const BallFamily cores({{c1, eps, 1}, {c2, eps, 1}}, 0.0);
        EnergyRegion reg = EnergyRegion::rect({{-1, -0.55}, {1, 0.55}});
        const EnergyReport r = cr_energy(u, mu, cores, eps, reg);
        // Interaction and boundary terms stay O(1) at this separation; the
        // leading 2 pi log(1/eps) + |mu| carries the 5% band.
        CHECK(r.total ==
              doctest::Approx(2.0 * M_PI * std::log(1.0 / eps) + 2.0).epsilon(0.05));
    }
    SUBCASE("degree mismatch detected") {
        const S1GridField u = build_s1_field(canonical_vortex_lifting(dc, c, 2));
        AtomicMeasure mu;
        mu.add(c, 1.0);
        const BallFamily cores({{c, 0.05, 1}}, 0.0);
        CHECK_THROWS_WITH_AS(cr_energy(u, mu, cores, 0.05),
                             doctest::Contains("degree mismatch on ball 0"),
                             std::runtime_error);
    }
}

TEST_CASE("ms energy") {
    SUBCASE("constant -> 0") {
        const Domain d = unit_square(1.0 / 32, 0.1);
        const EnergyReport r = ms_energy(build_s1_field(constant_lifting(d, 0.2)), 0.1);
        CHECK(r.total == 0.0);
        CHECK(r.admissible);
    }
    SUBCASE("one fractional segment of length 0.2 at eps 0.1 -> 2.0") {
        const Domain d({0, 0}, {1, 1}, 1.0 / 40, 0.1);
        ScalarGridField f(d);
        std::vector<JumpEdge> jumps;
        for (std::size_t j = 17; j < 25; ++j) {
            jumps.push_back({19, static_cast<std::uint32_t>(j), true, false, 0.75});
        }
        const S1GridField u = S1GridField::with_explicit_jumps(f, jumps);
        const EnergyReport r = ms_energy(u, 0.1);
        CHECK(r.dirichlet == 0.0);
        CHECK(r.second_term == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(r.admissible);
    }
    SUBCASE("canonical vortex: zero jump term, log-divergent Dirichlet") {
        // Inner margin excludes nothing here: integer jumps are invisible.
        const Domain d1 = centered_square(129, 0.05);
        const Domain d2 = centered_square(257, 0.05);
        const S1GridField u1 = build_s1_field(canonical_vortex_lifting(d1, {0, 0}, 1));
        const S1GridField u2 = build_s1_field(canonical_vortex_lifting(d2, {0, 0}, 1));
        const EnergyReport r1 = ms_energy(u1, 0.1);
        const EnergyReport r2 = ms_energy(u2, 0.1);
        CHECK(r1.second_term == 0.0);
        CHECK(r2.second_term == 0.0);
        CHECK(r1.admissible);
        // Dirichlet ~ pi log(R/h) + O(1): the constant is stable under h -> h/2.
        const double c1 = r1.dirichlet - M_PI * std::log(2.0 / d1.h());
        const double c2 = r2.dirichlet - M_PI * std::log(2.0 / d2.h());
        CHECK(std::abs(c1 - c2) < 0.1);
        CHECK(std::abs(c1) < 4.0);
    }
    SUBCASE("jump outside the inner subdomain flags inadmissible") {
        const Domain d({0, 0}, {1, 1}, 1.0 / 40, 0.25);
        ScalarGridField f(d);
        std::vector<JumpEdge> jumps{{2, 2, true, false, 0.75}};  // near the corner
        const S1GridField u = S1GridField::with_explicit_jumps(f, jumps);
        const EnergyReport r = ms_energy(u, 0.1);
        CHECK(!r.admissible);
    }
    SUBCASE("jump term scales linearly in 1/eps") {
        const Domain d({0, 0}, {1, 1}, 1.0 / 40, 0.1);
        ScalarGridField f(d);
        std::vector<JumpEdge> jumps;
        for (std::size_t j = 17; j < 25; ++j) {
            jumps.push_back({19, static_cast<std::uint32_t>(j), true, false, 0.6});
        }
        const S1GridField u = S1GridField::with_explicit_jumps(f, jumps);
        const double e1 = ms_energy(u, 0.1).second_term;
        const double e2 = ms_energy(u, 0.05).second_term;
        CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-12));
    }
}

TEST_CASE("gamma limit energies") {
    const Domain d = unit_square(1.0 / 64);
    VectorGridField td(d);
    SUBCASE("subcritical: pi |mu|") {
        AtomicMeasure mu;
        mu.add({0.3, 0.3}, 2.0);
        mu.add({0.7, 0.7}, -1.0);
        CHECK(gamma_limit_energy(Regime::Subcritical, mu, td) ==
              doctest::Approx(3.0 * M_PI));
    }
    SUBCASE("critical and supercritical with |T^D| = 1") {
        for (Vec2& v : td.values()) v = {1.0, 0.0};
        // mu = 0 and constant T^D satisfy -Div T^D = pi mu.
        CHECK(gamma_limit_energy(Regime::Critical, AtomicMeasure{}, td) ==
              doctest::Approx(2.0).epsilon(1e-12));
        CHECK(gamma_limit_energy(Regime::Supercritical, AtomicMeasure{}, td) ==
              doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("critical >= subcritical when T^D is nonzero") {
        for (Vec2& v : td.values()) v = {0.4, 0.1};
        const PiecewiseDensity mu;  // zero measure
        const double crit = gamma_limit_energy(Regime::Critical, mu, td);
        const double sub = gamma_limit_energy(Regime::Subcritical, mu, td);
        CHECK(crit >= sub);
        CHECK(crit > 0.0);
    }
    SUBCASE("incompatible pair rejected") {
        AtomicMeasure mu;
        mu.add({0.5, 0.5}, 3.0);  // nonzero mu but divergence-free T^D
        for (Vec2& v : td.values()) v = {1.0, 0.0};
        CHECK_THROWS_AS(gamma_limit_energy(Regime::Critical, mu, td), std::runtime_error);
    }
    SUBCASE("radial field vs its density is compatible") {
        // T^D = -2 pi (x - c) has -Div T^D = 4 pi = pi * 4 chi.
        const Vec2 c{0.5, 0.5};
        for (std::size_t j = 0; j < d.ny(); ++j) {
            for (std::size_t i = 0; i < d.nx(); ++i) {
                td.at(i, j) = -2.0 * M_PI * (d.cell_center(i, j) - c);
            }
        }
        const PiecewiseDensity mu({{{{0, 0}, {1, 1}}, 4.0}});
        CHECK(divergence_compatibility_residual(mu, td) < 0.02);
        const double expect = M_PI * 4.0 + 2.0 * td.l2_norm_sq();
        CHECK(gamma_limit_energy(Regime::Critical, mu, td) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}
