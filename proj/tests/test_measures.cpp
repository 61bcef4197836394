#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "test_support.hpp"
#include "vortexlab/measures.hpp"
#include "vortexlab/poisson.hpp"

using namespace vortexlab;
using namespace vtest;

TEST_CASE("total variation") {
    AtomicMeasure m;
    m.add({0.5, 0.5}, 2.0);
    m.add({0.2, 0.2}, -1.0);
    CHECK(total_variation(m) == 3.0);
    CHECK(total_variation(AtomicMeasure{}) == 0.0);
    AtomicMeasure s;
    s.add({0.3, 0.3}, -5.0);
    CHECK(total_variation(s) == 5.0);
}

TEST_CASE("flat norm, frozen values") {
    const Domain omega({0, 0}, {1, 1}, 1.0 / 64);
    SUBCASE("zero measure") { CHECK(flat_norm_atomic(AtomicMeasure{}, omega) == 0.0); }
    SUBCASE("single unit atom at distance 0.3 from the boundary") {
        AtomicMeasure m;
        m.add({0.5, 0.3}, 1.0);
        CHECK(flat_norm_atomic(m, omega) == doctest::Approx(0.3).epsilon(1e-9));
    }
    SUBCASE("dipole separated by 0.1, far from the boundary") {
        const Domain big({0, 0}, {2.5, 2.5}, 1.0 / 32);
        AtomicMeasure m;
        m.add({1.2, 1.25}, 1.0);
        m.add({1.3, 1.25}, -1.0);
        CHECK(flat_norm_atomic(m, big) == doctest::Approx(0.1).epsilon(1e-9));
    }
    SUBCASE("unit atom far from the boundary pays the cap") {
        const Domain big({0, 0}, {3, 3}, 1.0 / 32);
        AtomicMeasure m;
        m.add({1.5, 1.5}, 1.0);  // boundary distance 1.5 > 1
        CHECK(flat_norm_atomic(m, big) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("atom on the boundary rejected") {
        AtomicMeasure m;
        m.add({0.0, 0.5}, 1.0);
        CHECK_THROWS_AS(flat_norm_atomic(m, omega), std::invalid_argument);
    }
}

TEST_CASE("flat norm properties") {
    const Domain omega({0, 0}, {1, 1}, 1.0 / 64);
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 30; ++trial) {
        const AtomicMeasure a = random_atoms(rng, 4, 0.08, {{0.1, 0.1}, {0.9, 0.9}});
        const AtomicMeasure b = random_atoms(rng, 4, 0.08, {{0.1, 0.1}, {0.9, 0.9}});
        const double fa = flat_norm_atomic(a, omega);
        const double fb = flat_norm_atomic(b, omega);
        CHECK(fa <= total_variation(a) + 1e-9);
        // Symmetry under negation.
        CHECK(flat_norm_atomic(a.scaled(-1.0), omega) == doctest::Approx(fa).epsilon(1e-12));
        // Subadditivity.
        AtomicMeasure sum = a;
        for (const Atom& at : b.atoms()) sum.add(at.position, at.weight);
        CHECK(flat_norm_atomic(sum, omega) <= fa + fb + 1e-9);
    }
}

TEST_CASE("LP oracle, frozen values and certificate") {
    const Domain omega({0, 0}, {1, 1}, 1.0 / 64);
    const double h = 1.0 / 64;
    SUBCASE("atom at the center of the unit square") {
        AtomicMeasure m;
        m.add({0.5, 0.5}, 1.0);
        const double v = flat_norm_lp_oracle(m, omega, h);
        CHECK(v == doctest::Approx(0.5).epsilon(0.0).scale(1.0).epsilon(2.0 * h / 0.5));
    }
    SUBCASE("negation symmetry") {
        AtomicMeasure m;
        m.add({0.3, 0.55}, 1.0);
        m.add({0.7, 0.35}, -1.0);
        const double a = flat_norm_lp_oracle(m, omega, h);
        const double b = flat_norm_lp_oracle(m.scaled(-1.0), omega, h);
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
    SUBCASE("certificate fields populated") {
        AtomicMeasure m;
        m.add({0.4, 0.6}, 1.0);
        const LpOracleResult r = flat_norm_lp_oracle_full(m, omega, h);
        CHECK(r.max_constraint_violation <= 1e-9);
        CHECK(r.duality_gap <= 1e-5);
    }
    SUBCASE("unresolved separations rejected") {
        AtomicMeasure m;
        m.add({0.5, 0.5}, 1.0);
        m.add({0.5 + h, 0.5}, -1.0);
        CHECK_THROWS_AS(flat_norm_lp_oracle(m, omega, h), std::invalid_argument);
    }
}

TEST_CASE("flow vs LP oracle agreement") {
    const Domain omega({0, 0}, {1, 1}, 1.0 / 64);
    const double h = 1.0 / 64;
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 12; ++trial) {
        const AtomicMeasure m = random_atoms(rng, 6, 4.5 * h, {{0.1, 0.1}, {0.9, 0.9}});
        const double flow = flat_norm_atomic(m, omega);
        const double lp = flat_norm_lp_oracle(m, omega, h);
        CHECK(std::abs(flow - lp) <= 2.0 * h);
    }
}

TEST_CASE("flat distance to density") {
    const Domain omega({0, 0}, {1, 1}, 1.0 / 64);
    const PiecewiseDensity mu({{{{0.0, 0.0}, {1.0, 1.0}}, 1.0}});
    SUBCASE("exact atomization is within the bound") {
        AtomicMeasure nu;
        const double hq = 1.0 / 8;
        for (int j = 0; j < 8; ++j) {
            for (int i = 0; i < 8; ++i) {
                nu.add({(i + 0.5) * hq, (j + 0.5) * hq}, hq * hq);
            }
        }
        const FlatDistanceResult r = flat_distance_to_density(nu, mu, omega, hq);
        CHECK(r.value <= r.atomization_bound + 1e-9);
    }
    SUBCASE("mu = 0, single atom of weight 1/N") {
        const Domain big({0, 0}, {3, 3}, 1.0 / 16);
        AtomicMeasure nu;
        nu.add({1.5, 1.5}, 0.01);
        const FlatDistanceResult r =
            flat_distance_to_density(nu, PiecewiseDensity{}, big, 0.25);
        CHECK(r.value == doctest::Approx(0.01).epsilon(1e-6));
    }
}

TEST_CASE("H^-1 norm via Poisson duality") {
    SUBCASE("zero") {
        const Domain d({0, 0}, {1, 1}, 1.0 / 32);
        CHECK(h_minus1_norm(ScalarGridField(d)) == 0.0);
    }
    SUBCASE("Laplace eigenfunction, 1% at h=1/128") {
        const Domain d({0, 0}, {1, 1}, 1.0 / 128);
        ScalarGridField f(d);
        for (std::size_t j = 0; j <= d.ny(); ++j) {
            for (std::size_t i = 0; i <= d.nx(); ++i) {
                const Vec2 p = d.node(i, j);
                f.at(i, j) = std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
            }
        }
        const double expect = 1.0 / (2.0 * std::sqrt(2.0) * M_PI);
        CHECK(h_minus1_norm(f) == doctest::Approx(expect).epsilon(0.01));
    }
    SUBCASE("homogeneity to 1e-10") {
        const Domain d({0, 0}, {1, 1}, 1.0 / 64);
        ScalarGridField f(d);
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-1, 1);
        for (std::size_t j = 1; j < d.ny(); ++j) {
            for (std::size_t i = 1; i < d.nx(); ++i) f.at(i, j) = u(rng);
        }
        ScalarGridField f2(d);
        for (std::size_t k = 0; k < f.values().size(); ++k) f2.values()[k] = 2.0 * f.values()[k];
        const double n1 = h_minus1_norm(f);
        const double n2 = h_minus1_norm(f2);
        CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-10));
    }
    SUBCASE("parallelogram law within solver tolerance") {
        const Domain d({0, 0}, {1, 1}, 1.0 / 64);
        ScalarGridField f(d), g(d);
        for (std::size_t j = 0; j <= d.ny(); ++j) {
            for (std::size_t i = 0; i <= d.nx(); ++i) {
                const Vec2 p = d.node(i, j);
                f.at(i, j) = std::sin(M_PI * p.x) * std::sin(2.0 * M_PI * p.y);
                g.at(i, j) = p.x * (1 - p.x) * p.y * (1 - p.y);
            }
        }
        ScalarGridField fpg(d), fmg(d);
        for (std::size_t k = 0; k < f.values().size(); ++k) {
            fpg.values()[k] = f.values()[k] + g.values()[k];
            fmg.values()[k] = f.values()[k] - g.values()[k];
        }
        const double lhs = std::pow(h_minus1_norm(fpg), 2) + std::pow(h_minus1_norm(fmg), 2);
        const double rhs = 2.0 * std::pow(h_minus1_norm(f), 2) + 2.0 * std::pow(h_minus1_norm(g), 2);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
    }
}

TEST_CASE("measure CSV round-trips") {
    AtomicMeasure m;
    m.add({0.125, 0.75}, 2.0);
    m.add({0.5, 0.25}, -0.5);
    const std::string p1 = "/tmp/vortexlab_measure_test.csv";
    write_measure_csv(m, p1);
    const AtomicMeasure m2 = read_measure_csv(p1);
    REQUIRE(m2.atoms().size() == 2);
    CHECK(m2.atoms()[0].position.x == 0.125);
    CHECK(m2.atoms()[1].weight == -0.5);
    std::remove(p1.c_str());

    const PiecewiseDensity d({{{{0, 0}, {0.5, 1}}, 2.0}, {{{0.5, 0}, {1, 1}}, -1.0}});
    const std::string p2 = "/tmp/vortexlab_density_test.csv";
    write_density_csv(d, p2);
    const PiecewiseDensity d2 = read_density_csv(p2);
    REQUIRE(d2.pieces().size() == 2);
    CHECK(d2.pieces()[1].level == -1.0);
    CHECK(d2.value_at({0.25, 0.5}) == 2.0);
    CHECK(d2.integral({{0, 0}, {1, 1}}) == doctest::Approx(0.5));
    std::remove(p2.c_str());
}
