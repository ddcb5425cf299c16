#include <cmath>

#include "chemostat/equilibria.hpp"
#include "doctest.h"
#include "sets.hpp"

using namespace chemostat;

TEST_CASE("break-even concentrations match the rational closed forms") {
    // Holling II: gamma m x/(a+x) = Di  =>  x = a Di / (gamma m - Di)
    const Parameters p1 = sets::holling2_equal();
    CHECK(break_even(p1.f1, 2.0, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(break_even(p1.f2, 1.5, 1.0) == doctest::Approx(0.25).epsilon(1e-12));

    const Parameters p2 = sets::holling2_perturbed();
    CHECK(break_even(p2.f1, 2.0, 1.2) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(break_even(p2.f2, 1.5, 1.3) ==
          doctest::Approx(0.38235294117647058824).epsilon(1e-12));

    // Holling III: x = sqrt(a Di / (gamma m - Di))
    const Parameters p3 = sets::holling3_mixed();
    CHECK(break_even(p3.f1, 0.8, 1.2) ==
          doctest::Approx(2.4494897427831780982).epsilon(1e-12));
    CHECK(break_even(p3.f2, 0.9, 1.1) ==
          doctest::Approx(1.7063893769835631924).epsilon(1e-12));
}

TEST_CASE("break-even refuses an unreachable removal rate") {
    const Response f = Response::holling2(1.0, 0.2);
    CHECK_THROWS_AS(break_even(f, 2.0, 2.0), NoBreakEvenError);  // equals sup
    CHECK_THROWS_AS(break_even(f, 2.0, 5.0), NoBreakEvenError);
    CHECK_THROWS_AS(break_even(f, 2.0, 0.0), DomainError);
    CHECK_THROWS_AS(break_even(f, 2.0, -1.0), DomainError);
}

TEST_CASE("break-even derivative is the reciprocal slope") {
    const Response f2 = Response::holling2(2.0, 0.5);
    const double lz = break_even(f2, 1.5, 1.0);
    // closed form for Holling II: a g m / (g m - Di)^2 = 0.375 here
    CHECK(lambda_prime(f2, 1.5, lz) == doctest::Approx(0.375).epsilon(1e-12));

    // finite-difference cross-check through the solver itself
    const double h = 1e-6;
    const double fd =
        (break_even(f2, 1.5, 1.0 + h) - break_even(f2, 1.5, 1.0 - h)) /
        (2.0 * h);
    CHECK(lambda_prime(f2, 1.5, lz) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("coexistence threshold composes the break-evens") {
    CHECK(mu_c1(sets::holling2_equal()) ==
          doctest::Approx(0.325).epsilon(1e-13));
    CHECK(mu_c1(sets::holling2_perturbed()) ==
          doctest::Approx(0.52941176470588235294).epsilon(1e-13));
    CHECK(mu_c1(sets::holling3_mixed()) ==
          doctest::Approx(5.0090738082585228868).epsilon(1e-13));

    // raw helper keeps degenerate combinations expressible
    CHECK(mu_c1_value(0.2, 0.0, 1.0, 1.0, 2.0) == doctest::Approx(0.2));
}

TEST_CASE("prey-only equilibrium appears above lambda_P") {
    CHECK_FALSE(single_species(sets::holling2_equal(0.1)).has_value());

    // boundary probed at the computed break-even, not a decimal literal:
    // 0.2 rounds up in binary and would land strictly above it
    const Parameters base = sets::holling2_equal();
    const double lp = break_even(base.f1, base.gamma1, base.D1);
    CHECK_FALSE(single_species(sets::holling2_equal(lp)).has_value());
    CHECK(single_species(sets::holling2_equal(lp), true).has_value());
    CHECK(single_species(sets::holling2_equal(lp), true)->P ==
          doctest::Approx(0.0));

    const auto e1 = single_species(sets::holling2_equal(0.3));
    REQUIRE(e1.has_value());
    CHECK(e1->N == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(e1->P == doctest::Approx(0.2).epsilon(1e-12));  // (mu-lp) D g1 / D1
    CHECK(e1->Z == 0.0);
}

TEST_CASE("coexistence equilibrium appears above mu_c1") {
    CHECK_FALSE(coexistence(sets::holling2_equal(0.3)).has_value());
    {
        const double threshold = mu_c1(sets::holling2_equal());
        CHECK_FALSE(coexistence(sets::holling2_equal(threshold)).has_value());
        const auto edge = coexistence(sets::holling2_equal(threshold), true);
        REQUIRE(edge.has_value());
        CHECK(std::abs(edge->Z) <= 1e-10);  // degenerates onto E1
    }

    const auto e2 = coexistence(sets::holling2_equal(0.6));
    REQUIRE(e2.has_value());
    CHECK(e2->N == doctest::Approx(0.42943617196894563).epsilon(1e-12));
    CHECK(e2->P == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(e2->Z == doctest::Approx(0.13669148409316311).epsilon(1e-12));

    const auto f2 = coexistence(sets::holling2_perturbed(0.9));
    REQUIRE(f2.has_value());
    CHECK(f2->N == doctest::Approx(0.6118410936350624).epsilon(1e-10));
    CHECK(f2->Z == doctest::Approx(0.135570326905512).epsilon(1e-10));

    const auto g2 = coexistence(sets::holling3_mixed(7.25));
    REQUIRE(g2.has_value());
    CHECK(g2->N == doctest::Approx(4.461234513318734).epsilon(1e-10));
    CHECK(g2->P == doctest::Approx(1.7063893769835631924).epsilon(1e-12));
    CHECK(g2->Z == doctest::Approx(0.150009657516603).epsilon(1e-10));
}

TEST_CASE("coexistence point zeroes the vector field") {
    for (double mu : {0.4, 0.6, 1.0}) {
        const Parameters p = sets::holling2_equal(mu);
        const auto e = coexistence(p);
        REQUIRE(e.has_value());
        const double dn = (p.mu - e->N) * p.D - e->P * p.f1(e->N);
        const double dp =
            p.gamma1 * e->P * p.f1(e->N) - p.D1 * e->P - e->Z * p.f2(e->P);
        const double dz = p.gamma2 * e->Z * p.f2(e->P) - p.D2 * e->Z;
        CHECK(std::abs(dn) <= 1e-10);
        CHECK(std::abs(dp) <= 1e-10);
        CHECK(std::abs(dz) <= 1e-10);
    }
}

TEST_CASE("equilibrium_set gathers thresholds and rest points") {
    const EquilibriumSet s = equilibrium_set(sets::holling2_equal(0.6));
    CHECK(s.mu == 0.6);
    CHECK(s.lambda_P == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(s.lambda_Z == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.mu_c1 == doctest::Approx(0.325).epsilon(1e-12));
    CHECK(s.e0.N == 0.6);
    CHECK(s.e0.P == 0.0);
    CHECK(s.e0.Z == 0.0);
    REQUIRE(s.e1.has_value());
    CHECK(s.e1->P == doctest::Approx(0.8).epsilon(1e-12));
    REQUIRE(s.e2.has_value());

    const EquilibriumSet low = equilibrium_set(sets::holling2_equal(0.1));
    CHECK_FALSE(low.e1.has_value());
    CHECK_FALSE(low.e2.has_value());

    const EquilibriumSet mid = equilibrium_set(sets::holling2_equal(0.3));
    CHECK(mid.e1.has_value());
    CHECK_FALSE(mid.e2.has_value());
}

TEST_CASE("interior coordinates grow with the feed concentration") {
    const Parameters p = sets::holling2_equal();
    double prev_N = 0.0, prev_Z = -1.0;
    for (int i = 0; i < 50; ++i) {
        const double mu = 0.33 + (1.6 - 0.33) * i / 49;
        const auto e = coexistence(p.with_mu(mu));
        REQUIRE(e.has_value());
        CHECK(e->N > prev_N);
        CHECK(e->Z > prev_Z);
        prev_N = e->N;
        prev_Z = e->Z;
    }
}
