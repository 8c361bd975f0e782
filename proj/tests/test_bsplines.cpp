#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "banachic/bsplines.hpp"
#include "banachic/verify.hpp"

using namespace banachic;

TEST_CASE("classical B-spline from divided differences") {
    const BSplineSpec hat(2, {0.0, 1.0, 2.0}, 2.0);
    CHECK(hat.mu[0] == Catch::Approx(1.0));
    CHECK(hat.mu[1] == Catch::Approx(-2.0));
    CHECK(hat.mu[2] == Catch::Approx(1.0));
    CHECK(bspline_classical(hat, 1.0) == Catch::Approx(1.0));
    CHECK(bspline_classical(hat, 0.5) == Catch::Approx(0.5));
    CHECK(bspline_classical(hat, -0.2) == 0.0);
    CHECK(bspline_classical(hat, 2.0) == 0.0);
    CHECK(bspline_classical(hat, 17.0) == 0.0);

    const BSplineSpec box(1, {0.0, 1.0}, 2.0);
    CHECK(bspline_classical(box, 0.0) == Catch::Approx(1.0));   // right-open at the left knot
    CHECK(bspline_classical(box, 0.999) == Catch::Approx(1.0));
    CHECK(bspline_classical(box, 1.0) == 0.0);
}

TEST_CASE("banachic B-spline is the alpha transform") {
    const BSplineSpec spec3 = BSplineSpec::uniform(2, 0.0, 1.0, 3.0);
    CHECK(bspline_banachic(spec3, 1.0) == Catch::Approx(1.0));  // alpha_{1.5}(1)
    CHECK(bspline_banachic(spec3, -1.0) == 0.0);
    CHECK(bspline_banachic(spec3, 2.5) == 0.0);

    const BSplineSpec spec2 = BSplineSpec::uniform(2, 0.0, 1.0, 2.0);
    for (double t : {0.1, 0.5, 1.2, 1.9})
        CHECK(bspline_banachic(spec2, t) == Catch::Approx(bspline_classical(spec2, t)));

    // roundtrip (Q^{m,p})^{p-1} = Q^{m,2}
    for (double p : {1.5, 3.0})
        for (double t : {0.15, 0.8, 1.4}) {
            const BSplineSpec spec = BSplineSpec::uniform(2, 0.0, 1.0, p);
            CHECK(std::pow(bspline_banachic(spec, t), p - 1.0) ==
                  Catch::Approx(bspline_classical(spec, t)).margin(1e-12));
        }
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(BSplineSpec(2, {0.0, 1.0, 3.0}, 2.0), configuration_error);  // not uniform
    CHECK_THROWS_AS(BSplineSpec(2, {0.0, 1.0}, 2.0), configuration_error);       // wrong count
    CHECK_THROWS_AS(BSplineSpec(2, {0.0, 1.0, 2.0}, 1.0), std::domain_error);    // bad exponent
    CHECK_THROWS_AS(BSplineSpec::uniform(2, 0.0, -1.0, 2.0), std::domain_error);

    const BSplineSpec spec = BSplineSpec::uniform(3, -1.0, 0.5, 2.0);
    double lin = 0.0;
    for (int l = 0; l <= 3; ++l) lin += spec.mu[l] * (2.0 * spec.knots[l] - 0.3);
    CHECK(lin == Catch::Approx(0.0).margin(1e-10));  // annihilates P_{m-1}
}

TEST_CASE("uniform-knot identities") {
    SECTION("integral of the (p-1) power is one") {
        for (double p : {1.5, 2.0, 3.0}) {
            const BSplineIdentityReport rep = bspline_identity_report(BSplineSpec::uniform(2, 0.0, 1.0, p));
            CHECK(rep.integral_p1 == Catch::Approx(1.0).margin(1e-8));
            CHECK(rep.integral_ok);
        }
    }
    SECTION("lattice sum is 1/h") {
        const BSplineIdentityReport rep = bspline_identity_report(BSplineSpec::uniform(2, 0.0, 0.5, 2.0));
        CHECK(rep.lattice_sum == Catch::Approx(2.0).margin(1e-10));
        CHECK(rep.lattice_ok);
    }
    SECTION("divided-difference pairing with s^m/m! is one on both sides") {
        for (int m : {1, 2, 3}) {
            const BSplineSpec spec = BSplineSpec::uniform(m, 0.0, 0.5, 3.0);
            double fact = 1.0;
            for (int j = 2; j <= m; ++j) fact *= j;
            double rhs = 0.0;
            for (int l = 0; l <= m; ++l)
                rhs += spec.mu[l] * std::pow(spec.knots[l], m) / fact;
            CHECK(rhs == Catch::Approx(1.0).margin(1e-10));
            const BSplineIdentityReport rep = bspline_identity_report(spec);
            CHECK(rep.integral_p1 == Catch::Approx(1.0).margin(1e-8));
        }
    }
    SECTION("sup for orders one and two attains h^{1-p*}") {
        for (double h : {1.0, 0.5})
            for (double p : {1.5, 2.0, 3.0})
                for (int m : {1, 2}) {
                    const BSplineIdentityReport rep = bspline_identity_report(BSplineSpec::uniform(m, 0.0, h, p));
                    CHECK(rep.sup ==
                          Catch::Approx(std::pow(h, 1.0 - conjugate_exponent(p))).margin(1e-8));
                }
    }
    SECTION("order three peaks strictly below the bound") {
        const BSplineIdentityReport rep = bspline_identity_report(BSplineSpec::uniform(3, 0.0, 1.0, 2.0));
        CHECK(rep.sup == Catch::Approx(0.75).margin(1e-12));
        CHECK(rep.sup_within_bound);
    }
}

TEST_CASE("cox-de boor cross-check") {
    for (int m = 1; m <= 4; ++m) {
        const BSplineSpec spec = BSplineSpec::uniform(m, -1.0, 0.5, 2.0);
        for (int i = 0; i < 50; ++i) {
            const double t = -1.1 + i * (0.5 * m + 0.2) / 50.0;
            CHECK(bspline_classical(spec, t) ==
                  Catch::Approx(cox_de_boor_bspline(spec.knots, m, t)).margin(1e-10));
        }
    }
}
