#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "banachic/quadrature.hpp"

using namespace banachic;

TEST_CASE("gauss rules") {
    CHECK_THROWS_AS(gauss_legendre(1), std::domain_error);
    for (int order : {2, 5, 16, 31}) {
        const GaussRule& g = gauss_legendre(order);
        double wsum = 0.0;
        for (std::size_t i = 0; i < g.weights.size(); ++i) {
            wsum += g.weights[i];
            CHECK(g.nodes[i] == Catch::Approx(-g.nodes[order - 1 - i]).margin(1e-14));
        }
        CHECK(wsum == Catch::Approx(2.0).margin(1e-13));
    }
}

TEST_CASE("integrate basic values") {
    const QuadratureRule rule = QuadratureRule::over(-1.0, 1.0);
    CHECK(integrate(rule, [](double) { return 1.0; }) == Catch::Approx(2.0));

    const QuadratureRule kinked = QuadratureRule::over(-1.0, 1.0, {0.5});
    CHECK(integrate(kinked, [](double t) { return t < 0.5 ? 0.5 - t : 0.0; }) ==
          Catch::Approx(1.125).margin(1e-12));

    const QuadratureRule absrule = QuadratureRule::over(-1.0, 1.0, {0.0});
    CHECK(integrate(absrule, [](double t) { return std::pow(std::abs(t), 1.5); }) ==
          Catch::Approx(0.8).margin(1e-10));
}

TEST_CASE("integrate error handling") {
    const QuadratureRule rule = QuadratureRule::over(0.0, 1.0);
    CHECK_THROWS_AS(integrate(rule, [](double t) { return 1.0 / (t - t); }), integrand_error);
    try {
        integrate(rule, [](double t) { return t > 0.5 ? std::nan("") : 0.0; });
        FAIL("expected integrand_error");
    } catch (const integrand_error& e) {
        CHECK(e.location > 0.5);
        CHECK(e.location < 1.0);
    }
}

TEST_CASE("max depth exhaustion is reported, value still usable") {
    QuadratureRule rule = QuadratureRule::over(0.0, 1.0);  // jump at 0.3 not a breakpoint
    rule.tolerance = 1e-15;
    rule.max_depth = 6;
    const IntegrationResult res =
        integrate_full(rule, [](double t) { return t > 0.3 ? 1.0 : 0.0; });
    CHECK_FALSE(res.converged);
    CHECK(res.value == Catch::Approx(0.7).margin(1e-2));
}

TEST_CASE("breakpoint handling") {
    const QuadratureRule rule = QuadratureRule::over(-1.0, 1.0, {0.5, 0.5, -2.0, 0.9999999999999999});
    CHECK(rule.breakpoints.front() == -1.0);
    CHECK(rule.breakpoints.back() == 1.0);
    for (std::size_t i = 0; i + 1 < rule.breakpoints.size(); ++i)
        CHECK(rule.breakpoints[i] < rule.breakpoints[i + 1]);
    CHECK_THROWS_AS(QuadratureRule::over(1.0, 1.0), std::domain_error);
}

TEST_CASE("vector integration agrees with scalar") {
    const QuadratureRule rule = QuadratureRule::over(-1.0, 1.0, {0.25});
    std::vector<double> out;
    const bool ok = integrate_vector(rule, 2, [](double t, double* v) {
        v[0] = t * t;
        v[1] = std::abs(t - 0.25);
    }, out);
    CHECK(ok);
    CHECK(out[0] == Catch::Approx(2.0 / 3.0).margin(1e-12));
    const double exact = 0.5 * (0.75 * 0.75 + 1.25 * 1.25);
    CHECK(out[1] == Catch::Approx(exact).margin(1e-12));
}
