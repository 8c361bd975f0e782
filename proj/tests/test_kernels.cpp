#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "banachic/kernels.hpp"

using namespace banachic;

TEST_CASE("R_p pairing") {
    SECTION("p = 2 diagonal is the dual-polynomial square sum") {
        const ProblemSpace space(1.0, 2, 2.0, std::vector<double>{-0.5, 0.5});
        const KernelContext ctx(space);
        const double s = 0.3;
        double expect = 0.0;
        for (const Polynomial& P : space.dual_polynomials()) expect += P(s) * P(s);
        const DualFunctional d = DualFunctional::dirac(s);
        CHECK(kernel_Rp(ctx, d, d) == Catch::Approx(expect).margin(1e-14));
    }
    SECTION("vanishing polynomial pairings give zero") {
        const ProblemSpace space(1.0, 1, 3.0, std::vector<double>{0.0});
        const KernelContext ctx(space);
        // P_0 = 1, so a zero-mass combination pairs to zero with it
        const DualFunctional e{{{1.0, 0.4}, {-1.0, -0.2}}};
        CHECK(kernel_Rp(ctx, e, DualFunctional::dirac(0.3)) ==
              Catch::Approx(0.0).margin(1e-14));
    }
    SECTION("p = 3 scaled Dirac") {
        const ProblemSpace space(1.0, 1, 3.0, std::vector<double>{0.0});
        const KernelContext ctx(space);
        const DualFunctional e = DualFunctional::dirac(0.6, 2.0);
        // alpha_{1.5}(2) * 2 = 2 sqrt(2)
        CHECK(kernel_Rp(ctx, e, e) == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-14));
    }
    SECTION("nonlinear in the first argument") {
        const ProblemSpace space(1.0, 1, 3.0, std::vector<double>{0.0});
        const KernelContext ctx(space);
        const DualFunctional e = DualFunctional::dirac(0.5);
        const DualFunctional e2 = DualFunctional::dirac(0.5, 2.0);
        const DualFunctional f = DualFunctional::dirac(0.3);
        CHECK(kernel_Rp(ctx, e2, f) != Catch::Approx(2.0 * kernel_Rp(ctx, e, f)));
    }
}

TEST_CASE("C_p pairing") {
    SECTION("order 1 closed form min(s,t)") {
        for (double p : {1.5, 2.0, 3.0}) {
            const ProblemSpace space(1.0, 1, p, std::vector<double>{0.0});
            const KernelContext ctx(space);
            for (double s : {0.2, 0.55, 0.9})
                for (double t : {0.1, 0.55, 0.8})
                    CHECK(kernel_Cp(ctx, DualFunctional::dirac(s), DualFunctional::dirac(t)) ==
                          Catch::Approx(std::min(s, t)).margin(1e-9));
        }
    }
    SECTION("functional at a lambda node gives zero") {
        const ProblemSpace space(1.0, 2, 3.0, std::vector<double>{-0.5, 0.5});
        const KernelContext ctx(space);
        CHECK(kernel_Cp(ctx, DualFunctional::dirac(-0.5), DualFunctional::dirac(0.2)) ==
              Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("p = 2 symmetry") {
        const ProblemSpace space(1.0, 2, 2.0, std::vector<double>{-0.5, 0.5});
        const KernelContext ctx(space);
        const DualFunctional e = DualFunctional::dirac(0.35);
        const DualFunctional f = DualFunctional::dirac(-0.15);
        CHECK(kernel_Cp(ctx, e, f) == Catch::Approx(kernel_Cp(ctx, f, e)).margin(1e-10));
    }
}

TEST_CASE("A_p pairing") {
    SECTION("order 1: 1 + min(s,t)") {
        const ProblemSpace space(1.0, 1, 2.5, std::vector<double>{0.0});
        const KernelContext ctx(space);
        CHECK(kernel_Ap(ctx, 0.4, 0.7) == Catch::Approx(1.0 + 0.4).margin(1e-9));
    }
    SECTION("diagonal at a lambda node keeps only the polynomial part") {
        const ProblemSpace space(1.0, 2, 3.0, std::vector<double>{-0.5, 0.5});
        const KernelContext ctx(space);
        const double ps = space.p_star();
        const double sk = -0.5;
        double expect = 0.0;
        for (const Polynomial& P : space.dual_polynomials())
            expect += P(sk) * signed_power(P(sk), ps);
        CHECK(kernel_Ap(ctx, sk, sk) == Catch::Approx(expect).margin(1e-10));
    }
}

TEST_CASE("C_p diagonal identity") {
    SECTION("order 1 diagonal is s") {
        const ProblemSpace space(1.0, 1, 3.0, std::vector<double>{0.0});
        const KernelContext ctx(space);
        CHECK(cp_diag(ctx, 0.6) == Catch::Approx(0.6).margin(1e-9));
        CHECK(cp_diag(ctx, 0.0 + 1e-14) == Catch::Approx(0.0).margin(1e-10));
    }
    SECTION("matches the pairing") {
        for (int m : {1, 2}) {
            std::vector<double> nodes(m);
            for (int k = 0; k < m; ++k) nodes[k] = -1.0 + 2.0 * (k + 1) / (m + 1);
            const ProblemSpace space(1.0, m, 2.0, nodes);
            const KernelContext ctx(space);
            for (double s : {-0.45, 0.25, 0.75}) {
                const DualFunctional d = DualFunctional::dirac(s);
                CHECK(cp_diag(ctx, s) == Catch::Approx(kernel_Cp(ctx, d, d)).margin(1e-8));
            }
        }
    }
}

TEST_CASE("exponent transform between C_p and C_q") {
    SECTION("p = q collapses to the identity") {
        const std::vector<double> nodes{-0.5, 0.5};
        const ProblemSpace sp(1.0, 2, 3.0, nodes);
        const KernelContext ctx(sp);
        const auto [direct, transformed] = cq_from_cp(ctx, ctx, 0.3, -0.2);
        CHECK(direct == Catch::Approx(transformed).margin(1e-15));
    }
    SECTION("(2,3) agreement on a grid") {
        const std::vector<double> nodes{-0.5, 0.5};
        const ProblemSpace sp(1.0, 2, 2.0, nodes);
        const ProblemSpace sq(1.0, 2, 3.0, nodes);
        const KernelContext cp_ctx(sp), cq_ctx(sq);
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j) {
                const auto [direct, transformed] =
                    cq_from_cp(cp_ctx, cq_ctx, -1.0 + (i + 0.5) / 10.0, -1.0 + (j + 0.5) / 10.0);
                CHECK(std::abs(direct - transformed) <= 1e-10);
            }
    }
    SECTION("swap exponent inverts the transform") {
        const double p = 1.5, q = 4.0;
        const double r_pq = 1.0 + (p - 1.0) / (q - 1.0);
        const double r_qp = 1.0 + (q - 1.0) / (p - 1.0);
        for (double x : {-2.0, -0.3, 0.0, 0.7, 5.0})
            CHECK(signed_power(signed_power(x, r_pq), r_qp) == Catch::Approx(x).margin(1e-12));
    }
    SECTION("mismatched spaces are rejected") {
        const ProblemSpace sp(1.0, 2, 2.0, std::vector<double>{-0.5, 0.5});
        const ProblemSpace sq(1.0, 2, 3.0, std::vector<double>{-0.4, 0.5});
        const KernelContext a(sp), b(sq);
        CHECK_THROWS_AS(cq_from_cp(a, b, 0.1, 0.2), configuration_error);
    }
}

TEST_CASE("kernel argument validation") {
    const ProblemSpace space(1.0, 1, 2.0, std::vector<double>{0.0});
    const KernelContext ctx(space);
    CHECK_THROWS_AS(kernel_Ap(ctx, 1.2, 0.0), std::domain_error);
    CHECK_THROWS_AS(kernel_Cp(ctx, DualFunctional::dirac(-1.0), DualFunctional::dirac(0.0)),
                    std::domain_error);
    CHECK_THROWS_AS(kernel_Rp(ctx, DualFunctional{}, DualFunctional::dirac(0.0)),
                    std::domain_error);
}
