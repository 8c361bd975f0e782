#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "banachic/brute_force.hpp"
#include "banachic/kernels.hpp"
#include "banachic/spline_solver.hpp"

using namespace banachic;

namespace {
const std::vector<double> kSites{-0.75, -0.25, 0.3, 0.8};
const std::vector<double> kTargets{0.2, -0.4, 0.5, -0.1};
const std::vector<double> kLambdaNodes{-0.75, -0.25};

ProblemSpace default_space(double p) { return ProblemSpace(1.0, 2, p, kLambdaNodes); }
ConstraintSet default_cons() { return ConstraintSet::at_sites(kSites, kTargets); }
}  // namespace

TEST_CASE("dual objective") {
    const ProblemSpace space = default_space(3.0);
    const ConstraintSet cons = default_cons();
    CHECK(dual_objective(space, cons, {0.0, 0.0, 0.0, 0.0}) == Catch::Approx(0.0).margin(1e-15));

    SECTION("nonnegative with zero targets") {
        const ConstraintSet zero = ConstraintSet::at_sites(kSites, {0.0, 0.0, 0.0, 0.0});
        std::mt19937 rng(31u);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> mu(4);
            for (double& x : mu) x = dist(rng);
            CHECK(dual_objective(space, zero, mu) >= 0.0);
        }
    }
    SECTION("p = 2 scalar case is the explicit quadratic") {
        const ProblemSpace sp2(1.0, 1, 2.0, std::vector<double>{0.0});
        const KernelContext ctx(sp2);
        const double s = 0.5, alpha = 0.7;
        const double K = kernel_Ap(ctx, s, s);
        const ConstraintSet one = ConstraintSet::at_sites({s}, {alpha});
        for (double mu : {-1.0, 0.3, 2.0})
            CHECK(dual_objective(sp2, one, {mu}) ==
                  Catch::Approx(0.5 * mu * mu * K - mu * alpha).margin(1e-10));
        const SplineSolution sol = solve(sp2, one);
        CHECK(sol.mu[0] == Catch::Approx(alpha / K).margin(1e-10));
    }
}

TEST_CASE("dual gradient") {
    const ProblemSpace space = default_space(1.5);
    const ConstraintSet cons = default_cons();
    SECTION("at zero the gradient is minus the targets") {
        const std::vector<double> g = dual_gradient(space, cons, {0.0, 0.0, 0.0, 0.0});
        for (int l = 0; l < 4; ++l) CHECK(g[l] == Catch::Approx(-kTargets[l]).margin(1e-14));
    }
    SECTION("p = 2 gradient is G mu - alpha with the A_2 Gram") {
        const ProblemSpace sp2 = default_space(2.0);
        const KernelContext ctx(sp2);
        Eigen::MatrixXd G(4, 4);
        for (int l = 0; l < 4; ++l)
            for (int j = 0; j < 4; ++j) G(l, j) = kernel_Ap(ctx, kSites[l], kSites[j]);
        const std::vector<double> mu{0.4, -0.2, 0.9, -1.1};
        const std::vector<double> g = dual_gradient(sp2, cons, mu);
        for (int l = 0; l < 4; ++l) {
            double expect = -kTargets[l];
            for (int j = 0; j < 4; ++j) expect += G(l, j) * mu[j];
            CHECK(g[l] == Catch::Approx(expect).margin(1e-9));
        }
    }
    SECTION("vanishes at the solution") {
        const SplineSolution sol = solve(space, cons);
        const std::vector<double> g = dual_gradient(space, cons, sol.mu);
        for (double gl : g) CHECK(std::abs(gl) <= 1e-9);
    }
}

TEST_CASE("solve") {
    SECTION("zero targets give the zero spline") {
        const ProblemSpace space = default_space(3.0);
        const SplineSolution sol =
            solve(space, ConstraintSet::at_sites(kSites, {0.0, 0.0, 0.0, 0.0}));
        for (double m : sol.mu) CHECK(m == Catch::Approx(0.0).margin(1e-12));
        for (double t : {-0.5, 0.0, 0.6}) CHECK(spline_eval(sol, t) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("m point constraints at the lambda nodes reproduce the interpolating polynomial") {
        const ProblemSpace space(1.0, 2, 3.0, kLambdaNodes);
        const std::vector<double> y{0.7, -0.3};
        const SplineSolution sol =
            solve(space, ConstraintSet::at_sites(kLambdaNodes, y));
        // interpolating line through the two nodes
        const double slope = (y[1] - y[0]) / (kLambdaNodes[1] - kLambdaNodes[0]);
        for (double t : {-0.9, -0.5, 0.0, 0.5, 0.9})
            CHECK(spline_eval(sol, t) ==
                  Catch::Approx(y[0] + slope * (t - kLambdaNodes[0])).margin(1e-9));
    }
    SECTION("p = 2 takes one Newton step from a cold start") {
        const ProblemSpace space = default_space(2.0);
        SolveOptions opt;
        opt.initial_mu = {0.0, 0.0, 0.0, 0.0};
        const SplineSolution sol = solve(space, default_cons(), opt);
        CHECK(sol.iterations <= 1);
        CHECK(sol.residual <= 1e-9);
    }
    SECTION("duplicate constraint sites are degenerate") {
        CHECK_THROWS_AS(solve(default_space(2.0),
                              ConstraintSet::at_sites({0.1, 0.1, 0.5}, {1.0, 1.0, 0.0})),
                        degeneracy_error);
    }
    SECTION("constraint outside the interval") {
        CHECK_THROWS_AS(solve(default_space(2.0), ConstraintSet::at_sites({1.5}, {1.0})),
                        std::domain_error);
    }
    SECTION("exhausted budget carries the best iterate") {
        SolveOptions opt;
        opt.max_iter = 0;
        try {
            solve(default_space(3.0), default_cons(), opt);
            FAIL("expected convergence_error");
        } catch (const convergence_error& e) {
            CHECK(e.best_point.size() == 4);
            CHECK(e.residual > 0.0);
        }
    }
}

TEST_CASE("spline evaluation") {
    for (double p : {1.5, 2.0, 3.0}) {
        const ProblemSpace space = default_space(p);
        const SplineSolution sol = solve(space, default_cons());
        SECTION("interpolates the targets, p = " + std::to_string(p)) {
            for (std::size_t l = 0; l < kSites.size(); ++l)
                CHECK(spline_eval(sol, kSites[l]) == Catch::Approx(kTargets[l]).margin(1e-8));
        }
    }
    SECTION("p = 2 equals the kernel-expansion spline") {
        const ProblemSpace space = default_space(2.0);
        const SplineSolution sol = solve(space, default_cons());
        const KernelContext ctx(space);
        for (double t : {-0.6, -0.1, 0.45, 0.7}) {
            double expect = 0.0;
            for (std::size_t l = 0; l < kSites.size(); ++l)
                expect += sol.mu[l] * kernel_Ap(ctx, t, kSites[l]);
            CHECK(spline_eval(sol, t) == Catch::Approx(expect).margin(1e-9));
        }
    }
}

TEST_CASE("m-th derivative of the spline") {
    SECTION("zero targets") {
        const SplineSolution sol =
            solve(default_space(3.0), ConstraintSet::at_sites(kSites, {0.0, 0.0, 0.0, 0.0}));
        for (double t : {-0.5, 0.2, 0.7}) CHECK(spline_deriv_m(sol, t) == 0.0);
    }
    SECTION("p = 2 closed form") {
        const ProblemSpace space = default_space(2.0);
        const SplineSolution sol = solve(space, default_cons());
        const PeanoKernel kernel(space);
        for (double t : {-0.55, 0.05, 0.6}) {
            double expect = 0.0;
            for (std::size_t l = 0; l < kSites.size(); ++l)
                expect += sol.mu[l] * kernel(kSites[l], t);
            CHECK(spline_deriv_m(sol, t) == Catch::Approx(expect).margin(1e-12));
        }
    }
    SECTION("matches second differences of the spline") {
        // margin is loose for p != 2: the truncation constant of the central
        // stencil grows where alpha_{p*} flattens near zeros of v
        for (double p : {2.0, 3.0}) {
            const ProblemSpace space = default_space(p);
            const SplineSolution sol = solve(space, default_cons());
            const double h = 1e-3;
            for (double t : {-0.5, 0.05, 0.55}) {  // away from sites and nodes
                const double second = (spline_eval(sol, t + h) - 2.0 * spline_eval(sol, t) +
                                       spline_eval(sol, t - h)) /
                                      (h * h);
                const double margin = (p == 2.0) ? 1e-6 : 5e-3;
                CHECK(spline_deriv_m(sol, t) == Catch::Approx(second).margin(margin));
            }
        }
    }
}

TEST_CASE("brute force oracle, small grid") {
    const ProblemSpace space = default_space(3.0);
    SECTION("zero targets give the zero function") {
        OracleOptions opt;
        opt.grid_n = 200;
        const OracleResult res =
            brute_force_oracle(space, ConstraintSet::at_sites(kSites, {0.0, 0.0, 0.0, 0.0}), opt);
        for (double t : {-0.8, -0.1, 0.5}) CHECK(res.eval(t) == Catch::Approx(0.0).margin(1e-9));
        CHECK(res.objective == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("p = 2 tracks the solver at coarse resolution") {
        const ProblemSpace sp2 = default_space(2.0);
        const SplineSolution sol = solve(sp2, default_cons());
        OracleOptions opt;
        opt.grid_n = 500;
        const OracleResult res = brute_force_oracle(sp2, default_cons(), opt);
        for (double t : {-0.6, -0.2, 0.1, 0.5})
            CHECK(res.eval(t) == Catch::Approx(spline_eval(sol, t)).margin(2e-3));
    }
    SECTION("grid floor enforced") {
        OracleOptions opt;
        opt.grid_n = 50;
        CHECK_THROWS_AS(brute_force_oracle(space, default_cons(), opt), std::domain_error);
    }
}
