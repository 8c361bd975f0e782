#pragma once

// Peano kernel Lambda_m(s, t) of the representation
//   x(s) = sum_k lambda_k(x) P_k(s) + integral_{-a}^{a} Lambda_m(s, t) x^(m)(t) dt
// together with the factorization representer G built from it. Lambda_m is
// piecewise polynomial of degree m-1 in t, with breakpoints at the lambda
// sites and at s, and Lambda_m(s_k, .) vanishes identically at every
// point-evaluation node s_k.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "banachic/functionals.hpp"
#include "banachic/quadrature.hpp"

namespace banachic {

/// (u)_+^k: u^k for u > 0, else 0. The value at u = 0 is 0 for every k;
/// this makes the k = 0 indicator right-open, which breakpoint and lattice
/// tests rely on.
inline double truncated_power(double u, int k) {
    if (k < 0) throw std::domain_error("truncated_power: negative exponent");
    if (!(u > 0.0)) return 0.0;
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= u;
    return r;
}

// Evaluator for Lambda_m(s, t). Holds a pointer to its ProblemSpace, which
// must outlive the kernel.
class PeanoKernel {
public:
    explicit PeanoKernel(const ProblemSpace& space) : space_(&space) {
        inv_factorial_ = 1.0;
        for (int j = 2; j <= space.m() - 1; ++j) inv_factorial_ /= j;
    }

    double operator()(double s, double t) const {
        return space_->point_lambdas() ? eval_closed(s, t) : eval_subtraction(s, t);
    }

    // Closed form for point-evaluation functionals:
    //   [(s-t)_+^{m-1} - sum_k (s_k-t)_+^{m-1} L_k(s)] / (m-1)!
    double eval_closed(double s, double t) const {
        check(s, t);
        const int m = space_->m();
        const std::vector<double>& nodes = space_->point_nodes();
        const std::vector<Polynomial>& basis = space_->dual_polynomials();
        double acc = truncated_power(s - t, m - 1);
        for (std::size_t k = 0; k < nodes.size(); ++k)
            acc -= truncated_power(nodes[k] - t, m - 1) * basis[k](s);
        return acc * inv_factorial_;
    }

    // Remainder of the dual-basis projection applied to (.-t)_+^{m-1}/(m-1)!;
    // valid for arbitrary Dirac-combination functionals.
    double eval_subtraction(double s, double t) const {
        check(s, t);
        const int m = space_->m();
        const double invf = inv_factorial_;
        auto g = [m, invf, t](double u) { return truncated_power(u - t, m - 1) * invf; };
        double acc = g(s);
        const std::vector<DualFunctional>& lambdas = space_->lambdas();
        const std::vector<Polynomial>& basis = space_->dual_polynomials();
        for (std::size_t k = 0; k < lambdas.size(); ++k) acc -= lambdas[k].apply(g) * basis[k](s);
        return acc;
    }

    const ProblemSpace& space() const { return *space_; }

private:
    const ProblemSpace* space_;
    double inv_factorial_;  // 1/(m-1)!

    void check(double s, double t) const {
        space_->check_site(s, "PeanoKernel: s");
        space_->check_site(t, "PeanoKernel: t");
    }
};

inline double peano_eval(const PeanoKernel& kernel, double s, double t) { return kernel(s, t); }

namespace detail {
/// <j Lambda_m(., theta), e'> = sum_j gamma_j Lambda_m(s_j, theta).
inline double peano_pairing(const PeanoKernel& kernel, const DualFunctional& e, double theta) {
    double acc = 0.0;
    for (const DiracTerm& t : e.terms) acc += t.weight * kernel(t.site, theta);
    return acc;
}
}  // namespace detail

// A function handed in together with its m-th derivative, as the
// representation formula consumes it.
struct SmoothFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv_m;
};

/// |x(s) - sum_k lambda_k(x) P_k(s) - integral Lambda_m(s,t) x^(m)(t) dt|.
/// Zero up to quadrature error for every admissible x; the workhorse
/// correctness check for the kernel machinery.
inline double representation_check(const ProblemSpace& space, const SmoothFunction& x, double s,
                                   int panel_order = 16, double tol = 1e-11, int max_depth = 12) {
    space.check_site(s, "representation_check: s");
    const PeanoKernel kernel(space);
    double lhs = x.value(s);
    const std::vector<Polynomial>& basis = space.dual_polynomials();
    for (std::size_t k = 0; k < space.lambdas().size(); ++k)
        lhs -= space.lambdas()[k].apply(x.value) * basis[k](s);
    std::vector<double> interior = space.lambda_sites();
    interior.push_back(s);
    QuadratureRule rule = QuadratureRule::over(-space.a(), space.a(), interior);
    rule.panel_order = panel_order;
    rule.tolerance = tol;
    rule.max_depth = max_depth;
    const double remainder =
        integrate(rule, [&](double t) { return kernel(s, t) * x.deriv_m(t); });
    return std::abs(lhs - remainder);
}

// G(t) = <j Lambda_m(., t), e'>: the L^{p*} representer with
//   integral G(t) x^(m)(t) dt = <j(x - sum_k lambda_k(x) P_k), e'>.
// Piecewise polynomial of degree m-1, continuity class C^{m-2} for m >= 2.
class SardRepresenter {
public:
    SardRepresenter(const ProblemSpace& space, DualFunctional e)
        : kernel_(space), e_(std::move(e)) {
        for (const DiracTerm& t : e_.terms) space.check_site(t.site, "sard_representer: site");
    }

    double operator()(double t) const { return detail::peano_pairing(kernel_, e_, t); }

    const DualFunctional& functional() const { return e_; }

    // Breakpoints of G: lambda sites plus the sites of e'.
    std::vector<double> breakpoints() const {
        std::vector<double> b = kernel_.space().lambda_sites();
        for (const DiracTerm& t : e_.terms) b.push_back(t.site);
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    }

private:
    PeanoKernel kernel_;
    DualFunctional e_;
};

/// The space must outlive the returned representer.
inline SardRepresenter sard_representer(const ProblemSpace& space, DualFunctional e) {
    return SardRepresenter(space, std::move(e));
}

}  // namespace banachic
