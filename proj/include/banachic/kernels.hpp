#pragma once

// The banachic kernels R_p, C_p, A_p of the decomposition A_p = R_p + C_p,
// evaluated as pairings on Dirac-combination functionals, the C_p diagonal
// identity, and the exponent transform relating C_p to C_q. The kernels are
// nonlinear in e' (through alpha_{p*}), so they are exposed as pairings only,
// never as functions of one argument.

#include <cmath>
#include <utility>
#include <vector>

#include "banachic/core_maps.hpp"
#include "banachic/errors.hpp"
#include "banachic/functionals.hpp"
#include "banachic/peano.hpp"
#include "banachic/quadrature.hpp"

namespace banachic {

// Problem space plus the quadrature settings its kernel integrals use. The
// base rule's breakpoints always contain the lambda sites. Holds a pointer to
// the space, which must outlive the context.
class KernelContext {
public:
    explicit KernelContext(const ProblemSpace& space, int panel_order = 16, double tol = 1e-11,
                           int max_depth = 12)
        : space_(&space) {
        rule_ = QuadratureRule::over(-space.a(), space.a(), space.lambda_sites());
        rule_.panel_order = panel_order;
        rule_.tolerance = tol;
        rule_.max_depth = max_depth;
    }

    const ProblemSpace& space() const { return *space_; }
    const QuadratureRule& base_rule() const { return rule_; }

private:
    const ProblemSpace* space_;
    QuadratureRule rule_;
};

namespace detail {
inline void check_functional(const ProblemSpace& space, const DualFunctional& e,
                             const char* who) {
    if (e.terms.empty()) throw std::domain_error(std::string(who) + ": empty functional");
    for (const DiracTerm& t : e.terms) space.check_site(t.site, who);
}

inline std::vector<double> functional_sites(const DualFunctional& e, const DualFunctional& f) {
    std::vector<double> s;
    s.reserve(e.terms.size() + f.terms.size());
    for (const DiracTerm& t : e.terms) s.push_back(t.site);
    for (const DiracTerm& t : f.terms) s.push_back(t.site);
    return s;
}
}  // namespace detail

/// <R_p e', f'> = sum_k alpha_{p*}(<jP_k, e'>) <jP_k, f'>.
inline double kernel_Rp(const KernelContext& ctx, const DualFunctional& e,
                        const DualFunctional& f) {
    const ProblemSpace& sp = ctx.space();
    detail::check_functional(sp, e, "kernel_Rp: e");
    detail::check_functional(sp, f, "kernel_Rp: f");
    const double ps = sp.p_star();
    double acc = 0.0;
    for (const Polynomial& P : sp.dual_polynomials())
        acc += signed_power(e.apply(P), ps) * f.apply(P);
    return acc;
}

/// <C_p e', f'> = integral <jLambda_m(.,th), f'> alpha_{p*}(<jLambda_m(.,th), e'>) dth,
/// with quadrature breakpoints at the lambda sites and at every site of e, f.
inline double kernel_Cp(const KernelContext& ctx, const DualFunctional& e,
                        const DualFunctional& f) {
    const ProblemSpace& sp = ctx.space();
    detail::check_functional(sp, e, "kernel_Cp: e");
    detail::check_functional(sp, f, "kernel_Cp: f");
    const PeanoKernel kernel(sp);
    const double ps = sp.p_star();
    const QuadratureRule rule = ctx.base_rule().merged(detail::functional_sites(e, f));
    return integrate(rule, [&](double th) {
        return detail::peano_pairing(kernel, f, th) *
               signed_power(detail::peano_pairing(kernel, e, th), ps);
    });
}

/// <A_p delta_s, delta_t> = <R_p delta_s, delta_t> + <C_p delta_s, delta_t>.
inline double kernel_Ap(const KernelContext& ctx, double s, double t) {
    const DualFunctional ds = DualFunctional::dirac(s);
    const DualFunctional dt = DualFunctional::dirac(t);
    return kernel_Rp(ctx, ds, dt) + kernel_Cp(ctx, ds, dt);
}

/// Diagonal identity: integral |d^m/dt^m C_2(t, s)|^{p*} dt, with the m-th
/// t-derivative evaluated analytically as Lambda_m(s, t). Agrees with
/// kernel_Cp(delta_s, delta_s).
inline double cp_diag(const KernelContext& ctx, double s) {
    const ProblemSpace& sp = ctx.space();
    sp.check_site(s, "cp_diag: s");
    const PeanoKernel kernel(sp);
    const double ps = sp.p_star();
    const QuadratureRule rule = ctx.base_rule().merged({s});
    return integrate(rule, [&](double t) { return std::pow(std::abs(kernel(s, t)), ps); });
}

/// Both routes to d^m/dt^m C_q(t, s): evaluated directly in the q-context as
/// alpha_{q*}(Lambda_m(s,t)), and transformed from the p-context derivative
/// through alpha_{1+(p-1)/(q-1)}. Returns {direct, transformed}; the two
/// agree for contexts sharing (a, m, lambda).
inline std::pair<double, double> cq_from_cp(const KernelContext& ctx_p,
                                            const KernelContext& ctx_q, double s, double t) {
    const ProblemSpace& sp = ctx_p.space();
    const ProblemSpace& sq = ctx_q.space();
    if (!sp.same_geometry(sq))
        throw configuration_error("cq_from_cp: contexts disagree on (a, m, lambda)");
    sp.check_site(s, "cq_from_cp: s");
    sp.check_site(t, "cq_from_cp: t");
    const double p = sp.p();
    const double q = sq.p();
    const PeanoKernel kp(sp);
    const PeanoKernel kq(sq);
    const double direct = signed_power(kq(s, t), sq.p_star());
    const double transformed =
        signed_power(signed_power(kp(s, t), sp.p_star()), 1.0 + (p - 1.0) / (q - 1.0));
    return {direct, transformed};
}

}  // namespace banachic
