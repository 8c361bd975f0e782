#pragma once

// L^p interpolation splines by convex dual minimization. The dual objective
//   D(mu) = (1/p*) [ sum_k |c_k(mu)|^{p*} + integral |v_mu|^{p*} ] - mu . alpha,
//   c_k(mu) = sum_l mu_l <jP_k, e'_l>,  v_mu(th) = sum_l mu_l <jLambda_m(.,th), e'_l>,
// is minimized with damped Newton steps (Barzilai-Borwein fallback); its
// gradient component l is exactly <j sigma_p(mu), e'_l> - alpha_l, so the
// stopping test certifies the interpolation constraints directly. The spline
// and its m-th derivative are then evaluated from the stationary mu.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "banachic/core_maps.hpp"
#include "banachic/errors.hpp"
#include "banachic/functionals.hpp"
#include "banachic/peano.hpp"
#include "banachic/quadrature.hpp"

namespace banachic {

// Interpolation data: functionals e'_l and targets alpha_l.
struct ConstraintSet {
    std::vector<DualFunctional> functionals;
    std::vector<double> targets;

    static ConstraintSet at_sites(const std::vector<double>& sites,
                                  const std::vector<double>& targets) {
        if (sites.size() != targets.size())
            throw configuration_error("ConstraintSet: site/target count mismatch");
        ConstraintSet c;
        c.functionals.reserve(sites.size());
        for (double s : sites) c.functionals.push_back(DualFunctional::dirac(s));
        c.targets = targets;
        return c;
    }

    std::size_t size() const { return functionals.size(); }

    std::vector<double> all_sites() const {
        std::vector<double> s;
        for (const DualFunctional& e : functionals)
            for (const DiracTerm& t : e.terms) s.push_back(t.site);
        return s;
    }
};

struct SolveOptions {
    double tol = 1e-9;   // sup-norm bound on the dual gradient (constraint residual)
    int max_iter = 200;
    int panel_order = 16;
    double quad_tol = 1e-11;
    int quad_depth = 12;
    std::vector<double> initial_mu;  // empty: start from the p = 2 Gram solution
};

struct SplineSolution {
    ProblemSpace space;
    ConstraintSet constraints;
    std::vector<double> mu;
    int iterations = 0;
    double residual = 0.0;   // sup-norm of the dual gradient at mu
    double dual_value = 0.0;
    bool fallback_used = false;
};

namespace detail {

// Pairings and quadrature shared by all dual evaluations of one
// (space, constraints) pair.
class DualAssembly {
public:
    DualAssembly(const ProblemSpace& space, const ConstraintSet& cons, const SolveOptions& opt)
        : space_(&space), cons_(&cons), kernel_(space) {
        n1_ = cons.size();
        if (n1_ == 0) throw configuration_error("spline_solver: no constraints");
        if (cons.functionals.size() != cons.targets.size())
            throw configuration_error("spline_solver: functional/target count mismatch");
        for (const DualFunctional& e : cons.functionals)
            check_functional(space, e, "spline_solver: constraint");
        m_ = space.dual_polynomials().size();
        R_.resize(m_ * n1_);
        for (std::size_t k = 0; k < m_; ++k)
            for (std::size_t l = 0; l < n1_; ++l)
                R_[k * n1_ + l] = cons.functionals[l].apply(space.dual_polynomials()[k]);
        std::vector<double> interior = space.lambda_sites();
        const std::vector<double> sites = cons.all_sites();
        interior.insert(interior.end(), sites.begin(), sites.end());
        rule_ = QuadratureRule::over(-space.a(), space.a(), interior);
        rule_.panel_order = opt.panel_order;
        rule_.tolerance = opt.quad_tol;
        rule_.max_depth = opt.quad_depth;
    }

    static void check_functional(const ProblemSpace& space, const DualFunctional& e,
                                 const char* who) {
        if (e.terms.empty()) throw std::domain_error(std::string(who) + ": empty functional");
        for (const DiracTerm& t : e.terms) space.check_site(t.site, who);
    }

    std::size_t n1() const { return n1_; }
    std::size_t m() const { return m_; }
    double R(std::size_t k, std::size_t l) const { return R_[k * n1_ + l]; }
    const QuadratureRule& rule() const { return rule_; }
    const ProblemSpace& space() const { return *space_; }
    const ConstraintSet& constraints() const { return *cons_; }

    void eval_W(double theta, double* w) const {
        for (std::size_t l = 0; l < n1_; ++l)
            w[l] = peano_pairing(kernel_, cons_->functionals[l], theta);
    }

    std::vector<double> coefficients_c(const std::vector<double>& mu) const {
        std::vector<double> c(m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k)
            for (std::size_t l = 0; l < n1_; ++l) c[k] += mu[l] * R(k, l);
        return c;
    }

    double v_at(double theta, const std::vector<double>& mu) const {
        std::vector<double> w(n1_);
        eval_W(theta, w.data());
        double v = 0.0;
        for (std::size_t l = 0; l < n1_; ++l) v += mu[l] * w[l];
        return v;
    }

    double objective(const std::vector<double>& mu) const {
        const double ps = space_->p_star();
        const std::vector<double> c = coefficients_c(mu);
        double acc = 0.0;
        for (double ck : c) acc += std::pow(std::abs(ck), ps);
        std::vector<double> w(n1_);
        acc += integrate(rule_, [&](double th) {
            eval_W(th, w.data());
            double v = 0.0;
            for (std::size_t l = 0; l < n1_; ++l) v += mu[l] * w[l];
            return std::pow(std::abs(v), ps);
        });
        double lin = 0.0;
        for (std::size_t l = 0; l < n1_; ++l) lin += mu[l] * cons_->targets[l];
        return acc / ps - lin;
    }

    void gradient(const std::vector<double>& mu, std::vector<double>& grad) const {
        const double ps = space_->p_star();
        grad.assign(n1_, 0.0);
        std::vector<double> cpart;
        std::vector<double> w(n1_);
        integrate_vector(rule_, n1_, [&](double th, double* out) {
            eval_W(th, w.data());
            double v = 0.0;
            for (std::size_t l = 0; l < n1_; ++l) v += mu[l] * w[l];
            const double av = signed_power(v, ps);
            for (std::size_t l = 0; l < n1_; ++l) out[l] = av * w[l];
        }, cpart);
        const std::vector<double> c = coefficients_c(mu);
        for (std::size_t l = 0; l < n1_; ++l) {
            double g = cpart[l] - cons_->targets[l];
            for (std::size_t k = 0; k < m_; ++k) g += signed_power(c[k], ps) * R(k, l);
            grad[l] = g;
        }
    }

    // Gradient and Hessian in one integration sweep. For p* < 2 the Hessian
    // weight |v|^{p*-2} blows up at zeros of v; it is clamped at a floor tied
    // to the sampled scale of v, and the Newton loop regularizes and line
    // searches on top of that.
    void gradient_hessian(const std::vector<double>& mu, std::vector<double>& grad,
                          Eigen::MatrixXd& H) const {
        const double ps = space_->p_star();
        const std::size_t n = n1_;
        const std::size_t dim = n + n * (n + 1) / 2;

        double floor_v = 0.0;
        if (ps < 2.0) {
            double vscale = 0.0;
            const double a = space_->a();
            for (int i = 0; i < 64; ++i) {
                const double th = -a + (i + 0.5) * (2.0 * a) / 64.0;
                vscale = std::max(vscale, std::abs(v_at(th, mu)));
            }
            floor_v = 1e-12 * (1.0 + vscale);
        }

        std::vector<double> acc;
        std::vector<double> w(n);
        integrate_vector(rule_, dim, [&](double th, double* out) {
            eval_W(th, w.data());
            double v = 0.0;
            for (std::size_t l = 0; l < n; ++l) v += mu[l] * w[l];
            const double av = std::abs(v);
            const double g = signed_power(v, ps);
            const double weight =
                (ps >= 2.0) ? std::pow(av, ps - 2.0) : std::pow(std::max(av, floor_v), ps - 2.0);
            for (std::size_t l = 0; l < n; ++l) out[l] = g * w[l];
            std::size_t idx = n;
            for (std::size_t l = 0; l < n; ++l)
                for (std::size_t j = l; j < n; ++j) out[idx++] = weight * w[l] * w[j];
        }, acc);

        const std::vector<double> c = coefficients_c(mu);
        double cmax = 0.0;
        for (double ck : c) cmax = std::max(cmax, std::abs(ck));
        const double floor_c = 1e-12 * (1.0 + cmax);

        grad.assign(n, 0.0);
        for (std::size_t l = 0; l < n; ++l) {
            double g = acc[l] - cons_->targets[l];
            for (std::size_t k = 0; k < m_; ++k) g += signed_power(c[k], ps) * R(k, l);
            grad[l] = g;
        }

        H.setZero(n, n);
        std::size_t idx = n;
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t j = l; j < n; ++j) {
                H(l, j) = acc[idx];
                H(j, l) = acc[idx];
                ++idx;
            }
        for (std::size_t k = 0; k < m_; ++k) {
            const double av = std::abs(c[k]);
            const double weight = (ps >= 2.0) ? std::pow(av, ps - 2.0)
                                              : std::pow(std::max(av, floor_c), ps - 2.0);
            for (std::size_t l = 0; l < n; ++l)
                for (std::size_t j = 0; j < n; ++j) H(l, j) += weight * R(k, l) * R(k, j);
        }
        H *= (ps - 1.0);
    }

    // p = 2 Gram of A_2 pairings: G_{lj} = sum_k <P_k,e_l><P_k,e_j> +
    // integral W_l W_j. Used for the independence check and as the Newton
    // starting point.
    Eigen::MatrixXd gram2() const {
        const std::size_t n = n1_;
        const std::size_t dim = n * (n + 1) / 2;
        std::vector<double> acc;
        std::vector<double> w(n);
        integrate_vector(rule_, dim, [&](double th, double* out) {
            eval_W(th, w.data());
            std::size_t idx = 0;
            for (std::size_t l = 0; l < n; ++l)
                for (std::size_t j = l; j < n; ++j) out[idx++] = w[l] * w[j];
        }, acc);
        Eigen::MatrixXd G(n, n);
        std::size_t idx = 0;
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t j = l; j < n; ++j) {
                double g = acc[idx++];
                for (std::size_t k = 0; k < m_; ++k) g += R(k, l) * R(k, j);
                G(l, j) = g;
                G(j, l) = g;
            }
        return G;
    }

    const PeanoKernel& kernel() const { return kernel_; }

private:
    const ProblemSpace* space_;
    const ConstraintSet* cons_;
    PeanoKernel kernel_;
    std::size_t n1_ = 0;
    std::size_t m_ = 0;
    std::vector<double> R_;  // row k, column l: <jP_k, e'_l>
    QuadratureRule rule_;
};

inline double sup_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace detail

/// D(mu); convex, with minimizers exactly the dual coefficients of sigma_p.
inline double dual_objective(const ProblemSpace& space, const ConstraintSet& cons,
                             const std::vector<double>& mu, const SolveOptions& opt = {}) {
    detail::DualAssembly assembly(space, cons, opt);
    if (mu.size() != cons.size())
        throw configuration_error("dual_objective: mu size mismatch");
    return assembly.objective(mu);
}

/// Gradient of D at mu; component l equals <j sigma_p(mu), e'_l> - alpha_l.
inline std::vector<double> dual_gradient(const ProblemSpace& space, const ConstraintSet& cons,
                                         const std::vector<double>& mu,
                                         const SolveOptions& opt = {}) {
    detail::DualAssembly assembly(space, cons, opt);
    if (mu.size() != cons.size())
        throw configuration_error("dual_gradient: mu size mismatch");
    std::vector<double> g;
    assembly.gradient(mu, g);
    return g;
}

/// Objective of the interpolation problem evaluated on the mu-parameterized
/// spline: sum_k |lambda_k(sigma)|^p + integral |sigma^(m)|^p
/// = sum_k |c_k|^{p*} + integral |v_mu|^{p*}.
inline double primal_objective(const ProblemSpace& space, const ConstraintSet& cons,
                               const std::vector<double>& mu, const SolveOptions& opt = {}) {
    detail::DualAssembly assembly(space, cons, opt);
    const double ps = space.p_star();
    double acc = 0.0;
    for (double ck : assembly.coefficients_c(mu)) acc += std::pow(std::abs(ck), ps);
    acc += integrate(assembly.rule(),
                     [&](double th) { return std::pow(std::abs(assembly.v_at(th, mu)), ps); });
    return acc;
}

/// Minimize D: damped Newton with Armijo line search, Tikhonov-regularized
/// when p* < 2 or factorization fails, switching to Barzilai-Borwein descent
/// after three failed Newton steps. Start point is the p = 2 Gram solution.
/// Throws degeneracy_error for dependent constraints (A_2 Gram condition
/// above 1e12) and convergence_error when the budget runs out.
inline SplineSolution solve(const ProblemSpace& space, const ConstraintSet& cons,
                            const SolveOptions& opt = {}) {
    detail::DualAssembly assembly(space, cons, opt);
    const std::size_t n1 = cons.size();
    const double ps = space.p_star();

    const Eigen::MatrixXd G2 = assembly.gram2();
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(G2);
        const double smax = svd.singularValues()(0);
        const double smin = svd.singularValues()(n1 - 1);
        if (!(smin > 0.0) || smax / smin > 1e12)
            throw degeneracy_error("solve: constraint functionals are numerically dependent "
                                   "(A_2 Gram condition above 1e12)");
    }

    Eigen::VectorXd alpha(n1);
    for (std::size_t l = 0; l < n1; ++l) alpha(l) = cons.targets[l];

    std::vector<double> mu(n1);
    if (!opt.initial_mu.empty()) {
        if (opt.initial_mu.size() != n1)
            throw configuration_error("solve: initial_mu size mismatch");
        mu = opt.initial_mu;
    } else {
        const Eigen::VectorXd mu0 = G2.ldlt().solve(alpha);
        for (std::size_t l = 0; l < n1; ++l) mu[l] = mu0(l);
    }

    std::vector<double> grad;
    Eigen::MatrixXd H;
    std::vector<double> best_mu = mu;
    double best_res = std::numeric_limits<double>::infinity();
    int accepted = 0;
    int newton_failures = 0;
    bool newton_mode = true;
    bool fallback_used = false;

    // Barzilai-Borwein state and the non-monotone reference window
    std::vector<double> prev_mu, prev_grad;
    double bb_step = 1.0;
    std::vector<double> window;

    double fcur = assembly.objective(mu);

    for (int iter = 0; iter <= opt.max_iter; ++iter) {
        if (newton_mode)
            assembly.gradient_hessian(mu, grad, H);
        else
            assembly.gradient(mu, grad);

        const double res = detail::sup_norm(grad);
        if (res < best_res) {
            best_res = res;
            best_mu = mu;
        }
        if (res <= opt.tol) {
            SplineSolution sol{space, cons, mu, accepted, res, assembly.objective(mu),
                               fallback_used};
            return sol;
        }
        if (iter == opt.max_iter) break;

        std::vector<double> dir(n1);
        if (newton_mode) {
            Eigen::VectorXd g(n1);
            for (std::size_t l = 0; l < n1; ++l) g(l) = grad[l];
            double eps = (ps < 2.0) ? 1e-10 * H.trace() / static_cast<double>(n1) : 0.0;
            bool solved = false;
            Eigen::VectorXd d;
            for (int attempt = 0; attempt < 6 && !solved; ++attempt) {
                Eigen::MatrixXd Hreg = H;
                if (eps > 0.0)
                    Hreg += eps * Eigen::MatrixXd::Identity(n1, n1);
                Eigen::LLT<Eigen::MatrixXd> llt(Hreg);
                if (llt.info() == Eigen::Success) {
                    d = -llt.solve(g);
                    if (d.dot(g) < 0.0) {
                        solved = true;
                        break;
                    }
                }
                eps = (eps == 0.0) ? 1e-10 * std::max(1.0, H.trace() / n1) : eps * 100.0;
            }
            if (!solved) {
                ++newton_failures;
                if (newton_failures >= 3) {
                    newton_mode = false;
                    fallback_used = true;
                }
                continue;
            }
            for (std::size_t l = 0; l < n1; ++l) dir[l] = d(l);
        } else {
            double step = bb_step;
            if (!prev_mu.empty()) {
                double sts = 0.0, sty = 0.0;
                for (std::size_t l = 0; l < n1; ++l) {
                    const double s = mu[l] - prev_mu[l];
                    const double y = grad[l] - prev_grad[l];
                    sts += s * s;
                    sty += s * y;
                }
                step = (sty > 1e-300) ? sts / sty : 1.0 / std::max(1e-12, res);
            } else {
                step = 1.0 / std::max(1e-12, res);
            }
            step = std::clamp(step, 1e-12, 1e12);
            bb_step = step;
            for (std::size_t l = 0; l < n1; ++l) dir[l] = -step * grad[l];
        }

        double slope = 0.0;
        for (std::size_t l = 0; l < n1; ++l) slope += grad[l] * dir[l];

        double fref = fcur;
        if (!newton_mode)
            for (double fw : window) fref = std::max(fref, fw);

        double t = 1.0;
        bool moved = false;
        std::vector<double> trial(n1);
        for (int bt = 0; bt < 40; ++bt) {
            for (std::size_t l = 0; l < n1; ++l) trial[l] = mu[l] + t * dir[l];
            const double ft = assembly.objective(trial);
            if (ft <= fref + 1e-4 * t * slope) {
                prev_mu = mu;
                prev_grad = grad;
                mu = trial;
                fcur = ft;
                window.push_back(ft);
                if (window.size() > 5) window.erase(window.begin());
                moved = true;
                ++accepted;
                break;
            }
            t *= 0.5;
        }
        if (!moved) {
            if (newton_mode) {
                ++newton_failures;
                if (newton_failures >= 3) {
                    newton_mode = false;
                    fallback_used = true;
                }
            } else {
                break;  // descent stalled; report best
            }
        }
    }

    throw convergence_error("solve: dual Newton did not reach tolerance " +
                                std::to_string(opt.tol) + " (best residual " +
                                std::to_string(best_res) + ")",
                            best_mu, best_res);
}

/// sigma_p(t) = sum_k P_k(t) alpha_{p*}(c_k) + integral Lambda_m(t,th)
/// alpha_{p*}(v_mu(th)) dth, with breakpoints at the constraint sites, the
/// lambda sites, and t.
inline double spline_eval(const SplineSolution& sol, double t) {
    const ProblemSpace& sp = sol.space;
    sp.check_site(t, "spline_eval: t");
    SolveOptions opt;
    detail::DualAssembly assembly(sp, sol.constraints, opt);
    const double ps = sp.p_star();
    const std::vector<double> c = assembly.coefficients_c(sol.mu);
    double value = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
        value += sp.dual_polynomials()[k](t) * signed_power(c[k], ps);
    const PeanoKernel kernel(sp);
    const QuadratureRule rule = assembly.rule().merged({t});
    value += integrate(rule, [&](double th) {
        return kernel(t, th) * signed_power(assembly.v_at(th, sol.mu), ps);
    });
    return value;
}

/// sigma_p^(m)(t) = alpha_{p*}( sum_l mu_l <jLambda_m(., t), e'_l> ); closed
/// form, no quadrature.
inline double spline_deriv_m(const SplineSolution& sol, double t) {
    const ProblemSpace& sp = sol.space;
    sp.check_site(t, "spline_deriv_m: t");
    const PeanoKernel kernel(sp);
    double v = 0.0;
    for (std::size_t l = 0; l < sol.mu.size(); ++l)
        v += sol.mu[l] * detail::peano_pairing(kernel, sol.constraints.functionals[l], t);
    return signed_power(v, sp.p_star());
}

}  // namespace banachic
