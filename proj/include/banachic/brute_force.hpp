#pragma once

// Independent verification path for the spline solver: discretize the primal
// problem with a piecewise-constant m-th derivative on a uniform grid plus m
// polynomial coefficients, and minimize the resulting convex program with an
// augmented-Lagrangian / Barzilai-Borwein loop. Shares no code with the dual
// Newton solver; the discrete minimizer is itself admissible, so its
// objective upper-bounds the continuous optimum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "banachic/core_maps.hpp"
#include "banachic/errors.hpp"
#include "banachic/functionals.hpp"
#include "banachic/spline_solver.hpp"

namespace banachic {

struct OracleOptions {
    int grid_n = 2000;             // derivative cells on (-a, a)
    double constraint_tol = 1e-6;  // sup-norm bound on the interpolation residual
    int max_outer = 60;
    int max_inner = 40000;
};

struct OracleResult {
    double a = 0.0;
    int m = 0;
    double p = 2.0;
    std::vector<double> edges;  // grid_n + 1 cell edges
    std::vector<double> poly;   // m monomial coefficients
    std::vector<double> deriv;  // grid_n cell values of x^(m)
    double objective = 0.0;
    double constraint_residual = 0.0;
    int outer_iterations = 0;
    long long inner_iterations = 0;

    double eval(double t) const {
        double acc = 0.0;
        for (std::size_t j = poly.size(); j-- > 0;) acc = acc * t + poly[j];
        double invf = 1.0;
        for (int j = 2; j <= m; ++j) invf /= j;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            if (t <= edges[i]) break;
            acc += deriv[i] * invf *
                   (truncated_power(t - edges[i], m) - truncated_power(t - edges[i + 1], m));
        }
        return acc;
    }
};

namespace detail {

// |x|^p and alpha_p(x) with fast paths for the common exponents; the inner
// loop evaluates these on every grid cell.
struct PowerEval {
    double p;
    int mode;

    explicit PowerEval(double exponent) : p(exponent) {
        mode = (p == 1.5) ? 1 : (p == 2.0) ? 2 : (p == 3.0) ? 3 : 0;
    }
    double abs_pow(double x) const {
        const double a = std::abs(x);
        switch (mode) {
            case 1: return a * std::sqrt(a);
            case 2: return a * a;
            case 3: return a * a * a;
            default: return std::pow(a, p);
        }
    }
    double alpha(double x) const {
        switch (mode) {
            case 1: return x >= 0.0 ? std::sqrt(x) : -std::sqrt(-x);
            case 2: return x;
            case 3: return x * std::abs(x);
            default: return signed_power(x, p);
        }
    }
};

// Row of the evaluation x(s) in the variables z = (poly | cell derivatives).
inline void oracle_eval_row(double s, int m, const std::vector<double>& edges,
                            std::vector<double>& row) {
    const std::size_t cells = edges.size() - 1;
    row.assign(static_cast<std::size_t>(m) + cells, 0.0);
    double smj = 1.0;
    for (int j = 0; j < m; ++j) {
        row[j] = smj;
        smj *= s;
    }
    double invf = 1.0;
    for (int j = 2; j <= m; ++j) invf /= j;
    for (std::size_t i = 0; i < cells; ++i) {
        if (s <= edges[i]) break;
        row[m + i] =
            invf * (truncated_power(s - edges[i], m) - truncated_power(s - edges[i + 1], m));
    }
}

inline void oracle_functional_row(const DualFunctional& e, int m,
                                  const std::vector<double>& edges, std::vector<double>& row,
                                  std::vector<double>& scratch) {
    row.assign(static_cast<std::size_t>(m) + edges.size() - 1, 0.0);
    for (const DiracTerm& term : e.terms) {
        oracle_eval_row(term.site, m, edges, scratch);
        for (std::size_t i = 0; i < row.size(); ++i) row[i] += term.weight * scratch[i];
    }
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace detail

inline OracleResult brute_force_oracle(const ProblemSpace& space, const ConstraintSet& cons,
                                       const OracleOptions& opt = {}) {
    if (opt.grid_n < 200) throw std::domain_error("brute_force_oracle: grid_n must be >= 200");
    const int m = space.m();
    const double a = space.a();
    const double p = space.p();
    const int G = opt.grid_n;
    const std::size_t N = static_cast<std::size_t>(m) + G;
    const std::size_t n1 = cons.size();
    if (n1 == 0) throw configuration_error("brute_force_oracle: no constraints");
    const double h = 2.0 * a / G;
    const detail::PowerEval pw(p);

    OracleResult result;
    result.a = a;
    result.m = m;
    result.p = p;
    result.edges.resize(G + 1);
    for (int i = 0; i <= G; ++i) result.edges[i] = -a + i * h;

    const std::size_t nl = space.lambdas().size();
    std::vector<std::vector<double>> lrows(nl), brows(n1);
    std::vector<double> scratch;
    for (std::size_t k = 0; k < nl; ++k)
        detail::oracle_functional_row(space.lambdas()[k], m, result.edges, lrows[k], scratch);
    for (std::size_t l = 0; l < n1; ++l)
        detail::oracle_functional_row(cons.functionals[l], m, result.edges, brows[l], scratch);

    std::vector<double> z(N, 0.0), y(n1, 0.0), g(N, 0.0), gprev(N, 0.0);
    std::vector<double> lz(nl), bz(n1), lg(nl), bg(n1);
    double rho = 10.0;
    double omega = 1e-2;

    auto refresh_dots = [&]() {
        for (std::size_t k = 0; k < nl; ++k) lz[k] = detail::dot(lrows[k], z);
        for (std::size_t l = 0; l < n1; ++l) bz[l] = detail::dot(brows[l], z);
    };
    // AL value along z - t*g, using the row dots of z and g; only the
    // derivative block needs a grid pass
    auto al_value = [&](double t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < nl; ++k) acc += pw.abs_pow(lz[k] - t * lg[k]);
        for (int i = 0; i < G; ++i) acc += h * pw.abs_pow(z[m + i] - t * g[m + i]);
        for (std::size_t l = 0; l < n1; ++l) {
            const double r = bz[l] - t * bg[l] - cons.targets[l];
            acc += y[l] * r + 0.5 * rho * r * r;
        }
        return acc;
    };
    auto al_gradient = [&]() {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t k = 0; k < nl; ++k) {
            const double coef = p * pw.alpha(lz[k]);
            const std::vector<double>& row = lrows[k];
            for (std::size_t i = 0; i < N; ++i) g[i] += coef * row[i];
        }
        for (int i = 0; i < G; ++i) g[m + i] += h * p * pw.alpha(z[m + i]);
        for (std::size_t l = 0; l < n1; ++l) {
            const double coef = y[l] + rho * (bz[l] - cons.targets[l]);
            const std::vector<double>& row = brows[l];
            for (std::size_t i = 0; i < N; ++i) g[i] += coef * row[i];
        }
    };
    auto sup = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s = std::max(s, std::abs(x));
        return s;
    };

    double prev_violation = std::numeric_limits<double>::infinity();
    long long inner_total = 0;
    bool done = false;
    int outer = 0;
    for (outer = 1; outer <= opt.max_outer && !done; ++outer) {
        refresh_dots();
        al_gradient();
        std::vector<double> window{al_value(0.0)};
        double prev_t = 0.0;
        double gg_prev = 0.0, step = 0.0;
        int inner = 0;
        for (; inner < opt.max_inner; ++inner) {
            const double gnorm = sup(g);
            if (gnorm <= omega) break;
            double gg = 0.0;
            for (double gi : g) gg += gi * gi;
            if (prev_t > 0.0) {
                // s = -prev_t * gprev, y = g - gprev
                double gpg = 0.0;
                for (std::size_t i = 0; i < N; ++i) gpg += gprev[i] * g[i];
                const double sty = -prev_t * (gpg - gg_prev);
                const double sts = prev_t * prev_t * gg_prev;
                step = (sty > 1e-300) ? std::clamp(sts / sty, 1e-14, 1e10)
                                      : 1.0 / std::max(1.0, gnorm);
            } else {
                step = 1.0 / std::max(1.0, gnorm);
            }
            for (std::size_t k = 0; k < nl; ++k) lg[k] = detail::dot(lrows[k], g);
            for (std::size_t l = 0; l < n1; ++l) bg[l] = detail::dot(brows[l], g);
            double fref = window[0];
            for (double fw : window) fref = std::max(fref, fw);
            double t = step;
            bool accepted = false;
            double fnew = 0.0;
            for (int bt = 0; bt < 50; ++bt) {
                fnew = al_value(t);
                if (fnew <= fref - 1e-4 * t * gg) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) break;
            for (std::size_t i = 0; i < N; ++i) z[i] -= t * g[i];
            refresh_dots();
            gprev.swap(g);
            gg_prev = gg;
            prev_t = t;
            al_gradient();
            window.push_back(fnew);
            if (window.size() > 8) window.erase(window.begin());
        }
        inner_total += inner;

        double violation = 0.0;
        for (std::size_t l = 0; l < n1; ++l)
            violation = std::max(violation, std::abs(bz[l] - cons.targets[l]));
        if (violation <= opt.constraint_tol && omega <= 1e-7) {
            done = true;
            break;
        }
        for (std::size_t l = 0; l < n1; ++l) y[l] += rho * (bz[l] - cons.targets[l]);
        if (violation > 0.25 * prev_violation) rho = std::min(rho * 5.0, 1e12);
        prev_violation = violation;
        omega = std::max(omega * 0.2, 1e-8);
    }

    refresh_dots();
    double violation = 0.0;
    for (std::size_t l = 0; l < n1; ++l)
        violation = std::max(violation, std::abs(bz[l] - cons.targets[l]));
    result.constraint_residual = violation;
    if (!done)
        throw convergence_error("brute_force_oracle: augmented-Lagrangian loop did not reach "
                                "constraint tolerance (residual " +
                                    std::to_string(violation) + ")",
                                z, violation);

    result.poly.assign(z.begin(), z.begin() + m);
    result.deriv.assign(z.begin() + m, z.end());
    double objective = 0.0;
    for (std::size_t k = 0; k < nl; ++k) objective += pw.abs_pow(lz[k]);
    for (int i = 0; i < G; ++i) objective += h * pw.abs_pow(z[m + i]);
    result.objective = objective;
    result.outer_iterations = outer;
    result.inner_iterations = inner_total;
    return result;
}

}  // namespace banachic
