#pragma once

// Deterministic composite Gauss-Legendre integration with breakpoint-aware
// panels and bisection refinement. All interval integrals in the library run
// through here; integrands are piecewise smooth with kinks only at known
// breakpoints (truncated powers, |v|^{p*} at sign changes of v), so a panel
// either converges quickly or gets bisected towards the rough spot.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "banachic/errors.hpp"

namespace banachic {

struct GaussRule {
    std::vector<double> nodes;    // ascending, on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order on [-1, 1]. Nodes are found by
/// Newton iteration on the Legendre recurrence; rules are cached per order.
inline const GaussRule& gauss_legendre(int order) {
    if (order < 2) throw std::domain_error("gauss_legendre: order must be >= 2");
    static std::mutex mtx;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    constexpr double pi = 3.14159265358979323846;
    GaussRule rule;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double deriv = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            deriv = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / deriv;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        rule.nodes[i] = -x;  // descending cosine roots fill from the left
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

// Panel layout plus refinement parameters for one interval.
struct QuadratureRule {
    std::vector<double> breakpoints;  // strictly increasing; first/last = interval ends
    int panel_order = 16;
    double tolerance = 1e-11;
    int max_depth = 12;

    static QuadratureRule over(double lo, double hi, const std::vector<double>& interior = {}) {
        if (!(lo < hi)) throw std::domain_error("QuadratureRule: empty interval");
        std::vector<double> b;
        b.reserve(interior.size() + 2);
        b.push_back(lo);
        for (double t : interior)
            if (t > lo && t < hi) b.push_back(t);
        b.push_back(hi);
        std::sort(b.begin(), b.end());
        const double eps = 1e-14 * (hi - lo);
        QuadratureRule r;
        for (double t : b)
            if (r.breakpoints.empty() || t - r.breakpoints.back() > eps)
                r.breakpoints.push_back(t);
        r.breakpoints.back() = hi;
        return r;
    }

    /// Same interval and parameters, breakpoints merged with `extra`.
    QuadratureRule merged(const std::vector<double>& extra) const {
        std::vector<double> interior(breakpoints.begin() + 1, breakpoints.end() - 1);
        interior.insert(interior.end(), extra.begin(), extra.end());
        QuadratureRule r = over(breakpoints.front(), breakpoints.back(), interior);
        r.panel_order = panel_order;
        r.tolerance = tolerance;
        r.max_depth = max_depth;
        return r;
    }
};

struct IntegrationResult {
    double value = 0.0;
    bool converged = true;  // false: some panel hit max_depth above tolerance
};

namespace detail {

template <class F>
double gauss_panel(F& f, double lo, double hi, const GaussRule& g) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double x = mid + half * g.nodes[i];
        const double v = f(x);
        if (!std::isfinite(v))
            throw integrand_error("integrate: non-finite integrand at t = " + std::to_string(x),
                                  x);
        acc += g.weights[i] * v;
    }
    return half * acc;
}

template <class F>
double refine_panel(F& f, double lo, double hi, double parent, const GaussRule& g, double tol,
                    int depth, int max_depth, bool& converged) {
    const double mid = 0.5 * (lo + hi);
    const double left = gauss_panel(f, lo, mid, g);
    const double right = gauss_panel(f, mid, hi, g);
    const double sum = left + right;
    if (std::abs(sum - parent) <= tol * (1.0 + std::abs(sum))) return sum;
    if (depth >= max_depth) {
        converged = false;
        return sum;
    }
    return refine_panel(f, lo, mid, left, g, tol, depth + 1, max_depth, converged) +
           refine_panel(f, mid, hi, right, g, tol, depth + 1, max_depth, converged);
}

template <class F>
void gauss_panel_vec(F& f, double lo, double hi, const GaussRule& g, std::size_t dim,
                     std::vector<double>& out, std::vector<double>& scratch) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    out.assign(dim, 0.0);
    scratch.resize(dim);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double x = mid + half * g.nodes[i];
        f(x, scratch.data());
        for (std::size_t c = 0; c < dim; ++c) {
            if (!std::isfinite(scratch[c]))
                throw integrand_error(
                    "integrate_vector: non-finite component " + std::to_string(c) + " at t = " +
                        std::to_string(x),
                    x);
            out[c] += g.weights[i] * scratch[c];
        }
    }
    for (std::size_t c = 0; c < dim; ++c) out[c] *= half;
}

template <class F>
void refine_panel_vec(F& f, double lo, double hi, const std::vector<double>& parent,
                      const GaussRule& g, double tol, int depth, int max_depth, std::size_t dim,
                      std::vector<double>& acc, bool& converged) {
    const double mid = 0.5 * (lo + hi);
    std::vector<double> left, right, scratch;
    gauss_panel_vec(f, lo, mid, g, dim, left, scratch);
    gauss_panel_vec(f, mid, hi, g, dim, right, scratch);
    bool ok = true;
    for (std::size_t c = 0; c < dim; ++c) {
        const double sum = left[c] + right[c];
        if (std::abs(sum - parent[c]) > tol * (1.0 + std::abs(sum))) {
            ok = false;
            break;
        }
    }
    if (ok || depth >= max_depth) {
        if (!ok) converged = false;
        for (std::size_t c = 0; c < dim; ++c) acc[c] += left[c] + right[c];
        return;
    }
    refine_panel_vec(f, lo, mid, left, g, tol, depth + 1, max_depth, dim, acc, converged);
    refine_panel_vec(f, mid, hi, right, g, tol, depth + 1, max_depth, dim, acc, converged);
}

}  // namespace detail

/// Integrate f over the rule's interval. Each panel between consecutive
/// breakpoints is bisected until the two-half estimate agrees with its parent
/// to tolerance*(1+|estimate|) or max_depth is reached; traversal and
/// summation order are fixed, so results are deterministic.
template <class F>
IntegrationResult integrate_full(const QuadratureRule& rule, F&& f) {
    if (rule.breakpoints.size() < 2)
        throw std::domain_error("integrate: rule needs at least two breakpoints");
    const GaussRule& g = gauss_legendre(rule.panel_order);
    IntegrationResult res;
    for (std::size_t i = 0; i + 1 < rule.breakpoints.size(); ++i) {
        const double lo = rule.breakpoints[i];
        const double hi = rule.breakpoints[i + 1];
        const double parent = detail::gauss_panel(f, lo, hi, g);
        res.value += detail::refine_panel(f, lo, hi, parent, g, rule.tolerance, 1, rule.max_depth,
                                          res.converged);
    }
    return res;
}

template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
    return integrate_full(rule, std::forward<F>(f)).value;
}

/// Vector-valued variant: f(t, out) fills `dim` components; a panel is
/// accepted only when every component meets the tolerance. Returns false if
/// some panel hit max_depth first.
template <class F>
bool integrate_vector(const QuadratureRule& rule, std::size_t dim, F&& f,
                      std::vector<double>& out) {
    if (rule.breakpoints.size() < 2)
        throw std::domain_error("integrate_vector: rule needs at least two breakpoints");
    const GaussRule& g = gauss_legendre(rule.panel_order);
    out.assign(dim, 0.0);
    bool converged = true;
    std::vector<double> parent, scratch;
    for (std::size_t i = 0; i + 1 < rule.breakpoints.size(); ++i) {
        const double lo = rule.breakpoints[i];
        const double hi = rule.breakpoints[i + 1];
        detail::gauss_panel_vec(f, lo, hi, g, dim, parent, scratch);
        detail::refine_panel_vec(f, lo, hi, parent, g, rule.tolerance, 1, rule.max_depth, dim,
                                 out, converged);
    }
    return converged;
}

}  // namespace banachic
