#pragma once

// Discrete p-Dirichlet energy on the unit right triangle with vertices
// (0,0), (1,0), (0,1), its minimizer with exactly those three corners pinned
// to zero (the rest of the boundary stays free, the natural condition of the
// energy), and the residual of the associated nonlinear operator equation.
// Forward differences on lower-left triangular cells whose three corners lie
// in the triangle.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "banachic/core_maps.hpp"
#include "banachic/errors.hpp"

namespace banachic {

class TriangleGrid {
public:
    explicit TriangleGrid(int n) : n_(n), h_(1.0 / n) {
        if (n < 2) throw std::domain_error("TriangleGrid: need n >= 2");
        row_offset_.resize(n + 2);
        int acc = 0;
        for (int j = 0; j <= n; ++j) {
            row_offset_[j] = acc;
            acc += n + 1 - j;
        }
        row_offset_[n + 1] = acc;  // == (n+1)(n+2)/2
    }

    int subdivisions() const { return n_; }
    double h() const { return h_; }
    int node_count() const { return row_offset_[n_ + 1]; }
    bool in_grid(int i, int j) const { return i >= 0 && j >= 0 && i + j <= n_; }
    int id(int i, int j) const { return row_offset_[j] + i; }
    bool is_pinned(int i, int j) const {
        return (i == 0 && j == 0) || (i == n_ && j == 0) || (i == 0 && j == n_);
    }

private:
    int n_;
    double h_;
    std::vector<int> row_offset_;
};

// Nodal values, indexed by TriangleGrid::id. Solutions keep the three corner
// values identically zero.
struct GridField {
    std::vector<double> values;

    static GridField zeros(const TriangleGrid& g) {
        return GridField{std::vector<double>(g.node_count(), 0.0)};
    }
    double& at(const TriangleGrid& g, int i, int j) { return values[g.id(i, j)]; }
    double at(const TriangleGrid& g, int i, int j) const { return values[g.id(i, j)]; }
};

/// E(u) = sum_cells h^2 (1/p)(|Dx u|^p + |Dy u|^p) - h^2 sum_nodes phi u,
/// forward differences per cell; convex in u.
inline double discrete_energy(const TriangleGrid& g, const GridField& u, const GridField& phi,
                              double p) {
    if (static_cast<int>(u.values.size()) != g.node_count() ||
        static_cast<int>(phi.values.size()) != g.node_count())
        throw configuration_error("discrete_energy: field/grid size mismatch");
    if (!(p > 1.0)) throw std::domain_error("discrete_energy: p must be > 1");
    const int n = g.subdivisions();
    const double h = g.h();
    const double h2 = h * h;
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + j < n; ++i) {
            const double u0 = u.values[g.id(i, j)];
            const double dx = (u.values[g.id(i + 1, j)] - u0) / h;
            const double dy = (u.values[g.id(i, j + 1)] - u0) / h;
            acc += h2 / p * (std::pow(std::abs(dx), p) + std::pow(std::abs(dy), p));
        }
    double source = 0.0;
    for (int k = 0; k < g.node_count(); ++k) source += phi.values[k] * u.values[k];
    return acc - h2 * source;
}

/// Gradient of the energy; entries at the three pinned corners are zeroed.
inline void energy_gradient(const TriangleGrid& g, const GridField& u, const GridField& phi,
                            double p, std::vector<double>& grad) {
    if (static_cast<int>(u.values.size()) != g.node_count() ||
        static_cast<int>(phi.values.size()) != g.node_count())
        throw configuration_error("energy_gradient: field/grid size mismatch");
    const int n = g.subdivisions();
    const double h = g.h();
    const double h2 = h * h;
    grad.assign(g.node_count(), 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + j < n; ++i) {
            const double u0 = u.values[g.id(i, j)];
            const double ax = signed_power((u.values[g.id(i + 1, j)] - u0) / h, p);
            const double ay = signed_power((u.values[g.id(i, j + 1)] - u0) / h, p);
            grad[g.id(i, j)] -= h * (ax + ay);
            grad[g.id(i + 1, j)] += h * ax;
            grad[g.id(i, j + 1)] += h * ay;
        }
    for (int k = 0; k < g.node_count(); ++k) grad[k] -= h2 * phi.values[k];
    grad[g.id(0, 0)] = 0.0;
    grad[g.id(n, 0)] = 0.0;
    grad[g.id(0, n)] = 0.0;
}

/// Sup-norm of the energy gradient over free nodes: the discrete residual of
/// the nonlinear equation the kernel solves.
inline double residual(const TriangleGrid& g, const GridField& u, const GridField& phi,
                       double p) {
    std::vector<double> grad;
    energy_gradient(g, u, phi, p, grad);
    double s = 0.0;
    for (double x : grad) s = std::max(s, std::abs(x));
    return s;
}

struct PdeSolveOptions {
    double tol = 1e-8;  // sup-norm bound on the free-node gradient
    int max_iter = 5000;
};

/// Minimize the energy with the three corners pinned. p = 2 uses a direct
/// sparse factorization of the linear system; otherwise Barzilai-Borwein
/// descent with a non-monotone Armijo guard. Throws convergence_error (with
/// the best field and its gradient norm) when the budget runs out.
inline GridField solve_kernel(const TriangleGrid& g, const GridField& phi, double p,
                              const PdeSolveOptions& opt = {}) {
    if (static_cast<int>(phi.values.size()) != g.node_count())
        throw configuration_error("solve_kernel: field/grid size mismatch");
    if (!(p > 1.0)) throw std::domain_error("solve_kernel: p must be > 1");
    const int n = g.subdivisions();
    const double h = g.h();

    if (p == 2.0) {
        // free-node numbering
        std::vector<int> free_index(g.node_count(), -1);
        int nfree = 0;
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i + j <= n; ++i)
                if (!g.is_pinned(i, j)) free_index[g.id(i, j)] = nfree++;

        std::vector<Eigen::Triplet<double>> trip;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(nfree);
        auto add_edge = [&](int id0, int id1) {
            const int f0 = free_index[id0];
            const int f1 = free_index[id1];
            if (f0 >= 0) trip.emplace_back(f0, f0, 1.0);
            if (f1 >= 0) trip.emplace_back(f1, f1, 1.0);
            if (f0 >= 0 && f1 >= 0) {
                trip.emplace_back(f0, f1, -1.0);
                trip.emplace_back(f1, f0, -1.0);
            }
        };
        for (int j = 0; j < n; ++j)
            for (int i = 0; i + j < n; ++i) {
                add_edge(g.id(i, j), g.id(i + 1, j));
                add_edge(g.id(i, j), g.id(i, j + 1));
            }
        for (int k = 0; k < g.node_count(); ++k)
            if (free_index[k] >= 0) b(free_index[k]) = h * h * phi.values[k];

        Eigen::SparseMatrix<double> K(nfree, nfree);
        K.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
        if (ldlt.info() != Eigen::Success)
            throw convergence_error("solve_kernel: factorization of the p = 2 system failed",
                                    {}, std::numeric_limits<double>::infinity());
        const Eigen::VectorXd x = ldlt.solve(b);
        GridField u = GridField::zeros(g);
        for (int k = 0; k < g.node_count(); ++k)
            if (free_index[k] >= 0) u.values[k] = x(free_index[k]);
        return u;
    }

    GridField u = GridField::zeros(g);
    std::vector<double> grad, gnew;
    std::vector<double> trial(g.node_count());
    energy_gradient(g, u, phi, p, grad);
    double E = discrete_energy(g, u, phi, p);
    std::vector<double> window{E};
    auto sup = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s = std::max(s, std::abs(x));
        return s;
    };
    double step = 1.0 / std::max(1.0, sup(grad));
    double best_res = sup(grad);
    GridField best = u;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        const double gnorm = sup(grad);
        if (gnorm < best_res) {
            best_res = gnorm;
            best = u;
        }
        if (gnorm <= opt.tol) return u;

        double gg = 0.0;
        for (double gi : grad) gg += gi * gi;
        double fref = E;
        for (double fw : window) fref = std::max(fref, fw);
        double t = step;
        bool accepted = false;
        double Enew = E;
        for (int bt = 0; bt < 50; ++bt) {
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = u.values[i] - t * grad[i];
            GridField cand{trial};
            Enew = discrete_energy(g, cand, phi, p);
            if (Enew <= fref - 1e-4 * t * gg) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        energy_gradient(g, GridField{trial}, phi, p, gnew);
        double sts = 0.0, sty = 0.0;
        for (std::size_t i = 0; i < trial.size(); ++i) {
            const double si = trial[i] - u.values[i];
            sts += si * si;
            sty += si * (gnew[i] - grad[i]);
        }
        step = (sty > 1e-300) ? std::clamp(sts / sty, 1e-14, 1e10) : 1.0 / std::max(1.0, sup(gnew));
        u.values = trial;
        grad = gnew;
        E = Enew;
        window.push_back(E);
        if (window.size() > 10) window.erase(window.begin());
    }

    energy_gradient(g, u, phi, p, grad);
    const double res = sup(grad);
    if (res <= opt.tol) return u;
    throw convergence_error("solve_kernel: gradient norm " + std::to_string(best_res) +
                                " above tolerance after " + std::to_string(opt.max_iter) +
                                " iterations",
                            best.values, best_res);
}

}  // namespace banachic
