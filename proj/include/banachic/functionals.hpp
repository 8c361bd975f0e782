#pragma once

// Dirac-combination functionals, monomial-basis polynomials, Lagrange and
// dual bases, divided-difference weights, and the ProblemSpace tying them to
// an interval (-a, a).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "banachic/core_maps.hpp"
#include "banachic/errors.hpp"

namespace banachic {

namespace detail {
inline double pow_int(double x, int k) {
    double r = 1.0, b = x;
    for (int e = k; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

inline double factorial(int m) {
    double f = 1.0;
    for (int j = 2; j <= m; ++j) f *= j;
    return f;
}
}  // namespace detail

struct DiracTerm {
    double weight = 0.0;
    double site = 0.0;
};

// Finite combination  sum_j weight_j * delta_{site_j}; the concrete dual
// element every kernel pairing and interpolation constraint is built from.
struct DualFunctional {
    std::vector<DiracTerm> terms;

    DualFunctional() = default;
    explicit DualFunctional(std::vector<DiracTerm> t) : terms(std::move(t)) {}

    static DualFunctional dirac(double site, double weight = 1.0) {
        return DualFunctional({{weight, site}});
    }

    bool is_unit_dirac() const { return terms.size() == 1 && terms.front().weight == 1.0; }

    template <class F>
    double apply(F&& x) const {
        double acc = 0.0;
        for (const DiracTerm& t : terms) acc += t.weight * x(t.site);
        return acc;
    }

    friend bool operator==(const DualFunctional& a, const DualFunctional& b) {
        if (a.terms.size() != b.terms.size()) return false;
        for (std::size_t i = 0; i < a.terms.size(); ++i)
            if (a.terms[i].weight != b.terms[i].weight || a.terms[i].site != b.terms[i].site)
                return false;
        return true;
    }
};

/// <x, e'> = sum_j gamma_j x(t_j) for an evaluable x.
template <class F>
double apply_functional(const DualFunctional& e, F&& x) {
    return e.apply(std::forward<F>(x));
}

// Dense polynomial in the monomial basis, ascending powers. Degrees stay
// small (at most m-1 with m <= 10), so conditioning is acceptable without an
// orthogonal basis.
class Polynomial {
public:
    Polynomial() = default;  // the zero polynomial
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Polynomial constant(double c) { return Polynomial({c}); }
    static Polynomial monomial(int k, double c = 1.0) {
        std::vector<double> v(static_cast<std::size_t>(k) + 1, 0.0);
        v.back() = c;
        return Polynomial(std::move(v));
    }

    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 for zero
    const std::vector<double>& coeffs() const { return coeffs_; }
    double coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[k] : 0.0;
    }

    double operator()(double t) const {
        double acc = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * t + coeffs_[i];
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial();
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            d[i - 1] = coeffs_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        trim();
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) {
        a += b;
        return a;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return Polynomial();
        std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(c));
    }

    Polynomial scaled(double s) const {
        std::vector<double> c = coeffs_;
        for (double& x : c) x *= s;
        return Polynomial(std::move(c));
    }

private:
    std::vector<double> coeffs_;
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
    }
};

/// Lagrange polynomials of pairwise-distinct nodes: L_k(node_l) = delta_kl,
/// each of degree m-1 for m nodes.
inline std::vector<Polynomial> lagrange_basis(const std::vector<double>& nodes) {
    const std::size_t m = nodes.size();
    if (m == 0) throw std::domain_error("lagrange_basis: empty node list");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (nodes[i] == nodes[j])
                throw degeneracy_error("lagrange_basis: duplicate node " +
                                       std::to_string(nodes[i]));
    std::vector<Polynomial> basis;
    basis.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        Polynomial num = Polynomial::constant(1.0);
        double den = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == k) continue;
            num = num * Polynomial({-nodes[j], 1.0});
            den *= nodes[k] - nodes[j];
        }
        basis.push_back(num.scaled(1.0 / den));
    }
    return basis;
}

/// Dual polynomial basis of m Dirac-combination functionals: deg P_l <= m-1
/// with lambda_k(P_l) = delta_kl. Throws degeneracy_error, naming the
/// functionals involved, when the restrictions to P_{m-1} are numerically
/// dependent (condition number above 1e10).
inline std::vector<Polynomial> dual_basis(const std::vector<DualFunctional>& lambdas) {
    const int m = static_cast<int>(lambdas.size());
    if (m == 0) throw std::domain_error("dual_basis: empty functional list");
    Eigen::MatrixXd M(m, m);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            M(k, i) = lambdas[k].apply([i](double t) { return detail::pow_int(t, i); });

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(m - 1);
    if (!(smin > 0.0) || smax / smin > 1e10) {
        const Eigen::VectorXd u = svd.matrixU().col(m - 1);
        const double umax = u.cwiseAbs().maxCoeff();
        std::string who;
        for (int k = 0; k < m; ++k)
            if (std::abs(u(k)) >= 0.2 * umax) who += (who.empty() ? "" : ", ") + std::to_string(k);
        throw degeneracy_error("dual_basis: functionals {" + who +
                               "} are numerically dependent on P_{m-1}");
    }

    Eigen::MatrixXd C = M.fullPivLu().solve(Eigen::MatrixXd::Identity(m, m));
    C += C * (Eigen::MatrixXd::Identity(m, m) - M * C);  // one refinement pass
    std::vector<Polynomial> basis;
    basis.reserve(m);
    for (int l = 0; l < m; ++l) {
        std::vector<double> coeffs(m);
        for (int i = 0; i < m; ++i) coeffs[i] = C(i, l);
        basis.emplace_back(std::move(coeffs));
    }
    return basis;
}

/// Weights mu with  sum_l mu_l f(t_l) = m! * f[t_0, ..., t_m]  for strictly
/// increasing knots (m = count - 1). Under this normalization uniform knots
/// of step h give mu_l = (-1)^{m-l} C(m,l) / h^m; the weights annihilate
/// P_{m-1} and satisfy sum_l mu_l t_l^m = m!.
inline std::vector<double> divided_difference_coefficients(const std::vector<double>& knots) {
    if (knots.size() < 2)
        throw std::domain_error("divided_difference_coefficients: need at least two knots");
    const int m = static_cast<int>(knots.size()) - 1;
    for (int l = 0; l < m; ++l)
        if (!(knots[l] < knots[l + 1]))
            throw std::domain_error(
                "divided_difference_coefficients: knots must be strictly increasing");
    const double mfact = detail::factorial(m);
    std::vector<double> mu(knots.size());
    for (int l = 0; l <= m; ++l) {
        double prod = 1.0;
        for (int j = 0; j <= m; ++j)
            if (j != l) prod *= knots[l] - knots[j];
        mu[l] = mfact / prod;
    }
    return mu;
}

// Interval half-width a, derivative order m, exponent pair (p, p*), the m
// functionals lambda_k and their dual polynomials P_k. Everything downstream
// (Peano kernels, banachic kernels, spline solves) reads its geometry from
// here. Immutable once constructed.
class ProblemSpace {
public:
    // Point-evaluation functionals at the given nodes; the dual basis is the
    // Lagrange basis of those nodes.
    ProblemSpace(double a, int m, double p, const std::vector<double>& nodes)
        : ProblemSpace(a, m, p, to_diracs(nodes)) {}

    ProblemSpace(double a, int m, double p, std::vector<DualFunctional> lambdas)
        : a_(a), m_(m), pair_(p), lambdas_(std::move(lambdas)) {
        if (!(a_ > 0.0)) throw std::domain_error("ProblemSpace: a must be > 0");
        if (m_ < 1) throw std::domain_error("ProblemSpace: m must be >= 1");
        if (static_cast<int>(lambdas_.size()) != m_)
            throw configuration_error("ProblemSpace: expected " + std::to_string(m_) +
                                      " functionals, got " + std::to_string(lambdas_.size()));
        point_lambdas_ = true;
        for (const DualFunctional& lam : lambdas_) {
            if (lam.terms.empty()) throw std::domain_error("ProblemSpace: empty functional");
            for (const DiracTerm& t : lam.terms) {
                check_site(t.site, "ProblemSpace: lambda site");
                lambda_sites_.push_back(t.site);
            }
            point_lambdas_ = point_lambdas_ && lam.is_unit_dirac();
        }
        std::sort(lambda_sites_.begin(), lambda_sites_.end());
        lambda_sites_.erase(std::unique(lambda_sites_.begin(), lambda_sites_.end()),
                            lambda_sites_.end());
        if (point_lambdas_) {
            point_nodes_.reserve(lambdas_.size());
            for (const DualFunctional& lam : lambdas_) point_nodes_.push_back(lam.terms[0].site);
            basis_ = lagrange_basis(point_nodes_);
        } else {
            basis_ = dual_basis(lambdas_);
        }
    }

    double a() const { return a_; }
    int m() const { return m_; }
    const ConjugatePair& pair() const { return pair_; }
    double p() const { return pair_.p; }
    double p_star() const { return pair_.p_star; }
    const std::vector<DualFunctional>& lambdas() const { return lambdas_; }
    const std::vector<Polynomial>& dual_polynomials() const { return basis_; }
    bool point_lambdas() const { return point_lambdas_; }
    // Evaluation nodes when every lambda_k is a unit Dirac.
    const std::vector<double>& point_nodes() const { return point_nodes_; }
    // Sorted unique sites of all lambda terms (quadrature breakpoints).
    const std::vector<double>& lambda_sites() const { return lambda_sites_; }

    void check_site(double s, const char* who = "site") const {
        if (!(s > -a_ && s < a_))
            throw std::domain_error(std::string(who) + " = " + std::to_string(s) +
                                    " outside (-" + std::to_string(a_) + ", " +
                                    std::to_string(a_) + ")");
    }

    bool same_geometry(const ProblemSpace& o) const {
        if (a_ != o.a_ || m_ != o.m_ || lambdas_.size() != o.lambdas_.size()) return false;
        for (std::size_t k = 0; k < lambdas_.size(); ++k)
            if (!(lambdas_[k] == o.lambdas_[k])) return false;
        return true;
    }

private:
    static std::vector<DualFunctional> to_diracs(const std::vector<double>& nodes) {
        std::vector<DualFunctional> fs;
        fs.reserve(nodes.size());
        for (double s : nodes) fs.push_back(DualFunctional::dirac(s));
        return fs;
    }

    double a_;
    int m_;
    ConjugatePair pair_;
    std::vector<DualFunctional> lambdas_;
    std::vector<Polynomial> basis_;
    std::vector<double> point_nodes_;
    std::vector<double> lambda_sites_;
    bool point_lambdas_ = false;
};

}  // namespace banachic
