#pragma once

// Signed-power duality maps alpha_q and conjugate-exponent arithmetic. Every
// nonlinearity in the library is a composition of these maps.

#include <cmath>
#include <stdexcept>
#include <string>

namespace banachic {

/// Hoelder conjugate of p: 1/p + 1/p* = 1. Requires finite p > 1.
inline double conjugate_exponent(double p) {
    if (!std::isfinite(p) || p <= 1.0)
        throw std::domain_error("conjugate_exponent: p must be finite and > 1, got " +
                                std::to_string(p));
    return p / (p - 1.0);
}

/// alpha_q(rho) = |rho|^(q-1) sign(rho): odd, increasing, alpha_q(0) = 0
/// exactly (the limit value, so no NaN paths for q < 2), and
/// alpha_q^{-1} = alpha_{q*}.
inline double signed_power(double rho, double q) {
    if (!std::isfinite(q) || q <= 1.0)
        throw std::domain_error("signed_power: exponent must be finite and > 1, got " +
                                std::to_string(q));
    if (rho == 0.0) return 0.0;
    if (q == 2.0) return rho;  // alpha_2 is the identity
    const double mag = std::pow(std::abs(rho), q - 1.0);
    return std::signbit(rho) ? -mag : mag;
}

// Conjugate exponents (p, p*). p_star is always recomputed from p, so the
// pair cannot drift apart.
struct ConjugatePair {
    double p;
    double p_star;

    explicit ConjugatePair(double p_exponent)
        : p(p_exponent), p_star(conjugate_exponent(p_exponent)) {
        if (std::abs(1.0 / p + 1.0 / p_star - 1.0) > 1e-14)
            throw std::domain_error("ConjugatePair: conjugacy defect above 1e-14");
    }
};

/// alpha_{p*}(alpha_p(rho)); equals rho up to a few ulps.
inline double signed_power_inverse_check(double rho, const ConjugatePair& pair) {
    return signed_power(signed_power(rho, pair.p), pair.p_star);
}

}  // namespace banachic
