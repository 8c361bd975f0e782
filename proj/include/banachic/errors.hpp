#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace banachic {

// Numerically dependent functionals or constraints (singular / badly
// conditioned Gram systems).
class degeneracy_error : public std::runtime_error {
public:
    explicit degeneracy_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Incompatible objects handed to one operation (mismatched grids, spaces,
// counts).
class configuration_error : public std::runtime_error {
public:
    explicit configuration_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite integrand value; `location` is the offending abscissa.
class integrand_error : public std::runtime_error {
public:
    integrand_error(const std::string& msg, double where)
        : std::runtime_error(msg), location(where) {}
    double location;
};

// Iteration budget exhausted. Carries the best iterate and its residual so
// callers can still report diagnostics.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& msg, std::vector<double> best, double res)
        : std::runtime_error(msg), best_point(std::move(best)), residual(res) {}
    std::vector<double> best_point;
    double residual;
};

}  // namespace banachic
