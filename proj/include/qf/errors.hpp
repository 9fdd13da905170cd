#pragma once

#include <stdexcept>
#include <string>

namespace qf {

// Arguments outside the mathematical domain of an operation.
struct domain_error : std::invalid_argument {
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed or inconsistent user-supplied configuration.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: factorization failure, quadrature non-convergence,
// underflowing denominators and the like.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qf
