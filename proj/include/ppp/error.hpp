#pragma once

#include <stdexcept>
#include <string>

namespace ppp {

// Argument outside the mathematical domain of a function.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Caller broke a precondition (odd Pfaffian dimension, non-stationary kernel, ...).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Requested work exceeds a configured budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature did not reach tolerance; carries what it had.
struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double partial, double err)
        : std::runtime_error(what), partial_value(partial), error_estimate(err) {}
    double partial_value;
    double error_estimate;
};

// Oscillatory tail whose lobes do not decay.
struct DivergenceError : QuadratureError {
    using QuadratureError::QuadratureError;
};

}  // namespace ppp
