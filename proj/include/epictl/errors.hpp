#pragma once

#include <stdexcept>
#include <string>

namespace epictl {

/// Invalid input parameters (bad ranges, negative rates, malformed distributions).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A state vector does not line up with the degree distribution it is paired with.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fixed-point or descent loop ran out of iterations.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Time stepping left the invariant simplex by more than round-off.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested equilibrium regime has no admissible control.
class InfeasibleRegime : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Implicit derivative of the fixed point blows up (control sits on a threshold).
class IllConditionedGradient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Objective requested at a control where the stable equilibrium is not unique.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace epictl
