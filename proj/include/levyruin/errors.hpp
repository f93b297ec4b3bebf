#pragma once

#include <stdexcept>
#include <string>

namespace levyruin {

/// Argument outside the mathematical domain of an operation (x <= 0 for a
/// tail integral, NaN input, parameter out of range).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Operation requested for a copula family that does not support it, e.g. a
/// density for a family without a second mixed derivative.
class UnsupportedFamily : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Model-level validation failure (net profit condition, infinite intensity
/// where a finite one is required, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_bound)
        : std::runtime_error(what), achieved_bound_(achieved_bound) {}

    double achieved_bound() const noexcept { return achieved_bound_; }

private:
    double achieved_bound_;
};

/// Root finding / inversion failure.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace levyruin
