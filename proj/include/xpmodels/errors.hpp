#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace xp {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed request: unknown kind, incompatible option, bad flag.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best, double err)
        : std::runtime_error(what), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

/// ODE integration failed (blow-up or step underflow).
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t, std::vector<double> y)
        : std::runtime_error(what), last_t(t), last_state(std::move(y)) {}
    double last_t;
    std::vector<double> last_state;
};

/// Energy below the classical minimum, or momentum requested where |E| < 2w(x).
class ClassicallyForbiddenError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A gauge map whose defining integral diverges at the lower end of the domain.
class DivergentMapError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Model outside the class a solver supports (e.g. bounded w for the shooting solver).
class UnsupportedModelError : public UsageError {
public:
    using UsageError::UsageError;
};

/// Failure reading an external data file; `line` is 1-based, 0 when not line specific.
class IngestionError : public std::runtime_error {
public:
    IngestionError(const std::string& what, std::size_t line_no)
        : std::runtime_error(what), line(line_no) {}
    std::size_t line;
};

}  // namespace xp
