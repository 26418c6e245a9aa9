#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace issgain {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Mismatched vector or matrix shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature ran out of its evaluation budget.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double best_estimate, double error_estimate)
        : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

/// Iterative eigensolver failed to converge.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::size_t iterations)
        : Error(what), iterations_(iterations) {}

    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

/// System is not exponentially stable (some eigenvalue >= 0).
class StabilityError : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range configuration. `line` is 0 for command-line flags.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::size_t line = 0) : Error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace issgain
