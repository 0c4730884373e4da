#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace satphase {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, inconsistent geometry, malformed configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. gamma <= 0).
class DomainError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Mismatched lengths or dimensions.
class ShapeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Malformed or truncated file. The message names the offending line/field.
class ParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Quadrature non-convergence, non-finite values, divergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss. Carries the history up to the last finite epoch.
class TrainingDivergence : public NumericalError {
public:
    TrainingDivergence(const std::string& what, std::vector<double> history)
        : NumericalError(what), history_(std::move(history)) {}

    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace satphase
