#pragma once

#include <stdexcept>
#include <string>

namespace kfwer {

// Input outside the mathematical domain of an operation (non-finite x, p outside (0,1), ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid configuration: bad sizes, malformed files, unknown identifiers.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Request exceeds what an exact/enumerating routine is willing to do (e.g. n too large).
class ScaleError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Base for numerical failures (exit code 3 at the CLI).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double previous, double last)
        : NumericalError(what), previous_(previous), last_(last) {}

    double previous_estimate() const noexcept { return previous_; }
    double last_estimate() const noexcept { return last_; }

private:
    double previous_;
    double last_;
};

}  // namespace kfwer
