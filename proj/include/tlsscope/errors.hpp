#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tlsscope {

// Errors split into two families so the CLI can map them onto exit codes:
// input/contract problems (exit 2) and numerical failures (exit 3).

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public InputError {
public:
    using InputError::InputError;
};

class ShapeError : public InputError {
public:
    using InputError::InputError;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

class ContractError : public InputError {
public:
    using InputError::InputError;
};

class RangeError : public InputError {
public:
    using InputError::InputError;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InstabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Carries every violation found while validating a configuration.
class ConfigError : public InputError {
public:
    explicit ConfigError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

}  // namespace tlsscope
