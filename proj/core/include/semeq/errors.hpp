#pragma once

#include <stdexcept>
#include <string>

namespace semeq {

// Bad user input: malformed config files, inconsistent dimensions between
// files on disk, unknown keys. CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric routine left its domain of validity: ill-conditioned Gram matrix,
// non-finite entries where finite ones are required, singular covariance.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solve ran out of iterations. CLI maps this to exit code 2.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem trouble: unreadable input, unwritable output. Exit code 3.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace semeq
