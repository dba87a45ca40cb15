#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chns {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Evaluation outside the domain of a constitutive law (e.g. |r| >= 1 for the
/// unregularized logarithmic potential).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative solver did not reach its tolerance.  The residual history is
/// kept so callers can report it.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history = {})
        : Error(what), history_(std::move(history)) {}

    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or incompatible binary/text file.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace chns
