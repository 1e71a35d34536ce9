#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace specshape {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameters, malformed configs, length mismatches.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An operation was invoked on a pulse-train spec of the wrong kind.
class ModelMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A documented precondition (sampling rate, series length, ...) does not hold.
class PreconditionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Numerical failure, e.g. quadrature that did not reach its tolerance.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, std::optional<int> index = std::nullopt)
        : Error(what), index_(index) {}

    /// 1-based subcarrier index when the failure is tied to one subcarrier.
    std::optional<int> index() const { return index_; }

private:
    std::optional<int> index_;
};

}  // namespace specshape
