#pragma once

#include <stdexcept>
#include <string>

namespace fbls {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (shape mismatch, bad count, ...).
struct PreconditionError : Error {
    using Error::Error;
};

/// Shapes of two operands are incompatible.
struct DimensionError : PreconditionError {
    using PreconditionError::PreconditionError;
};

/// Input data is malformed (non-finite values, ragged CSV rows, ...).
struct DataError : Error {
    using Error::Error;
};

/// A numerical routine could not proceed (singular pivot, zero scale, ...).
struct NumericError : Error {
    using Error::Error;
};

/// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

/// Persisted model and pseudoinverse state do not belong together.
struct StateError : Error {
    using Error::Error;
};

} // namespace fbls
