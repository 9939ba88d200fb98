#pragma once

#include <stdexcept>
#include <string>

namespace ppca {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A parameter value falls outside the grid's admissible range.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Mismatched vector/matrix dimensions between model, data and coefficients.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A bin endpoint has no observations with nonzero (or above-threshold) weight.
class EmptyEndpointError : public Error {
 public:
  using Error::Error;
};

/// A bin contains no observations (independent per-bin fits need every bin).
class EmptyBinError : public Error {
 public:
  using Error::Error;
};

/// The linear system for the mean update is singular.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Gradient descent produced non-finite values.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A basis vector that should be renormalized has (near-)zero norm.
class DegenerateBasisError : public Error {
 public:
  using Error::Error;
};

/// Basis reordering cannot proceed (non-monotone widths or a direction that
/// is incompatible with them).
class ReorderError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values (iteration counts, rates, penalties, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File I/O and format problems.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppca
