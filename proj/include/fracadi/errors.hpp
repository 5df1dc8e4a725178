#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracadi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or extents of two operands do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// LU factorization hit a pivot below the singularity threshold.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t pivot, const std::string& what)
      : Error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// A field picked up NaN or Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// The requested scheme cannot be used on this problem.
class InadmissibleSchemeError : public Error {
 public:
  using Error::Error;
};

/// Bad user configuration (unknown keys, malformed values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracadi
