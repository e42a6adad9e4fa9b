#pragma once

#include <stdexcept>
#include <string>

namespace ddiv {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A polynomial operation would need a monomial beyond the degree bound.
class DegreeBoundError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or non-parallelogram geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A factorization met a pivot that is zero to working precision.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, long index, double pivot)
      : Error(what), index_(index), pivot_(pivot) {}

  /// Row/column (unknown) index at which the breakdown occurred, -1 if unknown.
  long index() const noexcept { return index_; }
  double pivot() const noexcept { return pivot_; }

 private:
  long index_;
  double pivot_;
};

class MaterialError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddiv
