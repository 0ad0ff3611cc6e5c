#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splinecolloc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Query point outside the domain of a spline or sample hull.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Raised by the ABD factorization when no admissible pivot exceeds the
/// singularity threshold. `block()` is the block (elimination stage) that
/// failed; callers map it back to their own layout (e.g. a partition cell).
class SingularMatrix : public Error {
 public:
  SingularMatrix(const std::string& what, std::size_t block)
      : Error(what), block_(block) {}
  std::size_t block() const noexcept { return block_; }

 private:
  std::size_t block_;
};

class NumericalInstability : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace splinecolloc
