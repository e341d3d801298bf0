#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kalman {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Gauss-Jordan elimination found no usable pivot in `column`.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::size_t column)
      : Error(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// Argument outside the mathematical domain (negative ToA, non-SPD covariance, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operation produced a non-finite or otherwise invalid result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Too few operands (e.g. fewer than three anchors).
class ArityError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class AmbiguityError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an output file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A simulation run failed. Carries the step at which the filter failed and
/// the seed of the run so the failure can be replayed.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::size_t step, std::uint64_t seed)
      : Error(what), step_(step), seed_(seed) {}
  std::size_t step() const noexcept { return step_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t step_;
  std::uint64_t seed_;
};

}  // namespace kalman
