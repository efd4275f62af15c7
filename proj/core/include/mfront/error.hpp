#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfront {

using Index = std::int32_t;
using TaskId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedDegreeError : public Error {
 public:
  explicit UnsupportedDegreeError(int degree)
      : Error("unsupported polynomial degree " + std::to_string(degree) +
              " (expected 1, 2 or 3)"),
        degree_(degree) {}
  int degree() const { return degree_; }

 private:
  int degree_;
};

class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// A pivot position that never holds a structural entry.
class SymbolicSingularityError : public Error {
 public:
  explicit SymbolicSingularityError(Index pivot)
      : Error("structurally singular: diagonal entry of pivot " +
              std::to_string(pivot) + " is absent"),
        pivot_(pivot) {}
  Index pivot() const { return pivot_; }

 private:
  Index pivot_;
};

/// A pivot whose magnitude fell below the zero-pivot threshold.
class ZeroPivotError : public Error {
 public:
  ZeroPivotError(Index front, Index pivot, double value)
      : Error("zero pivot at global index " + std::to_string(pivot) +
              " in front " + std::to_string(front) + " (value " +
              std::to_string(value) + ")"),
        front_(front),
        pivot_(pivot),
        value_(value) {}
  Index front() const { return front_; }
  Index pivot() const { return pivot_; }
  double value() const { return value_; }

 private:
  Index front_;
  Index pivot_;
  double value_;
};

class CycleError : public Error {
 public:
  CycleError(const std::string& what, std::vector<TaskId> cycle)
      : Error(what), cycle_(std::move(cycle)) {}
  const std::vector<TaskId>& cycle() const { return cycle_; }

 private:
  std::vector<TaskId> cycle_;
};

/// Raised by the debug-mode checks of the executor and by internal
/// consistency checks that must never fire on valid input.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace mfront
