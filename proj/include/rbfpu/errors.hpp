#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbfpu {

/// Invalid arguments or violated preconditions (maps to CLI exit code 1).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that breaks a data invariant (duplicate nodes, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base for failures of the numerical procedure itself (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Cholesky pivot fell below the acceptance threshold.
class NotNumericallyPD : public NumericalError {
 public:
  NotNumericallyPD(const std::string& what, std::ptrdiff_t pivot, std::ptrdiff_t patch = -1)
      : NumericalError(what), pivot_(pivot), patch_(patch) {}
  std::ptrdiff_t pivot() const noexcept { return pivot_; }
  /// Patch id when raised while fitting a partition-of-unity model, else -1.
  std::ptrdiff_t patch() const noexcept { return patch_; }

 private:
  std::ptrdiff_t pivot_;
  std::ptrdiff_t patch_;
};

/// A patch does not capture enough nodes to be fitted.
class CoveringError : public NumericalError {
 public:
  CoveringError(const std::string& what, std::ptrdiff_t patch, std::size_t n_points)
      : NumericalError(what), patch_(patch), n_points_(n_points) {}
  std::ptrdiff_t patch() const noexcept { return patch_; }
  std::size_t n_points() const noexcept { return n_points_; }

 private:
  std::ptrdiff_t patch_;
  std::size_t n_points_;
};

/// An evaluation point lies outside every patch.
class CoverageError : public NumericalError {
 public:
  CoverageError(const std::string& what, std::vector<double> point)
      : NumericalError(what), point_(std::move(point)) {}
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

}  // namespace rbfpu
