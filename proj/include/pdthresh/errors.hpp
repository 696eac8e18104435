#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace pdthresh {

// Exception types. The CLI maps InvalidArgument to a usage failure and
// everything else to a computation failure.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Iterative method failed to converge or an LP could not be solved.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        double residual = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A matrix failed correlation-matrix certification.
class CorrelationError : public std::runtime_error {
 public:
  CorrelationError(const std::string& what, double min_eig)
      : std::runtime_error(what), min_eig_(min_eig) {}

  double min_eig() const noexcept { return min_eig_; }

 private:
  double min_eig_;
};

/// A guarantee that should hold mathematically was observed to fail.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pdthresh
