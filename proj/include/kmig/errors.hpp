#pragma once

#include <stdexcept>
#include <string>

namespace kmig {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series ran out of terms before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial_value)
      : std::runtime_error(what), partial_value_(partial_value) {}

  double partial_value() const noexcept { return partial_value_; }

 private:
  double partial_value_;
};

/// Adaptive quadrature exhausted its subdivision budget.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

}  // namespace kmig
