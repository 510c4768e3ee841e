#pragma once

#include <cmath>
#include <limits>

namespace kmig {

/// A real number stored as sign * exp(log_magnitude).
///
/// Used wherever products like Gamma(l+mu) * mu^(2n) * gamma_bar^l would leave
/// the double range long before the series they belong to has converged.
/// A zero value has sign == 0 and its log_magnitude is -inf.
struct SignedLogValue {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static SignedLogValue zero() noexcept { return {}; }
  static SignedLogValue one() noexcept { return {0.0, 1}; }
  static SignedLogValue from_log(double log_magnitude, int sign = 1) noexcept {
    if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) return {};
    return {log_magnitude, sign > 0 ? 1 : -1};
  }
  static SignedLogValue from_double(double x) noexcept {
    if (x == 0.0) return {};
    return {std::log(std::fabs(x)), x > 0.0 ? 1 : -1};
  }

  bool is_zero() const noexcept { return sign == 0; }

  /// Linear value; overflows to +-inf or underflows to 0 outside double range.
  double value() const noexcept {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_magnitude);
  }

  SignedLogValue operator-() const noexcept { return {log_magnitude, -sign}; }
};

inline SignedLogValue operator*(SignedLogValue a, SignedLogValue b) noexcept {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.log_magnitude + b.log_magnitude, a.sign * b.sign};
}

inline SignedLogValue operator/(SignedLogValue a, SignedLogValue b) noexcept {
  // Division by zero yields an infinite magnitude with a's sign.
  if (a.sign == 0) return {};
  if (b.sign == 0) return {std::numeric_limits<double>::infinity(), a.sign};
  return {a.log_magnitude - b.log_magnitude, a.sign * b.sign};
}

SignedLogValue operator+(SignedLogValue a, SignedLogValue b) noexcept;
inline SignedLogValue operator-(SignedLogValue a, SignedLogValue b) noexcept { return a + (-b); }

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void scale(double factor) noexcept {
    sum_ *= factor;
    comp_ *= factor;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Accumulates SignedLogValue terms of either sign.
///
/// Positive and negative terms go into separate compensated sums that share a
/// common scale (the largest magnitude seen so far); they are combined in the
/// linear domain only when the result is requested.
class LogAccumulator {
 public:
  void add(SignedLogValue term) noexcept;

  SignedLogValue result() const noexcept;

  /// Largest term magnitude seen, in log domain (-inf if none).
  double max_log_term() const noexcept { return scale_; }

  /// Sum of |terms| in log domain; the cancellation ratio is
  /// exp(log_abs_sum() - result().log_magnitude).
  double log_abs_sum() const noexcept;

 private:
  double scale_ = -std::numeric_limits<double>::infinity();
  CompensatedSum positive_;
  CompensatedSum negative_;
};

}  // namespace kmig
