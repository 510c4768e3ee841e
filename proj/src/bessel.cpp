#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "kmig/errors.hpp"
#include "kmig/specfun.hpp"

namespace kmig::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHankelMinArg = 30.0;

// ln I_nu(x) from the ascending series, rescaling the running sum so large x
// cannot overflow.
double log_i_series(double nu, double x) {
  const double q = 0.25 * x * x;
  const double log_first = nu * std::log(0.5 * x) - ln_gamma(nu + 1.0);
  constexpr double big = 1e250;
  const double log_big = std::log(big);
  double term = 1.0;
  double sum = 1.0;
  double log_offset = 0.0;
  for (int k = 0;; ++k) {
    const double ratio = q / ((k + 1.0) * (k + 1.0 + nu));
    term *= ratio;
    sum += term;
    if (ratio < 1.0 && term < 0.5 * kEps * sum) break;
    if (sum > big) {
      sum /= big;
      term /= big;
      log_offset += log_big;
    }
  }
  return log_first + log_offset + std::log(sum);
}

// ln I_nu(x) from Hankel's expansion; empty if the terms start growing before
// reaching machine precision.
std::optional<double> log_i_hankel(double nu, double x) {
  const double mu4 = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu4 - odd * odd) / (8.0 * k * x);
    const double mag = std::fabs(term);
    if (mag > prev) return std::nullopt;
    sum += term;
    if (mag < 0.5 * kEps * std::fabs(sum)) {
      if (!(sum > 0.0)) return std::nullopt;
      return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
    }
    prev = mag;
  }
  return std::nullopt;
}

}  // namespace

double log_bessel_i(double nu, double x) {
  if (!(nu > -1.0)) throw DomainError("bessel_i: order must be > -1, got " + std::to_string(nu));
  if (!(x >= 0.0)) throw DomainError("bessel_i: x must be >= 0, got " + std::to_string(x));
  if (x == 0.0) {
    if (nu == 0.0) return 0.0;
    return nu > 0.0 ? -kInf : kInf;
  }
  if (x > kHankelMinArg && x >= nu * nu) {
    if (auto v = log_i_hankel(nu, x)) return *v;
  }
  return log_i_series(nu, x);
}

double bessel_i(double nu, double x, bool scaled) {
  const double log_value = log_bessel_i(nu, x);
  return std::exp(scaled ? log_value - x : log_value);
}

SignedLogValue bessel_k_half(int m, double x, bool scaled) {
  if (m < 0) throw DomainError("bessel_k_half: m must be >= 0, got " + std::to_string(m));
  if (!(x > 0.0)) throw DomainError("bessel_k_half: x must be > 0, got " + std::to_string(x));
  LogAccumulator sum;
  double log_term = 0.0;
  sum.add(SignedLogValue::from_log(log_term));
  const double log_two_x = std::log(2.0 * x);
  for (int j = 0; j < m; ++j) {
    log_term += std::log(static_cast<double>(m + j + 1)) + std::log(static_cast<double>(m - j)) -
                std::log(static_cast<double>(j + 1)) - log_two_x;
    sum.add(SignedLogValue::from_log(log_term));
  }
  const double log_prefactor = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - (scaled ? 0.0 : x);
  return SignedLogValue::from_log(log_prefactor) * sum.result();
}

}  // namespace kmig::specfun
