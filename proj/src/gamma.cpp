#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kmig/errors.hpp"
#include "kmig/specfun.hpp"

namespace kmig::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxGammaIterations = 200000;

// lnGamma(a+1) - [(a+1/2) ln a - a + ln(2 pi)/2], Stirling tail for a >= 10.
double stirling_correction(double a) {
  const double r = 1.0 / a;
  const double r2 = r * r;
  return r * (1.0 / 12.0 -
              r2 * (1.0 / 360.0 -
                    r2 * (1.0 / 1260.0 -
                          r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0 - r2 * (691.0 / 360360.0))))));
}

void check_incomplete_args(double a, double x) {
  if (!(a > 0.0)) throw DomainError("incomplete gamma: a must be > 0, got " + std::to_string(a));
  if (!(x >= 0.0)) throw DomainError("incomplete gamma: x must be >= 0, got " + std::to_string(x));
}

// sum_{n>=0} x^n / ((a+1)...(a+n)), so that P(a,x) = exp(prefactor) * sum.
double lower_series(double a, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < kMaxGammaIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * kEps) return sum;
  }
  throw ConvergenceError("incomplete gamma series did not converge", sum);
}

// Modified Lentz evaluation of the continued fraction for Q(a,x); returns h
// with Q = a * exp(prefactor) * h.
double upper_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxGammaIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge", h);
}

double log_gamma_q_impl(double a, double x) {
  if (x == 0.0) return 0.0;
  const double lp = log_gamma_prefactor(a, x);
  if (x < a + 1.0) {
    const double p = std::exp(lp) * lower_series(a, x);
    return std::log1p(-p);
  }
  return std::log(a) + lp + std::log(upper_fraction(a, x));
}

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("ln_gamma: x must be > 0, got " + std::to_string(x));
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_gamma_prefactor(double a, double x) {
  if (x == 0.0) return a == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (a < 10.0) return a * std::log(x) - x - ln_gamma(a + 1.0);
  const double t = (x - a) / a;
  return a * (std::log1p(t) - t) - 0.5 * std::log(2.0 * std::numbers::pi * a) -
         stirling_correction(a);
}

double gamma_p(double a, double x) {
  check_incomplete_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::exp(log_gamma_prefactor(a, x)) * lower_series(a, x);
  return -std::expm1(log_gamma_q_impl(a, x));
}

double gamma_q(double a, double x) {
  check_incomplete_args(a, x);
  return std::exp(log_gamma_q_impl(a, x));
}

double log_upper_incomplete_gamma(double a, double x) {
  check_incomplete_args(a, x);
  return ln_gamma(a) + log_gamma_q_impl(a, x);
}

double upper_incomplete_gamma(double a, double x) {
  return std::exp(log_upper_incomplete_gamma(a, x));
}

}  // namespace kmig::specfun
