#include <cmath>
#include <string>

#include "kmig/errors.hpp"
#include "kmig/specfun.hpp"

namespace kmig::specfun {

void EvalPolicy::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("EvalPolicy: rel_tol must be > 0");
  if (!(abs_tol >= 0.0)) throw DomainError("EvalPolicy: abs_tol must be >= 0");
  if (max_terms < 1) throw DomainError("EvalPolicy: max_terms must be >= 1");
}

SignedLogValue pochhammer_log(double a, int n) {
  if (n < 0) throw DomainError("pochhammer_log: n must be >= 0");
  double log_mag = 0.0;
  int sign = 1;
  for (int k = 0; k < n; ++k) {
    const double factor = a + k;
    if (factor == 0.0) return SignedLogValue::zero();
    if (factor < 0.0) sign = -sign;
    log_mag += std::log(std::fabs(factor));
  }
  return SignedLogValue::from_log(log_mag, sign);
}

SignedLogValue gen_binomial_log(double xi, int i) {
  if (i < 0) throw DomainError("gen_binomial_log: i must be >= 0");
  double log_mag = 0.0;
  int sign = 1;
  for (int k = 0; k < i; ++k) {
    const double factor = xi - k;
    if (factor == 0.0) return SignedLogValue::zero();
    if (factor < 0.0) sign = -sign;
    log_mag += std::log(std::fabs(factor));
  }
  return SignedLogValue::from_log(log_mag - ln_gamma(i + 1.0), sign);
}

SignedLogValue kummer_1f1(double a, double b, double z, const EvalPolicy& policy) {
  policy.validate();
  if (b <= 0.0 && b == std::floor(b)) {
    throw DomainError("kummer_1f1: b must not be a non-positive integer, got " + std::to_string(b));
  }
  if (z == 0.0) return SignedLogValue::one();

  LogAccumulator sum;
  SignedLogValue term = SignedLogValue::one();
  sum.add(term);
  const SignedLogValue log_z = SignedLogValue::from_double(z);
  const double log_abs_tol = std::log(policy.abs_tol);
  for (int n = 0; n < policy.max_terms; ++n) {
    const double an = a + n;
    if (an == 0.0) return sum.result();  // terminating polynomial
    const double ratio = std::fabs(an * z / ((b + n) * (n + 1.0)));
    term = term * SignedLogValue::from_double(an) * log_z /
           SignedLogValue::from_double((b + n) * (n + 1.0));
    sum.add(term);
    const SignedLogValue partial = sum.result();
    const bool small = term.log_magnitude <= std::log(policy.rel_tol) + partial.log_magnitude ||
                       term.log_magnitude <= log_abs_tol;
    if (small && ratio < 1.0 && n + 1.0 >= std::fabs(z)) return partial;
  }
  throw ConvergenceError("kummer_1f1: series did not converge within max_terms",
                         sum.result().value());
}

}  // namespace kmig::specfun
