#pragma once

#include "kmig/signed_log.hpp"

namespace kmig::specfun {

/// Convergence control shared by every series kernel in this module.
struct EvalPolicy {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  int max_terms = 10000;

  /// Throws DomainError unless rel_tol > 0, abs_tol >= 0 and max_terms >= 1.
  void validate() const;
};

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// ln( x^a e^{-x} / Gamma(a+1) ), evaluated without the cancellation that the
/// naive a*ln(x) - x - lnGamma(a+1) suffers for large a.
double log_gamma_prefactor(double a, double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gamma_q(double a, double x);

/// ln Gamma(a, x) (upper, unregularized).
double log_upper_incomplete_gamma(double a, double x);

/// Gamma(a, x) (upper, unregularized). a > 0, x >= 0.
double upper_incomplete_gamma(double a, double x);

/// ln I_nu(x) for nu > -1, x >= 0.
double log_bessel_i(double nu, double x);

/// Modified Bessel function of the first kind I_nu(x), or e^{-x} I_nu(x) when
/// `scaled` is set.
///
/// Power series below the switch point, Hankel's large-argument expansion
/// above it (x > 30 and x >= nu^2). If the expansion fails to reach tolerance
/// the power series is used with running rescaling, so every (nu, x) in the
/// domain is covered.
double bessel_i(double nu, double x, bool scaled = false);

/// K_{m+1/2}(x) from the terminating sum
///   sqrt(pi/(2x)) e^{-x} sum_{j=0}^{m} (m+j)! / (j! (m-j)! (2x)^j).
/// With `scaled` the factor e^{-x} is dropped (returns e^{x} K).
/// Since K_{-v} = K_v, order -1/2 is m = 0.
SignedLogValue bessel_k_half(int m, double x, bool scaled = false);

/// Pochhammer symbol (a)_n = a (a+1) ... (a+n-1) with sign tracking.
SignedLogValue pochhammer_log(double a, int n);

/// Generalized binomial coefficient xi (xi-1) ... (xi-i+1) / i! for real xi.
SignedLogValue gen_binomial_log(double xi, int i);

/// Generalized Marcum Q-function Q_u(a, b), via the Poisson-weighted
/// incomplete gamma series with gamma = a^2/2, lambda = b^2.
///
/// Terms are summed outward from the Poisson mode. Truncation uses the
/// remaining Poisson mass on each side as a bound. Throws ConvergenceError
/// (carrying the partial sum) past policy.max_terms.
double marcum_q(double u, double a, double b, const EvalPolicy& policy = {});

/// Kummer's confluent hypergeometric function 1F1(a; b; z) by direct series.
SignedLogValue kummer_1f1(double a, double b, double z, const EvalPolicy& policy = {});

}  // namespace kmig::specfun
