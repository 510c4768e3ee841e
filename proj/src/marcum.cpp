#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "kmig/errors.hpp"
#include "kmig/specfun.hpp"

namespace kmig::specfun {

namespace {

// Chernoff bound on P(Y <= lambda) for Y ~ noncentral chi^2(2u, 2 gamma):
// P <= exp(s lambda) (1+2s)^{-u} exp(-2 gamma s / (1+2s)) for any s > 0.
double miss_probability_bound(double u, double gamma, double lambda) {
  static constexpr std::array<double, 9> kS = {0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 1.0, 2.0, 5.0};
  double best = 0.0;
  for (double s : kS) {
    const double log_bound =
        s * lambda - u * std::log1p(2.0 * s) - 2.0 * gamma * s / (1.0 + 2.0 * s);
    best = std::min(best, log_bound);
  }
  return std::exp(best);
}

}  // namespace

double marcum_q(double u, double a, double b, const EvalPolicy& policy) {
  policy.validate();
  if (!(u >= 1.0)) throw DomainError("marcum_q: order u must be >= 1, got " + std::to_string(u));
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("marcum_q: a and b must be >= 0");
  if (b == 0.0) return 1.0;

  const double gamma = 0.5 * a * a;
  const double lambda = b * b;
  const double x = 0.5 * lambda;
  if (gamma == 0.0) return gamma_q(u, x);
  if (miss_probability_bound(u, gamma, lambda) < 0.5 * policy.rel_tol) return 1.0;

  // Poisson weight w_l = e^{-gamma} gamma^l / l! and Q_l = Q(l+u, x), both
  // stepped by recurrence away from the mode l0.
  const long l0 = static_cast<long>(std::floor(gamma));
  const double w0 = std::exp(log_gamma_prefactor(static_cast<double>(l0), gamma));
  const double q0 = gamma_q(l0 + u, x);
  // d_l = x^{l+u} e^{-x} / Gamma(l+u+1), the step between Q_l and Q_{l+1}.
  const double d0 = std::exp(log_gamma_prefactor(l0 + u, x));

  CompensatedSum sum;
  sum.add(w0 * q0);
  int terms = 1;

  auto converged = [&](double bound) {
    return bound <= std::max(policy.rel_tol * sum.value(), policy.abs_tol);
  };

  // Upward: Q_{l+1} = Q_l + d_l, stable.
  {
    double w = w0;
    double q = q0;
    double d = d0;
    for (long l = l0;; ++l) {
      const double l_next = static_cast<double>(l + 1);
      q = std::min(1.0, q + d);
      d *= x / (l_next + u);
      w *= gamma / l_next;
      sum.add(w * q);
      if (++terms > policy.max_terms) {
        throw ConvergenceError("marcum_q: exceeded max_terms", sum.value());
      }
      // Remaining mass sum_{k>l+1} w_k <= w_{l+2} / (1 - gamma/(l+3)).
      const double ratio = gamma / (l_next + 2.0);
      if (ratio < 1.0) {
        const double tail = w * (gamma / (l_next + 1.0)) / (1.0 - ratio);
        if (converged(tail)) break;
      }
    }
  }

  // Downward: Q_{l-1} = Q_l - d_{l-1}. Cancellation here is bounded by eps*Q_{l0}
  // per term, which is small against the w_{l0} Q_{l0} already summed.
  {
    double w = w0;
    double q = q0;
    double d = d0;
    for (long l = l0; l > 0; --l) {
      const double ld = static_cast<double>(l);
      d *= (ld - 1.0 + u + 1.0) / x;  // d_{l-1} = d_l (l-1+u+1) / x
      q = std::max(0.0, q - d);
      w *= ld / gamma;
      sum.add(w * q);
      if (++terms > policy.max_terms) {
        throw ConvergenceError("marcum_q: exceeded max_terms", sum.value());
      }
      // Remaining sum_{k<l-1} w_k Q_k <= Q_{l-1} w_{l-2} / (1 - (l-2)/gamma).
      if (l >= 2) {
        const double ratio = (ld - 2.0) / gamma;
        const double tail = q * w * ((ld - 1.0) / gamma) / (1.0 - ratio);
        if (ratio < 1.0 && converged(tail)) break;
      }
    }
  }
  return std::clamp(sum.value(), 0.0, 1.0);
}

}  // namespace kmig::specfun
