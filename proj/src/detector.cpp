#include "kmig/detector.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kmig/errors.hpp"

namespace kmig::detector {

void EDConfig::validate() const {
  if (!(u >= 1.0) || !std::isfinite(u)) {
    throw DomainError("EDConfig: u must be >= 1, got " + std::to_string(u));
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("EDConfig: lambda must be > 0, got " + std::to_string(lambda));
  }
}

double false_alarm_prob(const EDConfig& cfg) {
  cfg.validate();
  return specfun::gamma_q(cfg.u, 0.5 * cfg.lambda);
}

double threshold_for_pf(double u, double target_pf) {
  if (!(u >= 1.0)) throw DomainError("threshold_for_pf: u must be >= 1");
  if (!(target_pf > 0.0 && target_pf < 1.0)) {
    throw DomainError("threshold_for_pf: target_pf must lie in (0, 1)");
  }
  // Work in x = lambda/2, where P_f = Q(u, x) falls strictly from 1 to 0.
  double lo = 0.0;
  double hi = std::max(1.0, u);
  while (specfun::gamma_q(u, hi) > target_pf) {
    lo = hi;
    hi *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    const double q = specfun::gamma_q(u, x);
    const double diff = q - target_pf;
    if (std::fabs(diff) <= 1e-15 * target_pf) break;
    if (diff > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    // Newton step on Q(u, x), dQ/dx = -x^{u-1} e^{-x} / Gamma(u).
    const double slope = -std::exp((u - 1.0) * std::log(x) - x - specfun::ln_gamma(u));
    double next = slope != 0.0 ? x - diff / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return 2.0 * x;
}

double detection_prob_conditional(double gamma, const EDConfig& cfg,
                                  const specfun::EvalPolicy& policy) {
  cfg.validate();
  if (!(gamma >= 0.0)) throw DomainError("detection_prob_conditional: gamma must be >= 0");
  if (gamma == 0.0) return false_alarm_prob(cfg);
  return specfun::marcum_q(cfg.u, std::sqrt(2.0 * gamma), std::sqrt(cfg.lambda), policy);
}

}  // namespace kmig::detector
