#pragma once

#include "kmig/specfun.hpp"

namespace kmig::detector {

/// Energy detector operating point.
struct EDConfig {
  double u = 4.0;        ///< time-bandwidth product TW (half the degrees of freedom), >= 1
  double lambda = 15.0;  ///< energy threshold, > 0

  void validate() const;
};

/// Survival function of chi^2_{2u} at lambda: Q(u, lambda/2).
double false_alarm_prob(const EDConfig& cfg);

/// Threshold lambda with false_alarm_prob(u, lambda) == target_pf.
double threshold_for_pf(double u, double target_pf);

/// Q_u(sqrt(2 gamma), sqrt(lambda)).
double detection_prob_conditional(double gamma, const EDConfig& cfg,
                                  const specfun::EvalPolicy& policy = {});

}  // namespace kmig::detector
