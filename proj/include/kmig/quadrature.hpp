#pragma once

#include <functional>
#include <limits>

namespace kmig::quad {

enum class Transform {
  log_substitution,    ///< y = e^t, adaptive Gauss-Kronrod over a growing t-window
  double_exponential,  ///< exp-sinh trapezoid rule with step halving
};

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
  Transform transform = Transform::log_substitution;

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod on a finite interval. Throws
/// QuadratureError carrying the best estimate when max_subdivisions is hit.
QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec);

/// Integral of f over (lo, hi) with 0 <= lo < hi <= +inf, for integrands that
/// are smooth in log(y) and decay at whichever ends are open.
///
/// `scale_hint` is a typical abscissa (e.g. the mean of the distribution
/// being integrated); the window is recentred on the largest sampled
/// integrand value before adaptive refinement starts.
QuadResult integrate_positive(const Integrand& f, double lo, double hi, const QuadratureSpec& spec,
                              double scale_hint = 1.0);

inline QuadResult integrate_positive(const Integrand& f, const QuadratureSpec& spec,
                                     double scale_hint = 1.0) {
  return integrate_positive(f, 0.0, std::numeric_limits<double>::infinity(), spec, scale_hint);
}

}  // namespace kmig::quad
