#include "kmig/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "kmig/errors.hpp"

namespace kmig::quad {

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kKronrodNodes[1], [3], [5], [7].
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Largest/smallest t for which e^t is a normal double.
constexpr double kMaxLogArg = 709.0;
constexpr double kMinLogArg = -708.0;

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

double checked(double v, double x) {
  if (!std::isfinite(v)) {
    throw QuadratureError("integrand is not finite at x = " + std::to_string(x), 0.0,
                          std::numeric_limits<double>::infinity());
  }
  return v;
}

Panel kronrod15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f(center), center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = checked(f(center - dx), center - dx);
    const double f2 = checked(f(center + dx), center + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::fabs(kronrod - gauss)};
}

QuadResult integrate_exp_sinh(const Integrand& f, const QuadratureSpec& spec, double scale) {
  constexpr double t_max = 6.5;
  constexpr int max_level = 8;
  const double half_pi = 0.5 * std::numbers::pi;
  int evaluations = 0;
  auto node = [&](double t) {
    const double s = half_pi * std::sinh(t);
    if (s > kMaxLogArg - std::log(scale) || s < kMinLogArg - std::log(scale)) return 0.0;
    const double y = scale * std::exp(s);
    ++evaluations;
    return checked(f(y), y) * y * half_pi * std::cosh(t);
  };
  double h = 0.5;
  double sum = node(0.0);
  for (double t = h; t <= t_max; t += h) sum += node(t) + node(-t);
  double estimate = h * sum;
  double error = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += node(t) + node(-t);
    const double next = h * sum;
    error = std::fabs(next - estimate);
    estimate = next;
    if (error <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(estimate))) {
      return {estimate, error, evaluations};
    }
  }
  throw QuadratureError("exp-sinh quadrature did not converge", estimate, error);
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("QuadratureSpec: rel_tol must be > 0");
  if (!(abs_tol >= 0.0)) throw DomainError("QuadratureSpec: abs_tol must be >= 0");
  if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
}

QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  if (a == b) return {};
  if (a > b) {
    QuadResult r = integrate(f, b, a, spec);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<Panel> panels;
  Panel first = kronrod15(f, a, b);
  double total = first.value;
  double total_error = first.error;
  panels.push(first);
  int evaluations = 15;
  int subdivisions = 1;
  while (total_error > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total))) {
    if (subdivisions >= spec.max_subdivisions) {
      throw QuadratureError("adaptive quadrature hit max_subdivisions", total, total_error);
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("adaptive quadrature reached machine resolution", total, total_error);
    }
    const Panel left = kronrod15(f, worst.a, mid);
    const Panel right = kronrod15(f, mid, worst.b);
    evaluations += 30;
    ++subdivisions;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum the panels to shed the drift of the incremental updates.
  double value = 0.0;
  double error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, evaluations};
}

QuadResult integrate_positive(const Integrand& f, double lo, double hi, const QuadratureSpec& spec,
                              double scale_hint) {
  spec.validate();
  if (!(lo >= 0.0) || !(hi > lo)) throw DomainError("integrate_positive: need 0 <= lo < hi");
  if (!(scale_hint > 0.0) || !std::isfinite(scale_hint)) scale_hint = 1.0;

  const bool open_lo = lo == 0.0;
  const bool open_hi = std::isinf(hi);
  if (spec.transform == Transform::double_exponential && open_lo && open_hi) {
    return integrate_exp_sinh(f, spec, scale_hint);
  }

  const Integrand g = [&f](double t) {
    const double y = std::exp(t);
    return y == 0.0 || std::isinf(y) ? 0.0 : f(y) * y;
  };
  const double t_lo = open_lo ? kMinLogArg : std::log(lo);
  const double t_hi = open_hi ? kMaxLogArg : std::log(hi);
  if (!open_lo && !open_hi) return integrate(g, t_lo, t_hi, spec);

  // Recentre on the largest sampled value of the transformed integrand.
  double center = std::clamp(std::log(scale_hint), t_lo, t_hi);
  {
    double best = 0.0;
    double best_t = center;
    const double c0 = center;
    for (int k = -40; k <= 40; ++k) {
      const double t = c0 + k;
      if (t < t_lo || t > t_hi) continue;
      const double v = std::fabs(g(t));
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    if (best == 0.0) return {};
    center = best_t;
  }

  constexpr double initial_half_width = 4.0;
  double left = std::max(t_lo, center - initial_half_width);
  double right = std::min(t_hi, center + initial_half_width);
  QuadResult total = integrate(g, left, right, spec);

  auto extend = [&](bool towards_lo) {
    double step = initial_half_width;
    while (true) {
      double a;
      double b;
      if (towards_lo) {
        if (left <= t_lo) return;
        a = std::max(t_lo, left - step);
        b = left;
        left = a;
      } else {
        if (right >= t_hi) return;
        a = right;
        b = std::min(t_hi, right + step);
        right = b;
      }
      QuadratureSpec piece_spec = spec;
      piece_spec.abs_tol = std::max(spec.abs_tol, 0.1 * spec.rel_tol * std::fabs(total.value));
      const QuadResult piece = integrate(g, a, b, piece_spec);
      total.value += piece.value;
      total.error += piece.error;
      total.evaluations += piece.evaluations;
      const double edge = std::fabs(g(towards_lo ? a : b));
      const double negligible = std::max(spec.abs_tol, spec.rel_tol * std::fabs(total.value));
      if (std::fabs(piece.value) <= negligible && edge * step <= negligible) return;
      step *= 2.0;
    }
  };
  if (open_lo) extend(true);
  if (open_hi) extend(false);
  // A closed end inside the initial window still needs its remaining piece.
  if (!open_lo && left > t_lo) {
    const QuadResult piece = integrate(g, t_lo, left, spec);
    total.value += piece.value;
    total.error += piece.error;
  }
  if (!open_hi && right < t_hi) {
    const QuadResult piece = integrate(g, right, t_hi, spec);
    total.value += piece.value;
    total.error += piece.error;
  }
  return total;
}

}  // namespace kmig::quad
