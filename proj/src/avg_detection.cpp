#include "kmig/avg_detection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kmig/errors.hpp"
#include "kmig/specfun.hpp"

namespace kmig::avg {

namespace {

using channel::CompositeChannel;
using detector::EDConfig;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Quantities shared by every term of the closed-form series.
struct SeriesConstants {
  double mu;
  double kappa;
  double pole;          // f = mu (1+kappa) theta
  double log_pole;
  double log_scale;     // ln(theta * gamma_bar)
  double bessel_arg;    // eta / theta
  // ln of e^{-mu kappa} f^mu sqrt(eta/(2 pi)) e^{eta/theta} sqrt(gamma_bar) / Gamma(mu)
  double log_common;

  explicit SeriesConstants(const CompositeChannel& chan) {
    mu = chan.fading.mu;
    kappa = chan.fading.kappa;
    const double eta = chan.shadow.eta;
    const double theta = chan.shadow.theta;
    pole = mu * (1.0 + kappa) * theta;
    log_pole = std::log(pole);
    log_scale = std::log(theta * chan.gamma_bar);
    bessel_arg = eta / theta;
    log_common = -mu * kappa + mu * log_pole + 0.5 * std::log(eta / (2.0 * std::numbers::pi)) +
                 eta / theta + 0.5 * std::log(chan.gamma_bar) - specfun::ln_gamma(mu);
  }
};

// ln K_{m+1/2}(x) for m = 0..max_m by upward recurrence
// K_{v+1} = K_{v-1} + (2v/x) K_v, which is stable in this direction.
std::vector<double> half_order_log_k(int max_m, double x) {
  std::vector<double> out(static_cast<std::size_t>(max_m) + 1);
  out[0] = specfun::bessel_k_half(0, x).log_magnitude;
  if (max_m >= 1) out[1] = specfun::bessel_k_half(1, x).log_magnitude;
  for (int m = 1; m < max_m; ++m) {
    const double nu = m + 0.5;
    const double a = out[m - 1];
    const double b = std::log(2.0 * nu / x) + out[m];
    const double hi = std::max(a, b);
    out[m + 1] = hi + std::log1p(std::exp(std::min(a, b) - hi));
  }
  return out;
}

struct ISeries {
  SignedLogValue value;
  int used = 0;
  double log_residual = kNegInf;
  bool diverged = false;
};

// sum_i C(xi, i) f^{xi-i} 2 (theta gamma_bar)^{l+i-1/2} K_{l+i-1/2}(eta/theta)
ISeries binomial_bessel_series(int l, double xi, const SeriesConstants& k,
                               const std::vector<double>& log_k, const TruncationLimits& limits) {
  const double log_tol = std::log(limits.term_tol);
  std::vector<SignedLogValue> terms;
  std::vector<SignedLogValue> partial;
  terms.reserve(static_cast<std::size_t>(limits.i_max) + 1);
  partial.reserve(terms.capacity());
  LogAccumulator acc;
  double log_binom = 0.0;
  int sign = 1;
  for (int i = 0; i <= limits.i_max; ++i) {
    if (i > 0) {
      const double factor = xi - (i - 1);
      log_binom += std::log(std::fabs(factor)) - std::log(static_cast<double>(i));
      if (factor < 0.0) sign = -sign;
    }
    const int order_index = l + i >= 1 ? l + i - 1 : 0;  // |l+i-1/2| - 1/2
    const double beta = l + i - 0.5;
    const double log_term = log_binom + (xi - i) * k.log_pole + std::log(2.0) +
                            beta * k.log_scale + log_k[order_index];
    const SignedLogValue term = SignedLogValue::from_log(log_term, sign);
    acc.add(term);
    terms.push_back(term);
    partial.push_back(acc.result());
    const bool shrinking = i > 0 && term.log_magnitude < terms[i - 1].log_magnitude;
    if (shrinking && term.log_magnitude <= log_tol + partial.back().log_magnitude) {
      return {partial.back(), i + 1, term.log_magnitude, false};
    }
  }
  // Not converged: truncate at the smallest term.
  std::size_t best = 0;
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i].log_magnitude < terms[best].log_magnitude) best = i;
  }
  return {partial[best], static_cast<int>(best) + 1, terms[best].log_magnitude, true};
}

SeriesResult d2_series_impl(int l, const SeriesConstants& k, const std::vector<double>& log_k,
                            const TruncationLimits& limits) {
  SeriesResult out;
  LogAccumulator total;
  LogAccumulator residual;
  const double log_tol = std::log(limits.term_tol);
  // G(n) = (l+mu)_n (mu kappa f)^n / ((mu)_n n!)
  double log_g = 0.0;
  const double log_growth = std::log(k.mu * k.kappa * k.pole);
  int n = 0;
  bool n_converged = false;
  SignedLogValue last;
  for (; n <= limits.n_max; ++n) {
    if (n > 0) {
      log_g += std::log(l + k.mu + n - 1) + log_growth - std::log(k.mu + n - 1) - std::log(n);
    }
    const double xi = -l - k.mu - n;
    const ISeries inner = binomial_bessel_series(l, xi, k, log_k, limits);
    const SignedLogValue term = SignedLogValue::from_log(log_g) * inner.value;
    total.add(term);
    residual.add(SignedLogValue::from_log(log_g + inner.log_residual));
    out.i_used_max = std::max(out.i_used_max, inner.used);
    out.i_series_diverged = out.i_series_diverged || inner.diverged;
    last = term;
    if (n > 0 && term.log_magnitude <= log_tol + total.result().log_magnitude) {
      n_converged = true;
      break;
    }
  }
  out.n_used_max = std::min(n, limits.n_max) + 1;
  if (!n_converged) residual.add(SignedLogValue::from_log(last.log_magnitude));
  out.log_value = total.result();
  out.value = out.raw_value = out.log_value.value();
  out.residual_estimate = residual.result().value();
  out.l_used = l + 1;
  return out;
}

}  // namespace

void TruncationLimits::validate() const {
  if (l_max < 1 || n_max < 1 || i_max < 1) {
    throw DomainError("TruncationLimits: l_max, n_max and i_max must be >= 1");
  }
  if (!(term_tol > 0.0)) throw DomainError("TruncationLimits: term_tol must be > 0");
}

double avg_pd_quadrature(const CompositeChannel& chan, const EDConfig& cfg,
                         const quad::QuadratureSpec& quad) {
  return avg_pd_quadrature_result(chan, cfg, quad).value;
}

quad::QuadResult avg_pd_quadrature_result(const CompositeChannel& chan, const EDConfig& cfg,
                                          const quad::QuadratureSpec& quad) {
  chan.validate();
  cfg.validate();
  quad.validate();
  quad::QuadratureSpec outer = quad;
  outer.rel_tol = std::max(quad.rel_tol, 1e-9);
  outer.abs_tol = std::max(quad.abs_tol, 1e-11);
  const auto integrand = [&](double gamma) {
    const double pdf = channel::composite_snr_pdf(gamma, chan, quad);
    if (pdf == 0.0) return 0.0;
    return detector::detection_prob_conditional(gamma, cfg) * pdf;
  };
  return quad::integrate_positive(integrand, outer, chan.gamma_bar);
}

SignedLogValue d1_closed(int l, const CompositeChannel& chan, double y) {
  chan.validate();
  if (l < 0) throw DomainError("d1_closed: l must be >= 0");
  if (!(y > 0.0)) throw DomainError("d1_closed: y must be > 0");
  const double mu = chan.fading.mu;
  const double kappa = chan.fading.kappa;
  const double theta = chan.shadow.theta;
  const double ratio = theta / (chan.gamma_bar * y);
  const double alpha = 1.0 + mu * (1.0 + kappa) * ratio;
  const double log_b = std::log(mu) + 0.5 * std::log(kappa * (1.0 + kappa) * ratio);
  const double z = std::exp(2.0 * log_b) / alpha;
  const SignedLogValue kummer = specfun::kummer_1f1(l + mu, mu, z);
  // z^{mu/2} / b = b^{mu-1} alpha^{-mu/2}
  const double log_rest = specfun::ln_gamma(l + mu) - specfun::ln_gamma(mu) +
                          (mu - 1.0) * log_b - (l + mu) * std::log(alpha);
  return SignedLogValue::from_log(log_rest) * kummer;
}

SeriesResult d2_series(int l, const CompositeChannel& chan, const TruncationLimits& limits) {
  chan.validate();
  limits.validate();
  if (l < 0) throw DomainError("d2_series: l must be >= 0");
  const SeriesConstants k(chan);
  const auto log_k = half_order_log_k(l + limits.i_max + 1, k.bessel_arg);
  return d2_series_impl(l, k, log_k, limits);
}

SignedLogValue d2_term(int l, int n, int i, const CompositeChannel& chan) {
  chan.validate();
  if (l < 0 || n < 0 || i < 0) throw DomainError("d2_term: indices must be >= 0");
  const SeriesConstants k(chan);
  const double xi = -l - k.mu - n;
  const SignedLogValue g = specfun::pochhammer_log(l + k.mu, n) /
                           specfun::pochhammer_log(k.mu, n) *
                           SignedLogValue::from_log(n * std::log(k.mu * k.kappa * k.pole) -
                                                    specfun::ln_gamma(n + 1.0));
  const int order_index = l + i >= 1 ? l + i - 1 : 0;
  const double beta = l + i - 0.5;
  const SignedLogValue rest = SignedLogValue::from_log(
      (xi - i) * k.log_pole + std::log(2.0) + beta * k.log_scale);
  return g * specfun::gen_binomial_log(xi, i) * rest *
         specfun::bessel_k_half(order_index, k.bessel_arg);
}

SeriesResult avg_pd_closed_form(const CompositeChannel& chan, const EDConfig& cfg,
                                const TruncationLimits& limits) {
  chan.validate();
  cfg.validate();
  limits.validate();
  const SeriesConstants k(chan);
  const auto log_k = half_order_log_k(limits.l_max + limits.i_max + 1, k.bessel_arg);

  const double x = 0.5 * cfg.lambda;
  double q = specfun::gamma_q(cfg.u, x);
  double step = std::exp(specfun::log_gamma_prefactor(cfg.u, x));

  SeriesResult out;
  LogAccumulator pd;
  LogAccumulator poisson_mass;
  LogAccumulator d2_residual;
  const double log_tol = std::log(limits.term_tol);
  for (int l = 0; l <= limits.l_max; ++l) {
    const SeriesResult d2 = d2_series_impl(l, k, log_k, limits);
    // E[e^{-gamma} gamma^l] / l!
    const double log_weight =
        k.log_common + specfun::ln_gamma(l + k.mu) - specfun::ln_gamma(l + 1.0);
    const SignedLogValue moment = SignedLogValue::from_log(log_weight) * d2.log_value;
    const SignedLogValue term = SignedLogValue::from_double(q) * moment;
    pd.add(term);
    poisson_mass.add(moment);
    d2_residual.add(SignedLogValue::from_log(std::log(q) + log_weight +
                                             std::log(std::max(d2.residual_estimate, 0.0))));
    out.l_used = l + 1;
    out.n_used_max = std::max(out.n_used_max, d2.n_used_max);
    out.i_used_max = std::max(out.i_used_max, d2.i_used_max);
    out.i_series_diverged = out.i_series_diverged || d2.i_series_diverged;

    q = std::min(1.0, q + step);
    step *= x / (l + 1.0 + cfg.u);

    const double mass_gap = std::fabs(1.0 - poisson_mass.result().value());
    if (l > 0 && term.log_magnitude <= log_tol + pd.result().log_magnitude &&
        mass_gap <= limits.term_tol) {
      break;
    }
  }
  out.log_value = pd.result();
  out.raw_value = out.log_value.value();
  out.value = std::clamp(out.raw_value, 0.0, 1.0);
  out.residual_estimate =
      std::fabs(1.0 - poisson_mass.result().value()) + d2_residual.result().value();
  return out;
}

SeriesResult avg_pd_kummer_route(const CompositeChannel& chan, const EDConfig& cfg,
                                 const quad::QuadratureSpec& quad, int l_cap) {
  chan.validate();
  cfg.validate();
  quad.validate();
  const double mu = chan.fading.mu;
  const double kappa = chan.fading.kappa;
  const double theta = chan.shadow.theta;
  const double snr_per_power = chan.gamma_bar / theta;
  // ln of the kappa-mu SNR density constant, less the Omega^{-(mu+1)/2} factor.
  const double log_density_const = std::log(mu) + 0.5 * (mu + 1.0) * std::log1p(kappa) -
                                   0.5 * (mu - 1.0) * std::log(kappa) - mu * kappa;

  const double x = 0.5 * cfg.lambda;
  double q = specfun::gamma_q(cfg.u, x);
  double step = std::exp(specfun::log_gamma_prefactor(cfg.u, x));

  CompensatedSum pd;
  CompensatedSum mass;
  double quad_error = 0.0;
  SeriesResult out;
  const double tol = std::max(10.0 * quad.rel_tol, 1e-12);
  for (int l = 0; l < l_cap; ++l) {
    const double log_factorial = specfun::ln_gamma(l + 1.0);
    const auto integrand = [&](double y) {
      const double omega = snr_per_power * y;
      const double log_value = channel::ig_log_pdf(y, chan.shadow) + log_density_const -
                               0.5 * (mu + 1.0) * std::log(omega) +
                               d1_closed(l, chan, y).log_magnitude - log_factorial;
      return std::exp(log_value);
    };
    const double hint = theta * std::max(1.0, (l + mu) / chan.gamma_bar);
    const quad::QuadResult moment = quad::integrate_positive(integrand, quad, hint);
    pd.add(q * moment.value);
    mass.add(moment.value);
    quad_error += moment.error;
    out.l_used = l + 1;

    q = std::min(1.0, q + step);
    step *= x / (l + 1.0 + cfg.u);

    // Remaining terms sum to (1 - mass) * [Q_{l+1}, 1].
    const double remaining = std::max(0.0, 1.0 - mass.value());
    if (remaining * (1.0 - q) <= tol || remaining <= tol) {
      out.raw_value = pd.value() + remaining * 0.5 * (1.0 + q);
      out.residual_estimate = remaining * 0.5 * (1.0 - q) + quad_error;
      out.value = std::clamp(out.raw_value, 0.0, 1.0);
      out.log_value = SignedLogValue::from_double(out.raw_value);
      return out;
    }
  }
  throw ConvergenceError("avg_pd_kummer_route: l sum did not settle", pd.value());
}

std::vector<TruncationRow> truncation_study(const CompositeChannel& chan, const EDConfig& cfg,
                                            const std::vector<int>& l_values,
                                            const std::vector<double>& gamma_bar_db_grid,
                                            const TruncationLimits& base_limits,
                                            const quad::QuadratureSpec& quad, bool with_oracle) {
  if (l_values.empty() || gamma_bar_db_grid.empty()) {
    throw DomainError("truncation_study: grids must be nonempty");
  }
  std::vector<double> oracle(gamma_bar_db_grid.size(), std::numeric_limits<double>::quiet_NaN());
  if (with_oracle) {
    for (std::size_t g = 0; g < gamma_bar_db_grid.size(); ++g) {
      CompositeChannel c = chan;
      c.gamma_bar = channel::db_to_linear(gamma_bar_db_grid[g]);
      oracle[g] = avg_pd_quadrature(c, cfg, quad);
    }
  }
  std::vector<TruncationRow> rows;
  rows.reserve(l_values.size() * gamma_bar_db_grid.size());
  using clock = std::chrono::steady_clock;
  for (int l_max : l_values) {
    TruncationLimits limits = base_limits;
    limits.l_max = l_max;
    for (std::size_t g = 0; g < gamma_bar_db_grid.size(); ++g) {
      CompositeChannel c = chan;
      c.gamma_bar = channel::db_to_linear(gamma_bar_db_grid[g]);
      SeriesResult result;
      int reps = 0;
      const auto start = clock::now();
      double elapsed = 0.0;
      do {
        result = avg_pd_closed_form(c, cfg, limits);
        ++reps;
        elapsed = std::chrono::duration<double>(clock::now() - start).count();
      } while (elapsed < 0.05 && reps < 1000);
      TruncationRow row;
      row.l_max = l_max;
      row.gamma_bar_db = gamma_bar_db_grid[g];
      row.pd_closed = result.raw_value;
      row.pd_oracle = oracle[g];
      row.abs_error = std::fabs(result.raw_value - oracle[g]);
      row.runtime_seconds = elapsed / reps;
      row.diverged = result.i_series_diverged;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ClassicalPreset> classical_presets() {
  const channel::IGShadow off{kUnshadowedEta, 1.0};
  return {
      {"rayleigh", {kNoLosKappa, 1.0}, off},
      {"rician-k=2", {2.0, 1.0}, off},
      {"nakagami-m=2", {kNoLosKappa, 2.0}, off},
      {"one-sided-gaussian", {kNoLosKappa, 0.5}, off},
  };
}

std::optional<ClassicalPreset> find_preset(const std::string& name) {
  const channel::IGShadow off{kUnshadowedEta, 1.0};
  auto parse_tail = [&](const std::string& prefix) -> std::optional<double> {
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    try {
      std::size_t used = 0;
      const std::string tail = name.substr(prefix.size());
      const double v = std::stod(tail, &used);
      if (used != tail.size() || !(v > 0.0)) return std::nullopt;
      return v;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  if (name == "rayleigh") return ClassicalPreset{name, {kNoLosKappa, 1.0}, off};
  if (name == "one-sided-gaussian") return ClassicalPreset{name, {kNoLosKappa, 0.5}, off};
  if (auto k = parse_tail("rician-k=")) return ClassicalPreset{name, {*k, 1.0}, off};
  if (auto m = parse_tail("nakagami-m=")) return ClassicalPreset{name, {kNoLosKappa, *m}, off};
  return std::nullopt;
}

}  // namespace kmig::avg
