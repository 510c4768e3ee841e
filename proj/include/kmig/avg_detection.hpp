#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmig/channel.hpp"
#include "kmig/detector.hpp"
#include "kmig/quadrature.hpp"
#include "kmig/signed_log.hpp"

namespace kmig::avg {

/// Upper limits of the l (Marcum), n (Kummer) and i (binomial) sums.
struct TruncationLimits {
  int l_max = 40;
  int n_max = 60;
  int i_max = 60;
  double term_tol = 1e-12;

  void validate() const;
};

/// A truncated series value with convergence diagnostics.
struct SeriesResult {
  double value = 0.0;      ///< reported value (clamped to [0, 1] for probabilities)
  double raw_value = 0.0;  ///< unclamped sum
  SignedLogValue log_value;
  int l_used = 0;      ///< number of l terms summed
  int n_used_max = 0;  ///< most n terms used for any l
  int i_used_max = 0;  ///< most i terms used for any (l, n)
  double residual_estimate = 0.0;
  bool i_series_diverged = false;
};

/// Ground truth: integral over gamma of Q_u(sqrt(2 gamma), sqrt(lambda)) times
/// composite_snr_pdf, by nested adaptive quadrature.
double avg_pd_quadrature(const channel::CompositeChannel& chan, const detector::EDConfig& cfg,
                         const quad::QuadratureSpec& quad = {});

/// As avg_pd_quadrature, with the outer integral's error estimate.
quad::QuadResult avg_pd_quadrature_result(const channel::CompositeChannel& chan,
                                          const detector::EDConfig& cfg,
                                          const quad::QuadratureSpec& quad = {});

/// Closed form of
///   D1(l, y) = int_0^inf g^{l+mu/2-1/2} exp[-g (1 + mu(1+kappa) theta/(y gamma_bar))]
///              I_{mu-1}(2 mu sqrt(kappa(1+kappa) theta g / (gamma_bar y))) dg
/// through the Whittaker function, rewritten as
///   Gamma(l+mu) / (b Gamma(mu)) a^{-(l+mu/2)} z^{mu/2} 1F1(l+mu; mu; z),  z = b^2/a.
SignedLogValue d1_closed(int l, const channel::CompositeChannel& chan, double y);

/// D2(l) = sum_n G(n) int_0^inf x^{l-3/2} (x+f)^{-(l+mu+n)} e^{-a x - b/x} dx with
/// the integral expanded binomially in x/f and integrated termwise into
/// 2 (theta gamma_bar)^beta K_beta(eta/theta), beta = l+i-1/2.
///
/// The i-series is asymptotic, not convergent: it is summed until a term
/// drops below term_tol relative to the partial sum, otherwise truncated at
/// its smallest term with i_series_diverged set.
SeriesResult d2_series(int l, const channel::CompositeChannel& chan,
                       const TruncationLimits& limits = {});

/// The single (n, i) term G(n) C(xi, i) f^{xi-i} 2 (theta gamma_bar)^beta K_beta(eta/theta)
/// of the D2 double sum, evaluated directly rather than by recurrence.
SignedLogValue d2_term(int l, int n, int i, const channel::CompositeChannel& chan);

/// Truncated closed-form average detection probability: sum over l of
/// Q(l+u, lambda/2)/l! times E[e^{-gamma} gamma^l] from d2_series.
SeriesResult avg_pd_closed_form(const channel::CompositeChannel& chan,
                                const detector::EDConfig& cfg,
                                const TruncationLimits& limits = {});

/// Average detection probability through the Kummer form of D1: each
/// E[e^{-gamma} gamma^l] is one IG-weighted quadrature over y of d1_closed.
/// l runs until the remaining Poisson mass is pinned down by Q(l+u, lambda/2) ~ 1.
SeriesResult avg_pd_kummer_route(const channel::CompositeChannel& chan,
                                 const detector::EDConfig& cfg,
                                 const quad::QuadratureSpec& quad = {}, int l_cap = 100000);

struct TruncationRow {
  int l_max = 0;
  double gamma_bar_db = 0.0;
  double pd_closed = 0.0;
  double pd_oracle = 0.0;
  double abs_error = 0.0;
  double runtime_seconds = 0.0;
  bool diverged = false;
};

/// One row per (l_max, gamma_bar_db) cell, l_max-major. The channel's own
/// gamma_bar is replaced by each grid value.
std::vector<TruncationRow> truncation_study(const channel::CompositeChannel& chan,
                                            const detector::EDConfig& cfg,
                                            const std::vector<int>& l_values,
                                            const std::vector<double>& gamma_bar_db_grid,
                                            const TruncationLimits& base_limits = {},
                                            const quad::QuadratureSpec& quad = {},
                                            bool with_oracle = true);

/// Shape used for "no LoS component" reductions; kappa = 0 itself is excluded.
inline constexpr double kNoLosKappa = 1e-9;
/// IG shape large enough that the shadowing is effectively a point mass.
inline constexpr double kUnshadowedEta = 1e4;

struct ClassicalPreset {
  std::string name;
  channel::KappaMuParams fading;
  channel::IGShadow unshadowed;  ///< override that switches shadowing off
};

/// Rayleigh, Rician K=2, Nakagami m=2 and one-sided Gaussian.
std::vector<ClassicalPreset> classical_presets();

/// Looks up "rayleigh", "one-sided-gaussian", "rician-k=<K>" or "nakagami-m=<m>".
std::optional<ClassicalPreset> find_preset(const std::string& name);

}  // namespace kmig::avg
