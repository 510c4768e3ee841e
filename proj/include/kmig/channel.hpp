#pragma once

#include <numbers>

#include "kmig/quadrature.hpp"

namespace kmig::channel {

/// 10 / ln 10: converts natural-log units to dB (10 lg y = kDbPerNeper * ln y).
inline constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;

/// Small-scale kappa-mu fading shape.
struct KappaMuParams {
  double kappa = 1.0;  ///< dominant-to-scattered power ratio, > 0
  double mu = 1.0;     ///< (real-valued) number of multipath clusters, > 0

  void validate() const;
};

/// Lognormal shadowing in dB: 10 lg y ~ N(psi_db, sigma_db^2).
struct LognormalShadow {
  double psi_db = 0.0;
  double sigma_db = 1.0;

  void validate() const;
};

/// Inverse Gaussian shadowing with shape eta and mean theta.
struct IGShadow {
  double eta = 2.0;
  double theta = 1.0;

  void validate() const;
  double mean() const noexcept { return theta; }
  double variance() const noexcept { return theta * theta * theta / eta; }
};

/// kappa-mu fading with IG-distributed mean power and a linear average SNR.
///
/// The instantaneous SNR is gamma = gamma_bar * r^2 / theta, so E[gamma] =
/// gamma_bar regardless of the shadowing parameters.
struct CompositeChannel {
  KappaMuParams fading;
  IGShadow shadow;
  double gamma_bar = 10.0;

  void validate() const;
};

/// dB to linear power ratio.
double db_to_linear(double db);

/// Moment-matched IG surrogate of a lognormal shadow. psi_db and sigma_db are
/// first converted to natural-log units with kDbPerNeper.
IGShadow lognormal_to_ig(const LognormalShadow& shadow);

/// Lognormal shadowing density in the dB parameterization.
double lognormal_pdf(double y, const LognormalShadow& shadow);

double ig_pdf(double y, const IGShadow& shadow);
double ig_log_pdf(double y, const IGShadow& shadow);

/// kappa-mu envelope density with unit second moment.
double kappa_mu_envelope_pdf(double rho, const KappaMuParams& fading);

/// kappa-mu envelope density conditioned on the mean power E[r^2] = y.
double kappa_mu_conditional_pdf(double r, double y, const KappaMuParams& fading);
double kappa_mu_conditional_log_pdf(double r, double y, const KappaMuParams& fading);

/// kappa-mu power (SNR) density with mean `mean_snr`.
double kappa_mu_snr_pdf(double gamma, const KappaMuParams& fading, double mean_snr);
double kappa_mu_snr_log_pdf(double gamma, const KappaMuParams& fading, double mean_snr);

/// Composite kappa-mu/IG envelope density: the integral over y of
/// kappa_mu_conditional_pdf(r | y) * ig_pdf(y).
double composite_envelope_pdf(double r, const KappaMuParams& fading, const IGShadow& shadow,
                              const quad::QuadratureSpec& quad = {});

/// Composite kappa-mu/IG SNR density at instantaneous SNR gamma.
double composite_snr_pdf(double gamma, const CompositeChannel& chan,
                         const quad::QuadratureSpec& quad = {});

}  // namespace kmig::channel
