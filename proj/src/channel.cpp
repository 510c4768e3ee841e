#include "kmig/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kmig/errors.hpp"
#include "kmig/specfun.hpp"

namespace kmig::channel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite, got " + std::to_string(v));
  }
}

// ln of 2 mu (1+kappa)^{(mu+1)/2} / (kappa^{(mu-1)/2} e^{mu kappa}), the
// constant in front of the kappa-mu envelope density.
double log_envelope_constant(const KappaMuParams& p) {
  return std::log(2.0 * p.mu) + 0.5 * (p.mu + 1.0) * std::log1p(p.kappa) -
         0.5 * (p.mu - 1.0) * std::log(p.kappa) - p.mu * p.kappa;
}

}  // namespace

void KappaMuParams::validate() const {
  require_positive(kappa, "kappa");
  require_positive(mu, "mu");
}

void LognormalShadow::validate() const {
  if (!std::isfinite(psi_db)) throw DomainError("psi_db must be finite");
  require_positive(sigma_db, "sigma_db");
}

void IGShadow::validate() const {
  require_positive(eta, "eta");
  require_positive(theta, "theta");
}

void CompositeChannel::validate() const {
  fading.validate();
  shadow.validate();
  require_positive(gamma_bar, "gamma_bar");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

IGShadow lognormal_to_ig(const LognormalShadow& shadow) {
  shadow.validate();
  const double psi = shadow.psi_db / kDbPerNeper;
  const double sigma = shadow.sigma_db / kDbPerNeper;
  const double s2 = sigma * sigma;
  return {std::exp(psi) / (2.0 * std::sinh(0.5 * s2)), std::exp(psi + 0.5 * s2)};
}

double lognormal_pdf(double y, const LognormalShadow& shadow) {
  shadow.validate();
  require_positive(y, "y");
  const double z = (kDbPerNeper * std::log(y) - shadow.psi_db) / shadow.sigma_db;
  return kDbPerNeper / (std::sqrt(2.0 * std::numbers::pi) * shadow.sigma_db * y) *
         std::exp(-0.5 * z * z);
}

double ig_log_pdf(double y, const IGShadow& shadow) {
  require_positive(y, "y");
  const double eta = shadow.eta;
  const double theta = shadow.theta;
  const double dev = y - theta;
  return 0.5 * std::log(eta / (2.0 * std::numbers::pi)) - 1.5 * std::log(y) -
         eta * dev * dev / (2.0 * theta * theta * y);
}

double ig_pdf(double y, const IGShadow& shadow) {
  shadow.validate();
  return std::exp(ig_log_pdf(y, shadow));
}

double kappa_mu_conditional_log_pdf(double r, double y, const KappaMuParams& fading) {
  require_positive(r, "r");
  require_positive(y, "y");
  const double k = fading.kappa;
  const double m = fading.mu;
  const double bessel_arg = 2.0 * m * std::sqrt(k * (1.0 + k)) * r / std::sqrt(y);
  return log_envelope_constant(fading) + m * std::log(r) - 0.5 * (m + 1.0) * std::log(y) -
         m * (1.0 + k) * r * r / y + specfun::log_bessel_i(m - 1.0, bessel_arg);
}

double kappa_mu_conditional_pdf(double r, double y, const KappaMuParams& fading) {
  fading.validate();
  return std::exp(kappa_mu_conditional_log_pdf(r, y, fading));
}

double kappa_mu_envelope_pdf(double rho, const KappaMuParams& fading) {
  return kappa_mu_conditional_pdf(rho, 1.0, fading);
}

double kappa_mu_snr_log_pdf(double gamma, const KappaMuParams& fading, double mean_snr) {
  require_positive(gamma, "gamma");
  require_positive(mean_snr, "mean_snr");
  const double k = fading.kappa;
  const double m = fading.mu;
  const double ratio = gamma / mean_snr;
  // Envelope constant with the 2 of the r -> r^2 Jacobian removed.
  return log_envelope_constant(fading) - std::log(2.0) - std::log(mean_snr) +
         0.5 * (m - 1.0) * std::log(ratio) - m * (1.0 + k) * ratio +
         specfun::log_bessel_i(m - 1.0, 2.0 * m * std::sqrt(k * (1.0 + k) * ratio));
}

double kappa_mu_snr_pdf(double gamma, const KappaMuParams& fading, double mean_snr) {
  fading.validate();
  return std::exp(kappa_mu_snr_log_pdf(gamma, fading, mean_snr));
}

double composite_envelope_pdf(double r, const KappaMuParams& fading, const IGShadow& shadow,
                              const quad::QuadratureSpec& quad) {
  fading.validate();
  shadow.validate();
  require_positive(r, "r");
  const auto integrand = [&](double y) {
    const double log_value = kappa_mu_conditional_log_pdf(r, y, fading) + ig_log_pdf(y, shadow);
    return log_value == kNegInf ? 0.0 : std::exp(log_value);
  };
  return quad::integrate_positive(integrand, quad, shadow.theta).value;
}

double composite_snr_pdf(double gamma, const CompositeChannel& chan,
                         const quad::QuadratureSpec& quad) {
  chan.validate();
  require_positive(gamma, "gamma");
  const double snr_per_power = chan.gamma_bar / chan.shadow.theta;
  const auto integrand = [&](double y) {
    const double log_value =
        kappa_mu_snr_log_pdf(gamma, chan.fading, snr_per_power * y) + ig_log_pdf(y, chan.shadow);
    return log_value == kNegInf ? 0.0 : std::exp(log_value);
  };
  return quad::integrate_positive(integrand, quad, chan.shadow.theta).value;
}

}  // namespace kmig::channel
