#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kmig/channel.hpp"
#include "kmig/detector.hpp"
#include "kmig/rng.hpp"

namespace kmig::mc {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
};

/// Running mean / sum of squared deviations (Welford), mergeable with Chan's
/// pairwise formula.
struct RunningMoments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept;
  void merge(const RunningMoments& other) noexcept;
  McEstimate estimate() const noexcept;
};

enum class Estimator {
  rao_blackwell,    ///< average Q_u(sqrt(2 gamma_k), sqrt(lambda)) over sampled gamma_k
  statistic_level,  ///< sample the energy statistic and count threshold crossings
};

struct McSettings {
  std::uint64_t seed = 1;
  std::uint64_t stream_id = 0;
  /// The sample budget is split into this many substreams; the split, not
  /// the thread count, fixes the random sequence.
  int chunks = 64;
  int threads = 0;  ///< 0: hardware concurrency

  void validate() const;
};

/// IG(mean theta, shape eta) by the Michael-Schucany-Haas transformation.
double sample_ig(const channel::IGShadow& shadow, RngStream& rng);

/// kappa-mu power with E[W] = omega: Poisson(mu kappa) mixed Gamma(mu + N).
double sample_kappa_mu_power(const channel::KappaMuParams& fading, double omega, RngStream& rng);

/// Instantaneous SNR gamma_bar * W / theta with W | y ~ kappa-mu power of mean
/// y and y ~ IG, so E[gamma] = gamma_bar.
double sample_composite_snr(const channel::CompositeChannel& chan, RngStream& rng);

/// Energy statistic under H1: noncentral chi^2 with 2u degrees of freedom and
/// noncentrality 2 gamma, as 2 Gamma(u + N) with N ~ Poisson(gamma).
double sample_energy_statistic(double u, double gamma, RngStream& rng);

/// n composite SNR samples drawn in parallel substreams; the result order is
/// fixed by the chunk layout of `settings`.
std::vector<double> sample_composite_snrs(const channel::CompositeChannel& chan, std::uint64_t n,
                                          const McSettings& settings);

McEstimate mc_avg_pd(const channel::CompositeChannel& chan, const detector::EDConfig& cfg,
                     std::uint64_t n, const McSettings& settings, Estimator estimator);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::uint64_t n_total = 0;
  std::vector<double> centers;
  std::vector<double> densities;   ///< count / (n_total * width)
  std::vector<double> std_errors;  ///< binomial standard error of the density
  std::vector<std::uint64_t> counts;

  double width() const noexcept { return (hi - lo) / static_cast<double>(centers.size()); }
};

/// Density-normalized histogram over [lo, hi); samples outside still count in
/// n_total, so the densities integrate to the in-range fraction.
Histogram empirical_pdf(std::span<const double> samples, int n_bins, double lo, double hi);

}  // namespace kmig::mc
