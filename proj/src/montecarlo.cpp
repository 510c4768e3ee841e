#include "kmig/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "kmig/errors.hpp"

namespace kmig::mc {

namespace {

std::uint64_t chunk_begin(std::uint64_t n, int chunks, int c) {
  return n * static_cast<std::uint64_t>(c) / static_cast<std::uint64_t>(chunks);
}

// Runs body(c) for every chunk index on a small worker pool.
void for_each_chunk(int chunks, int threads, const std::function<void(int)>& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, chunks);
  if (workers == 1) {
    for (int c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int c = next++; c < chunks; c = next++) body(c);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void RunningMoments::add(double x) noexcept {
  ++n;
  const double delta = x - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (x - mean);
}

void RunningMoments::merge(const RunningMoments& other) noexcept {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(other.n);
  const double total = na + nb;
  const double delta = other.mean - mean;
  mean += delta * nb / total;
  m2 += other.m2 + delta * delta * na * nb / total;
  n += other.n;
}

McEstimate RunningMoments::estimate() const noexcept {
  McEstimate e;
  e.mean = mean;
  e.n_samples = n;
  if (n > 1) {
    const double variance = m2 / static_cast<double>(n - 1);
    e.std_error = std::sqrt(variance / static_cast<double>(n));
  }
  return e;
}

void McSettings::validate() const {
  if (chunks < 1) throw DomainError("McSettings: chunks must be >= 1");
  if (threads < 0) throw DomainError("McSettings: threads must be >= 0");
}

double sample_ig(const channel::IGShadow& shadow, RngStream& rng) {
  const double eta = shadow.eta;
  const double theta = shadow.theta;
  const double nu = rng.normal();
  const double y = nu * nu;
  const double x = theta + theta * theta * y / (2.0 * eta) -
                   (theta / (2.0 * eta)) * std::sqrt(4.0 * theta * eta * y + theta * theta * y * y);
  if (rng.uniform() <= theta / (theta + x)) return x;
  return theta * theta / x;
}

double sample_kappa_mu_power(const channel::KappaMuParams& fading, double omega, RngStream& rng) {
  const double clusters = static_cast<double>(rng.poisson(fading.mu * fading.kappa));
  return rng.gamma(fading.mu + clusters) * omega / (fading.mu * (1.0 + fading.kappa));
}

double sample_composite_snr(const channel::CompositeChannel& chan, RngStream& rng) {
  const double y = sample_ig(chan.shadow, rng);
  const double w = sample_kappa_mu_power(chan.fading, y, rng);
  return chan.gamma_bar * w / chan.shadow.theta;
}

double sample_energy_statistic(double u, double gamma, RngStream& rng) {
  const double n = static_cast<double>(rng.poisson(gamma));
  return 2.0 * rng.gamma(u + n);
}

std::vector<double> sample_composite_snrs(const channel::CompositeChannel& chan, std::uint64_t n,
                                          const McSettings& settings) {
  chan.validate();
  settings.validate();
  std::vector<double> out(n);
  for_each_chunk(settings.chunks, settings.threads, [&](int c) {
    RngStream rng(settings.seed, settings.stream_id, static_cast<std::uint32_t>(c));
    const std::uint64_t end = chunk_begin(n, settings.chunks, c + 1);
    for (std::uint64_t k = chunk_begin(n, settings.chunks, c); k < end; ++k) {
      out[k] = sample_composite_snr(chan, rng);
    }
  });
  return out;
}

McEstimate mc_avg_pd(const channel::CompositeChannel& chan, const detector::EDConfig& cfg,
                     std::uint64_t n, const McSettings& settings, Estimator estimator) {
  chan.validate();
  cfg.validate();
  settings.validate();
  if (n < 1) throw DomainError("mc_avg_pd: n must be >= 1");
  std::vector<RunningMoments> parts(static_cast<std::size_t>(settings.chunks));
  for_each_chunk(settings.chunks, settings.threads, [&](int c) {
    RngStream rng(settings.seed, settings.stream_id, static_cast<std::uint32_t>(c));
    RunningMoments& acc = parts[static_cast<std::size_t>(c)];
    const std::uint64_t count =
        chunk_begin(n, settings.chunks, c + 1) - chunk_begin(n, settings.chunks, c);
    for (std::uint64_t k = 0; k < count; ++k) {
      const double gamma = sample_composite_snr(chan, rng);
      if (estimator == Estimator::rao_blackwell) {
        acc.add(detector::detection_prob_conditional(gamma, cfg));
      } else {
        acc.add(sample_energy_statistic(cfg.u, gamma, rng) > cfg.lambda ? 1.0 : 0.0);
      }
    }
  });
  RunningMoments pooled;
  for (const auto& part : parts) pooled.merge(part);
  return pooled.estimate();
}

Histogram empirical_pdf(std::span<const double> samples, int n_bins, double lo, double hi) {
  if (samples.empty()) throw DomainError("empirical_pdf: no samples");
  if (n_bins < 1) throw DomainError("empirical_pdf: n_bins must be >= 1");
  if (!(lo < hi)) throw DomainError("empirical_pdf: need lo < hi");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.n_total = samples.size();
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  const double width = (hi - lo) / n_bins;
  for (double s : samples) {
    if (!(s >= lo && s < hi)) continue;
    auto bin = static_cast<std::size_t>((s - lo) / width);
    bin = std::min(bin, static_cast<std::size_t>(n_bins - 1));
    ++h.counts[bin];
  }
  const double n = static_cast<double>(h.n_total);
  for (int b = 0; b < n_bins; ++b) {
    const double p = static_cast<double>(h.counts[static_cast<std::size_t>(b)]) / n;
    h.centers.push_back(lo + (b + 0.5) * width);
    h.densities.push_back(p / width);
    h.std_errors.push_back(std::sqrt(p * (1.0 - p) / n) / width);
  }
  return h;
}

}  // namespace kmig::mc
