#include <cmath>
#include <cstring>
#include <vector>

#include "../histogram_check.hpp"
#include "../oracles.hpp"
#include "doctest.h"
#include "kmig/avg_detection.hpp"
#include "kmig/errors.hpp"
#include "kmig/montecarlo.hpp"

using namespace kmig;
using namespace kmig::mc;

namespace {

std::vector<double> draw(std::size_t n, std::uint64_t stream, const std::function<double(RngStream&)>& f) {
  RngStream rng(777, stream);
  std::vector<double> out(n);
  for (auto& v : out) v = f(rng);
  return out;
}

RunningMoments moments(const std::vector<double>& xs) {
  RunningMoments m;
  for (double x : xs) m.add(x);
  return m;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_SUITE("montecarlo") {
  TEST_CASE("Philox4x32-10 known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(RngStream::block({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(RngStream::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(RngStream::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("streams are reproducible and distinct") {
    RngStream a(5, 9), b(5, 9), c(5, 10), d(6, 9);
    bool differ_c = false, differ_d = false;
    for (int i = 0; i < 100; ++i) {
      const auto x = a.next_u32();
      CHECK(x == b.next_u32());
      differ_c |= x != c.next_u32();
      differ_d |= x != d.next_u32();
    }
    CHECK(differ_c);
    CHECK(differ_d);
    RngStream u(1, 1);
    for (int i = 0; i < 10000; ++i) {
      const double v = u.uniform();
      CHECK((v > 0.0 && v < 1.0));
    }
  }

  TEST_CASE("stream independence") {
    const std::size_t n = 1000000;
    const auto x = draw(n, 1, [](RngStream& r) { return r.uniform(); });
    const auto y = draw(n, 2, [](RngStream& r) { return r.uniform(); });
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxy += (x[i] - 0.5) * (y[i] - 0.5);
    const double corr = sxy / n * 12.0;
    CHECK(std::fabs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
  }

  TEST_CASE("base variates pass KS") {
    const std::size_t n = 100000;
    const auto nrm = draw(n, 3, [](RngStream& r) { return r.normal(); });
    boost::math::normal_distribution<double> sn;
    CHECK(oracle::ks_statistic(nrm, [&](double x) { return boost::math::cdf(sn, x); }) < oracle::ks_critical_1pct(n));
    for (double shape : {0.3, 1.0, 4.7}) {
      const auto g = draw(n, 4, [&](RngStream& r) { return r.gamma(shape); });
      boost::math::gamma_distribution<double> gd(shape);
      CHECK_MESSAGE(oracle::ks_statistic(g, [&](double x) { return boost::math::cdf(gd, x); }) <
                        oracle::ks_critical_1pct(n),
                    "shape=" << shape);
    }
    for (double mean : {0.7, 5.0, 30.0, 400.0}) {
      const auto p = draw(n, 5, [&](RngStream& r) { return static_cast<double>(r.poisson(mean)); });
      const auto m = moments(p).estimate();
      CHECK(std::fabs(m.mean - mean) < 4.0 * std::sqrt(mean / n));
      const double var = moments(p).m2 / (n - 1);
      CHECK(std::fabs(var / mean - 1.0) < 0.03);
    }
  }

  TEST_CASE("IG sampler") {
    const channel::IGShadow s{2.0, 1.0};
    const std::size_t n = 1000000;
    const auto y = draw(n, 6, [&](RngStream& r) { return sample_ig(s, r); });
    const auto m = moments(y);
    const auto est = m.estimate();
    CHECK(std::fabs(est.mean - 1.0) < 4.0 * est.std_error);
    // Var of the sample variance ~ (mu4 - sigma^4)/n; IG kurtosis excess is 15 theta/eta.
    const double var = m.m2 / (n - 1);
    const double sigma2 = s.variance();
    const double mu4 = sigma2 * sigma2 * (3.0 + 15.0 * s.theta / s.eta);
    CHECK(std::fabs(var - sigma2) < 4.0 * std::sqrt((mu4 - sigma2 * sigma2) / n));
    std::vector<double> first(y.begin(), y.begin() + 100000);
    CHECK(oracle::ks_statistic(first, [&](double x) { return oracle::ig_cdf(x, 2.0, 1.0); }) <
          oracle::ks_critical_1pct(first.size()));
    const channel::IGShadow s2{0.6, 2.5};
    const auto y2 = draw(100000, 7, [&](RngStream& r) { return sample_ig(s2, r); });
    CHECK(oracle::ks_statistic(y2, [&](double x) { return oracle::ig_cdf(x, 0.6, 2.5); }) <
          oracle::ks_critical_1pct(y2.size()));
  }

  TEST_CASE("kappa-mu power sampler") {
    const std::size_t n = 100000;
    const auto ray = draw(n, 8, [](RngStream& r) { return sample_kappa_mu_power({1e-9, 1.0}, 1.0, r); });
    CHECK(oracle::ks_statistic(ray, [](double x) { return 1.0 - std::exp(-x); }) < oracle::ks_critical_1pct(n));
    for (auto [k, m] : {std::pair{1.1, 0.8}, std::pair{2.0, 2.5}, std::pair{0.5, 1.2}}) {
      const auto w = draw(n, 9, [&](RngStream& r) { return sample_kappa_mu_power({k, m}, 3.0, r); });
      CHECK(oracle::ks_statistic(w, [&](double x) { return oracle::kappa_mu_power_cdf(x, k, m, 3.0); }) <
            oracle::ks_critical_1pct(n));
    }
    const auto big = draw(1000000, 10, [](RngStream& r) { return sample_kappa_mu_power({1.1, 1.2}, 2.0, r); });
    const auto est = moments(big).estimate();
    CHECK(std::fabs(est.mean - 2.0) < 4.0 * est.std_error);
  }

  TEST_CASE("kappa-mu power agrees with the Gaussian-cluster construction") {
    // Integer mu: r^2 = sum over mu clusters of (X + p)^2 + (Y + q)^2.
    const double kappa = 1.5;
    const int mu = 2;
    const double sigma = std::sqrt(1.0 / (2.0 * mu * (1.0 + kappa)));
    const double d = std::sqrt(kappa / (1.0 + kappa) / mu);  // per-cluster in-phase mean
    const std::size_t n = 100000;
    const auto w = draw(n, 11, [&](RngStream& r) {
      double sum = 0.0;
      for (int c = 0; c < mu; ++c) {
        const double x = d + sigma * r.normal();
        const double y = sigma * r.normal();
        sum += x * x + y * y;
      }
      return sum;
    });
    CHECK(oracle::ks_statistic(w, [&](double x) { return oracle::kappa_mu_power_cdf(x, kappa, mu, 1.0); }) <
          oracle::ks_critical_1pct(n));
  }

  TEST_CASE("envelope histogram matches the kappa-mu envelope density") {
    const channel::KappaMuParams p{2.0, 1.5};
    const auto r = draw(1000000, 12, [&](RngStream& g) { return std::sqrt(sample_kappa_mu_power(p, 1.0, g)); });
    const auto h = empirical_pdf(r, 100, 0.0, 3.0);
    const auto rep = histcheck::compare(h, [&](double x) { return x > 0.0 ? channel::kappa_mu_envelope_pdf(x, p) : 0.0; });
    CHECK(rep.within >= 97);
  }

  TEST_CASE("noncentral chi^2 sampler") {
    const std::size_t n = 100000;
    for (auto [u, g] : {std::pair{4.0, 10.0}, std::pair{1.0, 0.0}, std::pair{2.5, 40.0}}) {
      const auto y = draw(n, 13, [&](RngStream& r) { return sample_energy_statistic(u, g, r); });
      boost::math::non_central_chi_squared d(2.0 * u, 2.0 * g);
      CHECK(oracle::ks_statistic(y, [&](double x) { return boost::math::cdf(d, x); }) < oracle::ks_critical_1pct(n));
    }
  }

  TEST_CASE("composite SNR samples: mean, histogram, unshadowed limit") {
    const channel::CompositeChannel c{{1.1, 1.2}, {2.0, 1.0}, 10.0};
    McSettings s;
    s.seed = 99;
    const auto g = sample_composite_snrs(c, 1000000, s);
    const auto est = moments(g).estimate();
    CHECK(std::fabs(est.mean - 10.0) < 4.0 * est.std_error);
    const auto h = empirical_pdf(g, 100, 0.0, 40.0);
    const auto rep = histcheck::compare(h, [&](double x) { return x > 0.0 ? channel::composite_snr_pdf(x, c) : 0.0; });
    CHECK(rep.within >= 97);

    channel::CompositeChannel theta2 = c;
    theta2.shadow.theta = 2.0;
    const auto g2 = sample_composite_snrs(theta2, 400000, s);
    const auto est2 = moments(g2).estimate();
    CHECK(std::fabs(est2.mean - 10.0) < 4.0 * est2.std_error);

    const channel::CompositeChannel flat{{1.1, 1.2}, {1e7, 1.0}, 10.0};
    const auto g3 = sample_composite_snrs(flat, 100000, s);
    CHECK(oracle::ks_statistic(g3, [](double x) { return oracle::kappa_mu_power_cdf(x, 1.1, 1.2, 10.0); }) <
          oracle::ks_critical_1pct(g3.size()));
  }

  TEST_CASE("average Pd estimators") {
    const detector::EDConfig cfg{4.0, 15.0};
    McSettings s;
    s.seed = 1234;
    for (double db : {0.0, 10.0, 20.0}) {
      const channel::CompositeChannel c{{1.1, 1.2}, {2.0, 1.0}, channel::db_to_linear(db)};
      const auto rb = mc_avg_pd(c, cfg, 1000000, s, Estimator::rao_blackwell);
      const double ref = avg::avg_pd_quadrature(c, cfg);
      CHECK_MESSAGE(std::fabs(rb.mean - ref) < 3.0 * rb.std_error, "db=" << db);
      CHECK(rb.n_samples == 1000000);
      if (db == 10.0) {
        const auto st = mc_avg_pd(c, cfg, 1000000, s, Estimator::statistic_level);
        CHECK(std::fabs(rb.mean - st.mean) < 3.0 * std::hypot(rb.std_error, st.std_error));
        CHECK(rb.std_error <= 1.1 * st.std_error);
      }
    }
    const channel::CompositeChannel quiet{{1.1, 1.2}, {2.0, 1.0}, 1e-6};
    const auto st = mc_avg_pd(quiet, cfg, 200000, s, Estimator::statistic_level);
    CHECK(std::fabs(st.mean - detector::false_alarm_prob(cfg)) < 3.0 * st.std_error);
    CHECK_THROWS_AS(mc_avg_pd(quiet, cfg, 0, s, Estimator::rao_blackwell), DomainError);
  }

  TEST_CASE("pooled estimates are independent of scheduling") {
    const channel::CompositeChannel c{{1.1, 1.2}, {2.0, 1.0}, 10.0};
    const detector::EDConfig cfg{4.0, 15.0};
    McSettings one;
    one.seed = 42;
    one.threads = 1;
    McSettings many = one;
    many.threads = 7;
    for (auto e : {Estimator::rao_blackwell, Estimator::statistic_level}) {
      const auto a = mc_avg_pd(c, cfg, 50001, one, e);
      const auto b = mc_avg_pd(c, cfg, 50001, many, e);
      const auto again = mc_avg_pd(c, cfg, 50001, many, e);
      CHECK(same_bits(a.mean, b.mean));
      CHECK(same_bits(a.std_error, b.std_error));
      CHECK(same_bits(b.mean, again.mean));
    }
    const auto x = sample_composite_snrs(c, 10007, one);
    const auto y = sample_composite_snrs(c, 10007, many);
    CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
  }

  TEST_CASE("running moments merge exactly like a single pass") {
    RngStream r(3, 3);
    std::vector<double> xs(1000);
    for (auto& v : xs) v = r.normal() * 3.0 + 1.0;
    RunningMoments all, left, right;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      all.add(xs[i]);
      (i < 377 ? left : right).add(xs[i]);
    }
    left.merge(right);
    CHECK(left.n == all.n);
    CHECK(left.mean == doctest::Approx(all.mean).epsilon(1e-13));
    CHECK(left.m2 == doctest::Approx(all.m2).epsilon(1e-12));
    const auto e = all.estimate();
    double var = 0.0;
    for (double v : xs) var += (v - e.mean) * (v - e.mean);
    var /= static_cast<double>(xs.size() - 1);
    CHECK(e.std_error == doctest::Approx(std::sqrt(var / xs.size())).epsilon(1e-12));
  }

  TEST_CASE("empirical pdf") {
    std::vector<double> u(100000);
    RngStream r(8, 8);
    for (auto& v : u) v = r.uniform();
    const auto h = empirical_pdf(u, 20, 0.0, 1.0);
    REQUIRE(h.centers.size() == 20);
    CHECK(h.centers[0] == doctest::Approx(0.025));
    int within = 0;
    for (std::size_t b = 0; b < 20; ++b) within += std::fabs(h.densities[b] - 1.0) <= 3.0 * h.std_errors[b];
    CHECK(within >= 19);

    const std::vector<double> pts{0.5, 1.5, 2.5, 7.0};
    const auto one = empirical_pdf(pts, 1, 0.0, 4.0);
    CHECK(one.densities[0] == doctest::Approx(0.75 / 4.0));
    CHECK(one.n_total == 4);

    CHECK_THROWS_AS(empirical_pdf(std::vector<double>{}, 10, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(empirical_pdf(pts, 0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(empirical_pdf(pts, 3, 1.0, 1.0), DomainError);
  }
}
