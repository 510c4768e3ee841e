#include <cmath>
#include <numbers>

#include "../histogram_check.hpp"
#include "../oracles.hpp"
#include "doctest.h"
#include "kmig/channel.hpp"
#include "kmig/errors.hpp"
#include "kmig/montecarlo.hpp"

using namespace kmig::channel;
using oracle::rel_err;

namespace {

double integrate_pdf(const std::function<double(double)>& f, double scale) {
  kmig::quad::QuadratureSpec spec;
  return kmig::quad::integrate_positive(f, spec, scale).value;
}

const double kKappas[] = {0.5, 1.1, 2.0};
const double kMus[] = {0.8, 1.2, 2.5};

}  // namespace

TEST_SUITE("channel") {
  TEST_CASE("db conversion") {
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(db_to_linear(-3.0) == doctest::Approx(0.501187233627272).epsilon(1e-14));
    CHECK(kDbPerNeper == doctest::Approx(10.0 / std::numbers::ln10).epsilon(1e-16));
  }

  TEST_CASE("lognormal_to_ig examples") {
    // psi = 0 and sinh(sigma^2/2) = 1/4 give eta = 2.
    const double s2 = 2.0 * std::asinh(0.25);
    const IGShadow a = lognormal_to_ig({0.0, std::sqrt(s2) * kDbPerNeper});
    CHECK(a.eta == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(a.theta == doctest::Approx(std::exp(0.5 * s2)).epsilon(1e-13));

    const IGShadow b = lognormal_to_ig({kDbPerNeper, kDbPerNeper});
    CHECK(b.eta == doctest::Approx(std::exp(1.0) / (2.0 * std::sinh(0.5))).epsilon(1e-13));
    CHECK(b.theta == doctest::Approx(std::exp(1.5)).epsilon(1e-13));

    const IGShadow c = lognormal_to_ig({0.0, 1e-3});
    CHECK(c.eta > 1e7);
    CHECK(c.theta == doctest::Approx(1.0).epsilon(1e-7));
    CHECK_THROWS_AS(lognormal_to_ig({0.0, 0.0}), kmig::DomainError);
  }

  TEST_CASE("lognormal_to_ig matches the first two moments") {
    for (double psi_db : {-3.0, 0.0, 4.0}) {
      for (double sigma_db : {1.0, 4.0, 8.0}) {
        const LognormalShadow ln{psi_db, sigma_db};
        const IGShadow ig = lognormal_to_ig(ln);
        const double m1 = integrate_pdf([&](double y) { return y * lognormal_pdf(y, ln); }, 1.0);
        const double m2 = integrate_pdf([&](double y) { return y * y * lognormal_pdf(y, ln); }, 1.0);
        CHECK(rel_err(ig.mean(), m1) < 1e-8);
        CHECK(rel_err(ig.variance(), m2 - m1 * m1) < 1e-7);
        CHECK(integrate_pdf([&](double y) { return lognormal_pdf(y, ln); }, 1.0) ==
              doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("ig_pdf") {
    for (double eta : {0.5, 2.0, 30.0}) {
      for (double theta : {0.3, 1.0, 2.0}) {
        const IGShadow s{eta, theta};
        CHECK(integrate_pdf([&](double y) { return ig_pdf(y, s); }, theta) ==
              doctest::Approx(1.0).epsilon(1e-9));
        CHECK(integrate_pdf([&](double y) { return y * ig_pdf(y, s); }, theta) ==
              doctest::Approx(theta).epsilon(1e-9));
        for (double y : {0.05, 0.5, 1.0, 3.0}) {
          CHECK(rel_err(ig_pdf(y, s), oracle::ig_pdf(y, eta, theta)) < 1e-12);
        }
        // Mode: maximize numerically by golden section in log y.
        const double mode = theta * (std::sqrt(1.0 + 9.0 * theta * theta / (4.0 * eta * eta)) -
                                     1.5 * theta / eta);
        double lo = std::log(mode) - 3.0;
        double hi = std::log(mode) + 3.0;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 200; ++it) {
          const double m1 = hi - g * (hi - lo);
          const double m2 = lo + g * (hi - lo);
          if (ig_log_pdf(std::exp(m1), s) > ig_log_pdf(std::exp(m2), s)) {
            hi = m2;
          } else {
            lo = m1;
          }
        }
        CHECK(std::exp(0.5 * (lo + hi)) == doctest::Approx(mode).epsilon(1e-6));
      }
    }
    CHECK_THROWS_AS(ig_pdf(0.0, {}), kmig::DomainError);
    CHECK_THROWS_AS(ig_pdf(-1.0, {}), kmig::DomainError);
  }

  TEST_CASE("kappa-mu envelope reductions") {
    for (double rho = 0.1; rho <= 3.0; rho += 0.1) {
      CHECK(std::fabs(kappa_mu_envelope_pdf(rho, {1e-9, 1.0}) - 2.0 * rho * std::exp(-rho * rho)) < 1e-6);
      CHECK(rel_err(kappa_mu_envelope_pdf(rho, {2.0, 1.0}), oracle::rician_envelope_pdf(rho, 2.0)) < 1e-11);
    }
    CHECK_THROWS_AS(kappa_mu_envelope_pdf(0.0, {1.0, 1.0}), kmig::DomainError);
    CHECK_THROWS_AS(kappa_mu_envelope_pdf(1.0, {0.0, 1.0}), kmig::DomainError);
  }

  TEST_CASE("kappa-mu envelope normalization") {
    for (double k : kKappas) {
      for (double m : kMus) {
        const KappaMuParams p{k, m};
        const double total = integrate_pdf([&](double r) { return kappa_mu_envelope_pdf(r, p); }, 1.0);
        CHECK_MESSAGE(std::fabs(total - 1.0) < 1e-8, "kappa=" << k << " mu=" << m);
        const double power = integrate_pdf([&](double r) { return r * r * kappa_mu_envelope_pdf(r, p); }, 1.0);
        CHECK(power == doctest::Approx(1.0).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("kappa-mu conditional") {
    const KappaMuParams p{1.1, 1.2};
    for (double r : {0.05, 0.4, 1.0, 2.2}) {
      CHECK(kappa_mu_conditional_pdf(r, 1.0, p) == kappa_mu_envelope_pdf(r, p));
      for (double y : {0.25, 4.0}) {
        const double scaled = kappa_mu_conditional_pdf(r / std::sqrt(y), 1.0, p) / std::sqrt(y);
        CHECK(rel_err(kappa_mu_conditional_pdf(r, y, p), scaled) < 1e-13);
      }
    }
    for (double y : {0.25, 1.0, 4.0}) {
      const double total = integrate_pdf([&](double r) { return kappa_mu_conditional_pdf(r, y, p); }, std::sqrt(y));
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("kappa-mu SNR density") {
    for (double k : kKappas) {
      for (double m : kMus) {
        const KappaMuParams p{k, m};
        for (double g : {0.01, 0.7, 5.0, 30.0}) {
          CHECK(rel_err(kappa_mu_snr_pdf(g, p, 10.0), oracle::kappa_mu_power_pdf(g, k, m, 10.0)) < 1e-10);
        }
      }
    }
  }

  TEST_CASE("composite envelope normalization and conditional consistency") {
    const IGShadow s{2.0, 1.0};
    for (double k : kKappas) {
      for (double m : kMus) {
        const KappaMuParams p{k, m};
        const double total = integrate_pdf([&](double r) { return composite_envelope_pdf(r, p, s); }, 1.0);
        CHECK_MESSAGE(std::fabs(total - 1.0) < 1e-6, "kappa=" << k << " mu=" << m);
      }
    }
    // Independent mixture built from the power density: f_r(r) = 2 r f_W(r^2).
    const KappaMuParams p{1.1, 1.2};
    for (double r : {0.1, 0.6, 1.3, 2.5}) {
      const double ref = oracle::integrate_half_line(
          [&](double y) {
            const double w = y > 0.0 ? oracle::ig_pdf(y, 2.0, 1.0) : 0.0;
            if (w == 0.0) return 0.0;
            return 2.0 * r * oracle::kappa_mu_power_pdf(r * r, 1.1, 1.2, y) * w;
          },
          1.0, 1e-11);
      CHECK(rel_err(composite_envelope_pdf(r, p, s), ref) < 1e-7);
    }
  }

  TEST_CASE("composite envelope collapses without shadowing") {
    // The gap to the unshadowed density is the second-order term
    // Var(y)/2 * d^2 f(r|y)/dy^2, so it shrinks with sigma_db^2.
    const KappaMuParams p{1.1, 1.2};
    for (double sigma_db : {0.1, 0.02}) {
      const IGShadow s = lognormal_to_ig({0.0, sigma_db});
      double worst = 0.0;
      for (double r = 0.05; r < 3.0; r += 0.05) {
        const double t = s.theta;
        const double h = 1e-3;
        const double f2 = (kappa_mu_conditional_pdf(r, t + h, p) - 2.0 * kappa_mu_conditional_pdf(r, t, p) +
                           kappa_mu_conditional_pdf(r, t - h, p)) /
                          (h * h);
        const double gap = composite_envelope_pdf(r, p, s) - kappa_mu_conditional_pdf(r, t, p);
        CHECK(std::fabs(gap - 0.5 * s.variance() * f2) < 0.05 * 0.5 * s.variance() * std::fabs(f2) + 1e-6);
        worst = std::max(worst, std::fabs(gap));
      }
      CHECK(worst < 6e-4 * (sigma_db / 0.1) * (sigma_db / 0.1));
    }
  }

  TEST_CASE("composite envelope against Monte Carlo") {
    const KappaMuParams p{1.1, 1.2};
    const IGShadow s{2.0, 1.0};
    kmig::mc::RngStream rng(20240611, 3);
    std::vector<double> r(1000000);
    for (auto& v : r) v = std::sqrt(kmig::mc::sample_kappa_mu_power(p, kmig::mc::sample_ig(s, rng), rng));
    const auto h = kmig::mc::empirical_pdf(r, 100, 0.0, 4.0);
    const auto rep = histcheck::compare(h, [&](double x) { return x > 0.0 ? composite_envelope_pdf(x, p, s) : 0.0; });
    CHECK(rep.within >= 97);
  }

  TEST_CASE("composite SNR density: normalization and mean") {
    for (double k : kKappas) {
      for (double m : kMus) {
        for (double theta : {1.0, 2.0}) {
          const CompositeChannel c{{k, m}, {2.0, theta}, 10.0};
          const double total = integrate_pdf([&](double g) { return composite_snr_pdf(g, c); }, 10.0);
          const double mean = integrate_pdf([&](double g) { return g * composite_snr_pdf(g, c); }, 10.0);
          CHECK_MESSAGE(std::fabs(total - 1.0) < 1e-6, "kappa=" << k << " mu=" << m << " theta=" << theta);
          // E[gamma] = gamma_bar independently of theta.
          CHECK(mean == doctest::Approx(10.0).epsilon(1e-6));
        }
      }
    }
  }

  TEST_CASE("composite SNR density: independent oracle, scaling, positivity") {
    const CompositeChannel c{{1.1, 1.2}, {2.0, 1.0}, 10.0};
    for (double g : {0.05, 1.0, 7.0, 25.0, 80.0}) {
      CHECK(rel_err(composite_snr_pdf(g, c), oracle::composite_snr_pdf(g, 1.1, 1.2, 2.0, 1.0, 10.0)) < 1e-7);
      for (double s : {0.5, 2.0}) {
        CompositeChannel cs = c;
        cs.gamma_bar *= s;
        CHECK(rel_err(composite_snr_pdf(g, c), composite_snr_pdf(g * s, cs) * s) < 1e-8);
      }
    }
    const CompositeChannel c2{{0.5, 0.8}, {0.7, 1.6}, 3.0};
    CHECK(rel_err(composite_snr_pdf(2.0, c2), oracle::composite_snr_pdf(2.0, 0.5, 0.8, 0.7, 1.6, 3.0)) < 1e-7);
    for (double g = 0.01; g < 200.0; g *= 1.5) CHECK(composite_snr_pdf(g, c) >= 0.0);
    CHECK_THROWS_AS(composite_snr_pdf(0.0, c), kmig::DomainError);
  }

  TEST_CASE("composite SNR density: peak sharpens with kappa and mu") {
    // Peak of the density of 10 lg(gamma); in linear gamma the mu < 1
    // density is unbounded at the origin.
    auto peak = [](double kappa, double mu) {
      const CompositeChannel c{{kappa, mu}, {2.0, 1.0}, 10.0};
      double best = 0.0;
      for (double db = -20.0; db < 25.0; db += 0.05) {
        const double g = db_to_linear(db);
        best = std::max(best, composite_snr_pdf(g, c) * g / kDbPerNeper);
      }
      return best;
    };
    CHECK(peak(1.1, 2.5) > peak(1.1, 1.2));
    CHECK(peak(1.1, 1.2) > peak(1.1, 0.8));
    CHECK(peak(2.0, 1.2) > peak(0.5, 1.2));
    const CompositeChannel low{{1.1, 0.8}, {2.0, 1.0}, 10.0};
    CHECK(composite_snr_pdf(1e-4, low) > composite_snr_pdf(1e-2, low));
  }

  TEST_CASE("composite SNR density collapses without shadowing") {
    CompositeChannel c{{1.1, 1.2}, lognormal_to_ig({0.0, 0.1}), 10.0};
    double worst = 0.0;
    for (double g = 0.1; g <= 40.0; g += 0.1) {
      worst = std::max(worst, std::fabs(composite_snr_pdf(g, c) - kappa_mu_snr_pdf(g, c.fading, 10.0)));
    }
    CHECK(worst < 1e-3);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS((CompositeChannel{{1.0, 1.0}, {2.0, 1.0}, 0.0}).validate(), kmig::DomainError);
    CHECK_THROWS_AS((IGShadow{-1.0, 1.0}).validate(), kmig::DomainError);
    CHECK_THROWS_AS((KappaMuParams{1.0, -0.5}).validate(), kmig::DomainError);
  }
}

TEST_SUITE("unattainable") {
  TEST_CASE("composite envelope within 1e-4 of the unshadowed density at sigma_db = 0.1") {
    const IGShadow s = lognormal_to_ig({0.0, 0.1});
    const KappaMuParams p{1.1, 1.2};
    double worst = 0.0;
    for (double r = 0.05; r < 3.0; r += 0.05) {
      worst = std::max(worst, std::fabs(composite_envelope_pdf(r, p, s) - kappa_mu_conditional_pdf(r, s.theta, p)));
    }
    MESSAGE("max deviation " << worst);
    CHECK(worst < 1e-4);
  }
}
