#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>

#include "kmig/errors.hpp"
#include "kmig/montecarlo.hpp"
#include "kmig/rng.hpp"
#include "kmig/version.hpp"

namespace kmig::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest round-trip form; independent of the C locale.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string num(std::uint64_t x) {
  char buf[24];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

class Csv {
 public:
  explicit Csv(std::string& out) : out_(out) {}

  Csv& operator<<(const std::string& field) {
    if (!first_) out_ += ',';
    out_ += field;
    first_ = false;
    return *this;
  }
  Csv& operator<<(double x) { return *this << num(x); }
  Csv& operator<<(int x) { return *this << num(static_cast<std::uint64_t>(x)); }
  Csv& operator<<(bool x) { return *this << std::string(x ? "1" : "0"); }

  void end() {
    out_ += '\n';
    first_ = true;
  }

 private:
  std::string& out_;
  bool first_ = true;
};

std::string header(const RunConfig& cfg, const Curve& curve, const std::string& timestamp) {
  std::string h;
  const auto line = [&](const std::string& k, const std::string& v) { h += "# " + k + " = " + v + "\n"; };
  line("tool", "kmig " + std::string(kVersion));
  line("command", cfg.command);
  for (const auto& [k, v] : cfg.resolved) line(k, v);
  line("resolved.kappa", num(curve.fading.kappa));
  line("resolved.mu", num(curve.fading.mu));
  line("resolved.eta", num(curve.shadow.eta));
  line("resolved.theta", num(curve.shadow.theta));
  if (cfg.lambda) line("resolved.lambda", num(*cfg.lambda));
  line("rng", std::string(mc::RngStream::kIdentity));
  line("seed", num(cfg.seed));
  line("timestamp", timestamp);
  return h;
}

channel::CompositeChannel make_channel(const Curve& curve, double gamma_bar_db) {
  return {curve.fading, curve.shadow, channel::db_to_linear(gamma_bar_db)};
}

mc::McSettings mc_settings(const RunConfig& cfg, std::uint64_t stream) {
  mc::McSettings s;
  s.seed = cfg.seed;
  s.stream_id = stream;
  return s;
}

// Histogram window for each abscissa: the smallest spacing of the grid, or
// a tenth of the abscissa for a single point.
double window_width(const std::vector<double>& grid) {
  if (grid.size() == 1) return 0.1 * grid.front();
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  double w = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k] > sorted[k - 1]) w = std::min(w, sorted[k] - sorted[k - 1]);
  }
  return std::isfinite(w) ? w : 0.1 * sorted.front();
}

CsvDocument pdf_document(const RunConfig& cfg, const Curve& curve, std::size_t index,
                         bool& failed) {
  CsvDocument doc;
  Csv csv(doc.data);
  csv << std::string("gamma") << std::string("pdf_analytic");
  if (cfg.mc) csv << std::string("pdf_mc") << std::string("mc_stderr");
  csv.end();

  const auto chan = make_channel(curve, cfg.gamma_bar_db.front());
  std::vector<double> samples;
  double h = 0.0;
  if (cfg.mc) {
    samples = mc::sample_composite_snrs(chan, cfg.mc_samples, mc_settings(cfg, index));
    std::sort(samples.begin(), samples.end());
    h = window_width(cfg.gamma);
  }
  const double n = static_cast<double>(cfg.mc_samples);
  for (double g : cfg.gamma) {
    double pdf = kNaN;
    try {
      pdf = channel::composite_snr_pdf(g, chan);
    } catch (const QuadratureError& e) {
      pdf = e.estimate();
      failed = true;
    }
    csv << g << pdf;
    if (cfg.mc) {
      const double lo = std::max(g - 0.5 * h, 0.0);
      const double hi = g + 0.5 * h;
      const auto count = std::lower_bound(samples.begin(), samples.end(), hi) -
                         std::lower_bound(samples.begin(), samples.end(), lo);
      const double p = static_cast<double>(count) / n;
      csv << p / (hi - lo) << std::sqrt(p * (1.0 - p) / n) / (hi - lo);
    }
    csv.end();
  }
  return doc;
}

CsvDocument avgpd_document(const RunConfig& cfg, const Curve& curve, std::size_t index,
                           bool& failed) {
  CsvDocument doc;
  Csv csv(doc.data);
  csv << std::string("gamma_bar_db") << std::string("pd_closed");
  if (cfg.oracle) csv << std::string("pd_quadrature");
  if (cfg.mc) csv << std::string("pd_mc") << std::string("mc_stderr");
  csv << std::string("l_used") << std::string("residual_estimate") << std::string("diverged_flag");
  csv.end();

  const detector::EDConfig ed{cfg.u, *cfg.lambda};
  for (std::size_t k = 0; k < cfg.gamma_bar_db.size(); ++k) {
    const double db = cfg.gamma_bar_db[k];
    const auto chan = make_channel(curve, db);
    const auto closed = avg::avg_pd_closed_form(chan, ed, cfg.limits);
    double residual = closed.residual_estimate;
    bool flag = closed.i_series_diverged;
    csv << db << closed.value;
    if (cfg.oracle) {
      double pd = kNaN;
      try {
        const auto q = avg::avg_pd_quadrature_result(chan, ed);
        pd = q.value;
        residual += q.error;
      } catch (const QuadratureError& e) {
        pd = e.estimate();
        residual += e.error_bound();
        flag = true;
      }
      csv << pd;
    }
    if (cfg.mc) {
      // Streams are numbered per curve and sweep point so rows are independent.
      const auto est = mc::mc_avg_pd(chan, ed, cfg.mc_samples,
                                     mc_settings(cfg, index * cfg.gamma_bar_db.size() + k),
                                     mc::Estimator::rao_blackwell);
      csv << est.mean << est.std_error;
    }
    csv << closed.l_used << residual << flag;
    csv.end();
    failed = failed || flag;
  }
  return doc;
}

CsvDocument truncation_document(const RunConfig& cfg, const Curve& curve, bool& failed) {
  CsvDocument doc;
  Csv csv(doc.data);
  csv << std::string("l_max") << std::string("gamma_bar_db") << std::string("pd_closed");
  if (cfg.oracle) csv << std::string("abs_error_vs_oracle");
  csv << std::string("runtime_seconds");
  csv.end();
  const detector::EDConfig ed{cfg.u, *cfg.lambda};
  const auto rows = avg::truncation_study(make_channel(curve, cfg.gamma_bar_db.front()), ed,
                                          cfg.l_values, cfg.gamma_bar_db, cfg.limits, {}, cfg.oracle);
  for (const auto& r : rows) {
    csv << r.l_max << r.gamma_bar_db << r.pd_closed;
    if (cfg.oracle) csv << r.abs_error;
    csv << r.runtime_seconds;
    csv.end();
    failed = failed || r.diverged;
  }
  return doc;
}

CsvDocument roc_document(const RunConfig& cfg, const Curve& curve, bool& failed) {
  CsvDocument doc;
  Csv csv(doc.data);
  csv << std::string("target_pf") << std::string("lambda") << std::string("pd_closed");
  if (cfg.oracle) csv << std::string("pd_quadrature");
  csv << std::string("diverged_flag");
  csv.end();
  const auto chan = make_channel(curve, cfg.gamma_bar_db.front());
  for (double pf : cfg.target_pf) {
    const double lambda = detector::threshold_for_pf(cfg.u, pf);
    const detector::EDConfig ed{cfg.u, lambda};
    const auto closed = avg::avg_pd_closed_form(chan, ed, cfg.limits);
    bool flag = closed.i_series_diverged;
    csv << pf << lambda << closed.value;
    if (cfg.oracle) {
      double pd = kNaN;
      try {
        pd = avg::avg_pd_quadrature(chan, ed);
      } catch (const QuadratureError& e) {
        pd = e.estimate();
        flag = true;
      }
      csv << pd;
    }
    csv << flag;
    csv.end();
    failed = failed || flag;
  }
  return doc;
}

}  // namespace

CommandResult run(const RunConfig& cfg, const std::string& timestamp) {
  CommandResult result;
  for (std::size_t c = 0; c < cfg.curves.size(); ++c) {
    const auto& curve = cfg.curves[c];
    bool failed = false;
    CsvDocument doc;
    if (cfg.command == "pdf") {
      doc = pdf_document(cfg, curve, c, failed);
    } else if (cfg.command == "avgpd") {
      doc = avgpd_document(cfg, curve, c, failed);
    } else if (cfg.command == "truncation") {
      doc = truncation_document(cfg, curve, failed);
    } else {
      doc = roc_document(cfg, curve, failed);
    }
    doc.header = header(cfg, curve, timestamp);
    if (cfg.curves.size() > 1) doc.suffix = curve.name;
    result.diverged = result.diverged || failed;
    result.documents.push_back(std::move(doc));
  }
  return result;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string output_path(const std::string& base, const std::string& suffix) {
  if (suffix.empty()) return base;
  const auto slash = base.find_last_of('/');
  const auto dot = base.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return base + "_" + suffix;
  }
  return base.substr(0, dot) + "_" + suffix + base.substr(dot);
}

}  // namespace kmig::cli
