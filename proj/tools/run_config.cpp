#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "kmig/errors.hpp"

namespace kmig::cli {

namespace {

const Settings& defaults() {
  static const Settings d = {
      {"sweep.gamma", "0.1:40:0.1"}, {"sweep.l_values", "20,30,40"},
      {"sweep.l_max", "40"},         {"sweep.n_max", "60"},
      {"sweep.i_max", "60"},         {"mc.samples", "1000000"},
      {"mc.seed", "1"},              {"mc.enabled", "true"},
      {"output.oracle", "true"},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw UsageError(field + ": expected a number, got '" + text + "'");
  }
  return v;
}

long long parse_int(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw UsageError(field + ": expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw UsageError(field + ": expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

// Sweep points such as 0.1 * 3 are snapped to 12 significant digits so they
// print as the user would write them.
double tidy(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::optional<std::string> get(const Settings& s, const std::string& key) {
  const auto it = s.find(key);
  if (it == s.end() || trim(it->second).empty()) return std::nullopt;
  return it->second;
}

std::string require(const Settings& s, const std::string& key) {
  auto v = get(s, key);
  if (!v) throw UsageError(key + ": required but not given");
  return *v;
}

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "channel.preset",   "channel.kappa",   "channel.mu",       "channel.eta",
      "channel.theta",    "channel.psi_db",  "channel.sigma_db", "detector.u",
      "detector.lambda",  "detector.target_pf", "sweep.gamma_bar_db", "sweep.gamma",
      "sweep.l_values",   "sweep.l_max",     "sweep.n_max",      "sweep.i_max",
      "mc.samples",       "mc.seed",         "mc.enabled",       "output.path",
      "output.oracle",
  };
  return keys;
}

Settings load_ini(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError("config: " + std::string(e.what()));
  }
  const std::set<std::string> known(known_keys().begin(), known_keys().end());
  Settings out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw UsageError("config: key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!known.count(full)) throw UsageError("config: unknown key '" + full + "'");
      out[full] = value.get_value<std::string>();
    }
  }
  return out;
}

std::vector<double> parse_sweep(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  if (t.empty()) return {};
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : t) {
      if (c == ':') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 3) throw UsageError(field + ": range must be start:stop:step");
    const double start = parse_double(parts[0], field);
    const double stop = parse_double(parts[1], field);
    const double step = parse_double(parts[2], field);
    if (!(step > 0.0)) throw UsageError(field + ": range step must be > 0");
    if (stop < start) return {};
    const auto n = static_cast<long long>(std::floor((stop - start) / step * (1.0 + 1e-12) + 1e-9)) + 1;
    if (n > 10000000) throw UsageError(field + ": range has too many points");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long long k = 0; k < n; ++k) out.push_back(tidy(start + static_cast<double>(k) * step));
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split_list(t)) out.push_back(parse_double(item, field));
  return out;
}

RunConfig resolve(const std::string& command, const Settings& settings) {
  if (command != "pdf" && command != "avgpd" && command != "truncation" && command != "roc") {
    throw UsageError("unknown command '" + command + "'");
  }
  Settings s = defaults();
  for (const auto& [k, v] : settings) s[k] = v;

  RunConfig cfg;
  cfg.command = command;

  // Channel: a preset fixes kappa, mu and switches shadowing off.
  const auto preset = get(s, "channel.preset");
  const bool has_ig = get(s, "channel.eta") || get(s, "channel.theta");
  const bool has_ln = get(s, "channel.psi_db") || get(s, "channel.sigma_db");
  if (preset) {
    for (const char* k : {"channel.kappa", "channel.mu", "channel.eta", "channel.theta",
                          "channel.psi_db", "channel.sigma_db"}) {
      if (get(s, k)) throw UsageError(std::string(k) + ": cannot be combined with channel.preset");
    }
    if (trim(*preset) == "all") {
      for (const auto& p : avg::classical_presets()) cfg.curves.push_back({p.name, p.fading, p.unshadowed});
    } else {
      const auto p = avg::find_preset(trim(*preset));
      if (!p) throw UsageError("channel.preset: unknown preset '" + *preset + "'");
      cfg.curves.push_back({p->name, p->fading, p->unshadowed});
    }
  } else {
    if (has_ig == has_ln) {
      throw UsageError("channel.eta/theta: give exactly one of (eta, theta) or (psi_db, sigma_db)");
    }
    channel::IGShadow shadow;
    if (has_ig) {
      shadow.eta = parse_double(require(s, "channel.eta"), "channel.eta");
      shadow.theta = parse_double(require(s, "channel.theta"), "channel.theta");
      try {
        shadow.validate();
      } catch (const DomainError& e) {
        throw UsageError(std::string("channel: ") + e.what());
      }
    } else {
      cfg.shadow_from_lognormal = true;
      cfg.psi_db = parse_double(require(s, "channel.psi_db"), "channel.psi_db");
      cfg.sigma_db = parse_double(require(s, "channel.sigma_db"), "channel.sigma_db");
      if (!(cfg.sigma_db > 0.0)) throw UsageError("channel.sigma_db: must be > 0");
      shadow = channel::lognormal_to_ig({cfg.psi_db, cfg.sigma_db});
    }
    const auto kappas = parse_sweep(require(s, "channel.kappa"), "channel.kappa");
    const auto mus = parse_sweep(require(s, "channel.mu"), "channel.mu");
    if (kappas.empty()) throw UsageError("channel.kappa: empty list");
    if (mus.empty()) throw UsageError("channel.mu: empty list");
    for (double k : kappas) {
      if (!(k > 0.0)) throw UsageError("channel.kappa: must be > 0");
      for (double m : mus) {
        if (!(m > 0.0)) throw UsageError("channel.mu: must be > 0");
        cfg.curves.push_back({"kappa=" + fmt(k) + "_mu=" + fmt(m), {k, m}, shadow});
      }
    }
  }

  // Detector.
  if (command != "pdf") {
    cfg.u = parse_double(require(s, "detector.u"), "detector.u");
    if (!(cfg.u >= 1.0)) throw UsageError("detector.u: must be >= 1");
    const auto lambda = get(s, "detector.lambda");
    const auto pf = get(s, "detector.target_pf");
    if (command == "roc") {
      if (lambda) throw UsageError("detector.lambda: roc derives lambda from detector.target_pf");
      if (!pf) throw UsageError("detector.target_pf: required for roc");
      cfg.target_pf = parse_sweep(*pf, "detector.target_pf");
      if (cfg.target_pf.empty()) throw UsageError("detector.target_pf: empty sweep");
    } else {
      if (static_cast<bool>(lambda) == static_cast<bool>(pf)) {
        throw UsageError("detector.lambda: give exactly one of lambda or target_pf");
      }
      if (lambda) {
        cfg.lambda = parse_double(*lambda, "detector.lambda");
        if (!(*cfg.lambda > 0.0)) throw UsageError("detector.lambda: must be > 0");
      } else {
        cfg.target_pf = parse_sweep(*pf, "detector.target_pf");
        if (cfg.target_pf.size() != 1) throw UsageError("detector.target_pf: expected a single value");
      }
    }
    for (double p : cfg.target_pf) {
      if (!(p > 0.0 && p < 1.0)) throw UsageError("detector.target_pf: values must lie in (0, 1)");
    }
    if (!cfg.lambda) cfg.lambda = detector::threshold_for_pf(cfg.u, cfg.target_pf.front());
  }

  // Sweep.
  cfg.gamma_bar_db = parse_sweep(require(s, "sweep.gamma_bar_db"), "sweep.gamma_bar_db");
  if (cfg.gamma_bar_db.empty()) throw UsageError("sweep.gamma_bar_db: empty sweep");
  if ((command == "pdf" || command == "roc") && cfg.gamma_bar_db.size() != 1) {
    throw UsageError("sweep.gamma_bar_db: " + command + " takes a single value");
  }
  if (command == "pdf") {
    cfg.gamma = parse_sweep(require(s, "sweep.gamma"), "sweep.gamma");
    if (cfg.gamma.empty()) throw UsageError("sweep.gamma: empty sweep");
    for (double g : cfg.gamma) {
      if (!(g > 0.0)) throw UsageError("sweep.gamma: values must be > 0");
    }
  }
  cfg.limits.l_max = static_cast<int>(parse_int(require(s, "sweep.l_max"), "sweep.l_max"));
  cfg.limits.n_max = static_cast<int>(parse_int(require(s, "sweep.n_max"), "sweep.n_max"));
  cfg.limits.i_max = static_cast<int>(parse_int(require(s, "sweep.i_max"), "sweep.i_max"));
  try {
    cfg.limits.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("sweep: ") + e.what());
  }
  if (command == "truncation") {
    for (const auto& item : split_list(require(s, "sweep.l_values"))) {
      const long long l = parse_int(item, "sweep.l_values");
      if (l < 1 || l > 100000) throw UsageError("sweep.l_values: values must lie in [1, 100000]");
      cfg.l_values.push_back(static_cast<int>(l));
    }
    if (cfg.l_values.empty()) throw UsageError("sweep.l_values: empty list");
  }

  // Monte Carlo and output.
  const long long samples = parse_int(require(s, "mc.samples"), "mc.samples");
  if (samples < 1) throw UsageError("mc.samples: must be >= 1");
  cfg.mc_samples = static_cast<std::uint64_t>(samples);
  const long long seed = parse_int(require(s, "mc.seed"), "mc.seed");
  if (seed < 0) throw UsageError("mc.seed: must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.mc = parse_bool(require(s, "mc.enabled"), "mc.enabled");
  cfg.oracle = parse_bool(require(s, "output.oracle"), "output.oracle");
  cfg.out = get(s, "output.path").value_or("");
  if (cfg.curves.size() > 1 && cfg.out.empty()) {
    throw UsageError("output.path: required when several curves are written");
  }

  for (const auto& k : known_keys()) {
    if (auto v = get(s, k)) cfg.resolved[k] = trim(*v);
  }
  return cfg;
}

}  // namespace kmig::cli
