// Run configuration for the kmig command-line tool: INI file plus flag
// overrides, resolved into validated library parameters.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmig/avg_detection.hpp"
#include "kmig/channel.hpp"

namespace kmig::cli {

/// Bad or inconsistent user input; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw settings keyed "section.key", e.g. "channel.kappa". Later layers
/// override earlier ones.
using Settings = std::map<std::string, std::string>;

/// Every accepted key, in header order.
const std::vector<std::string>& known_keys();

/// Reads an INI file with sections channel / detector / sweep / mc / output.
/// Unknown sections or keys are rejected.
Settings load_ini(const std::string& path);

/// "start:stop:step" (inclusive) or a comma-separated list. Empty input gives
/// an empty vector.
std::vector<double> parse_sweep(const std::string& text, const std::string& field);

struct Curve {
  std::string name;  ///< file suffix when a command writes several files
  channel::KappaMuParams fading;
  channel::IGShadow shadow;
};

struct RunConfig {
  std::string command;
  std::vector<Curve> curves;
  bool shadow_from_lognormal = false;
  double psi_db = 0.0;
  double sigma_db = 0.0;
  double u = 0.0;
  std::optional<double> lambda;
  std::vector<double> target_pf;
  std::vector<double> gamma_bar_db;
  std::vector<double> gamma;  ///< pdf abscissae
  std::vector<int> l_values;
  avg::TruncationLimits limits;
  std::uint64_t mc_samples = 1000000;
  std::uint64_t seed = 1;
  bool mc = true;
  bool oracle = true;
  std::string out;
  Settings resolved;  ///< every key with its effective value, for the header
};

/// Validates and converts the merged settings for `command` (pdf, avgpd,
/// truncation or roc). Throws UsageError naming the offending field.
RunConfig resolve(const std::string& command, const Settings& settings);

}  // namespace kmig::cli
