// kmig: CSV generator for composite kappa-mu / inverse Gaussian fading and
// energy detection.
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "kmig/errors.hpp"
#include "kmig/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConvergence = 3;

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const Flag kFlags[] = {
    {"--preset", "channel.preset", "rayleigh, one-sided-gaussian, rician-k=<K>, nakagami-m=<m> or all"},
    {"--kappa", "channel.kappa", "kappa (list or range allowed)"},
    {"--mu", "channel.mu", "mu (list or range allowed)"},
    {"--eta", "channel.eta", "IG shape"},
    {"--theta", "channel.theta", "IG mean"},
    {"--psi-db", "channel.psi_db", "lognormal shadowing mean in dB"},
    {"--sigma-db", "channel.sigma_db", "lognormal shadowing spread in dB"},
    {"--u", "detector.u", "time-bandwidth product"},
    {"--lambda", "detector.lambda", "energy threshold"},
    {"--target-pf", "detector.target_pf", "false-alarm target (a list for roc)"},
    {"--gamma-bar-db", "sweep.gamma_bar_db", "average SNR in dB: start:stop:step or list"},
    {"--gamma", "sweep.gamma", "pdf abscissae: start:stop:step or list"},
    {"--l-values", "sweep.l_values", "truncation orders for the truncation command"},
    {"--l-max", "sweep.l_max", "l truncation"},
    {"--n-max", "sweep.n_max", "n truncation"},
    {"--i-max", "sweep.i_max", "i truncation"},
    {"--mc-samples", "mc.samples", "Monte Carlo sample count"},
    {"--seed", "mc.seed", "Monte Carlo seed"},
    {"--out", "output.path", "output file (stdout if omitted)"},
};

int write_result(const kmig::cli::RunConfig& cfg, const kmig::cli::CommandResult& result) {
  for (const auto& doc : result.documents) {
    if (cfg.out.empty()) {
      std::cout << doc.header << doc.data;
      continue;
    }
    const auto path = kmig::cli::output_path(cfg.out, doc.suffix);
    std::ofstream f(path, std::ios::binary);
    f << doc.header << doc.data;
    if (!f) {
      std::cerr << "error: cannot write " << path << "\n";
      return kExitUsage;
    }
  }
  return result.diverged ? kExitConvergence : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite kappa-mu / inverse Gaussian fading: PDFs and energy detection"};
  app.set_version_flag("--version", std::string(kmig::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> flag_values;
  bool no_mc = false;
  bool no_oracle = false;

  const char* commands[][2] = {
      {"pdf", "composite SNR density: analytic and Monte Carlo"},
      {"avgpd", "average detection probability over an average-SNR sweep"},
      {"truncation", "closed-form error and runtime versus l_max"},
      {"roc", "average detection probability versus false-alarm target"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI file with channel/detector/sweep/mc/output sections");
    for (const auto& f : kFlags) sub->add_option(f.name, flag_values[f.key], f.help);
    sub->add_flag("--no-mc", no_mc, "skip Monte Carlo columns");
    sub->add_flag("--no-oracle", no_oracle, "skip quadrature columns");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    kmig::cli::Settings settings;
    if (!config_path.empty()) settings = kmig::cli::load_ini(config_path);
    for (const auto& [key, value] : flag_values) {
      if (!value.empty()) settings[key] = value;
    }
    if (no_mc) settings["mc.enabled"] = "false";
    if (no_oracle) settings["output.oracle"] = "false";
    const auto cfg = kmig::cli::resolve(command, settings);
    return write_result(cfg, kmig::cli::run(cfg, kmig::cli::utc_timestamp()));
  } catch (const kmig::cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kmig::DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kmig::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const kmig::QuadratureError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kExitConvergence;
  }
}
