#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace kmig::cli {

/// One CSV file: a "# " metadata block followed by the data section.
struct CsvDocument {
  std::string suffix;  ///< curve name; empty for a single-curve run
  std::string header;
  std::string data;
};

struct CommandResult {
  std::vector<CsvDocument> documents;
  bool diverged = false;  ///< any row flagged or a numerical routine failed
};

/// Runs a resolved command. `timestamp` goes into the metadata only, so the
/// data sections depend on the configuration alone.
CommandResult run(const RunConfig& cfg, const std::string& timestamp);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

/// `base` with "_<suffix>" inserted before its extension.
std::string output_path(const std::string& base, const std::string& suffix);

}  // namespace kmig::cli
