#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flatspin/config.hpp"

namespace flatspin {

struct RunOutput {
  bool passed = false;
  ErrorCode error = ErrorCode::Ok;  // set when the run stopped on an error
  nlohmann::json diagnostics;
  std::vector<std::pair<std::string, std::string>> files;  // name, content; diagnostics.json last
};

/// Runs one command. Library errors are caught and reported in the diagnostics.
RunOutput run_experiment(const ExperimentConfig& cfg);

/// Writes every file under dir (created if missing), in order; returns the paths.
std::vector<std::string> write_outputs(const RunOutput& out, const std::string& dir);

}  // namespace flatspin
