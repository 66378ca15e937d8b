#pragma once

#include "distlab/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace distlab {

const char* tool_version();

/// FNV-1a (64 bit, hex) of the validated scenario serialized compactly.
std::string scenario_hash(const Scenario& sc);

enum class RunStatus { Pass = 0, ExpectationFailed = 2, ComputationalError = 3 };

struct RunReport {
  RunStatus status = RunStatus::Pass;
  /// report.json on success, error.json on a computational error.
  nlohmann::json document;
  /// file name -> content, written together by write_artifacts().
  std::map<std::string, std::string> artifacts;
  /// Not part of any JSON artifact so reruns stay byte-identical.
  double wall_seconds = 0.0;
  std::string summary;

  int exit_code() const { return static_cast<int>(status); }
};

/// Runs the experiment; computational errors are captured, not thrown.
RunReport run(const Scenario& sc);

/// Writes every artifact plus summary.txt into `dir` (created if needed).
void write_artifacts(const RunReport& report, const std::filesystem::path& dir);

/// --out flag, then the scenario's output_dir, then $DISTLAB_OUT, then "distlab_out".
std::filesystem::path resolve_output_dir(const Scenario& sc, const std::string& flag);

}  // namespace distlab
