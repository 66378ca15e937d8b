#pragma once

#include "distlab/spaces.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace distlab {

/// Malformed or incomplete scenario. `field` names the offending key path
/// ("params.b", "space.p", ...) and `line` is set for JSON syntax errors.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& what, int line = 0)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

struct Scenario {
  SpaceSpec space;
  std::string experiment;
  /// Validated parameters with defaults filled in.
  nlohmann::json params;
  /// metric -> {"max": x} | {"min": x} | {"equals": v}
  nlohmann::json expect;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  /// Scenario as written, for the report echo.
  nlohmann::json source;
};

/// Strict validation: unknown keys anywhere are rejected. A seed override
/// replaces params.seed for experiments that take one.
Scenario parse_scenario(const nlohmann::json& doc,
                        std::optional<std::uint64_t> seed_override = std::nullopt);
Scenario parse_scenario_text(const std::string& text,
                             std::optional<std::uint64_t> seed_override = std::nullopt);
Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

std::vector<std::string> experiment_names();
std::vector<std::string> space_names();
/// Metric names an experiment reports (valid keys for `expect`).
std::vector<std::string> experiment_metrics(const std::string& experiment);
bool experiment_is_randomized(const std::string& experiment);

SpaceSpec parse_space(const nlohmann::json& j, const std::string& path = "space");
nlohmann::json space_to_json(const SpaceSpec& spec);

}  // namespace distlab
