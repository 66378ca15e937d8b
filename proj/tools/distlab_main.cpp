#include "distlab/runner.hpp"
#include "distlab/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

void report_scenario_error(const distlab::ScenarioError& e) {
  std::cerr << "invalid scenario";
  if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
  std::cerr << ": " << e.what() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distlab: numerical experiments on smooth distance spaces"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
  run->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_flag("--quiet", quiet, "Suppress the summary on stdout");

  auto* validate = app.add_subcommand("validate", "Validate a scenario without running it");
  validate->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();

  auto* list_spaces = app.add_subcommand("list-spaces", "List built-in spaces");
  auto* list_experiments = app.add_subcommand("list-experiments", "List experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Exit codes 2 and 3 belong to run outcomes; usage errors map to 1.
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*list_spaces) {
    for (const auto& name : distlab::space_names()) std::cout << name << "\n";
    return 0;
  }
  if (*list_experiments) {
    for (const auto& name : distlab::experiment_names()) {
      std::cout << name << (distlab::experiment_is_randomized(name) ? " (seed required)" : "")
                << "\n";
    }
    return 0;
  }

  distlab::Scenario sc;
  try {
    sc = distlab::load_scenario(scenario_path, seed);
  } catch (const distlab::ScenarioError& e) {
    report_scenario_error(e);
    return 1;
  }

  if (*validate) {
    std::cout << "ok: " << sc.experiment << " on " << distlab::describe(sc.space)
              << " (scenario " << distlab::scenario_hash(sc) << ")\n";
    return 0;
  }

  const distlab::RunReport report = distlab::run(sc);
  const auto dir = distlab::resolve_output_dir(sc, out_dir);
  try {
    distlab::write_artifacts(report, dir);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  if (!quiet) std::cout << report.summary << "artifacts: " << dir.string() << "\n";
  return report.exit_code();
}
