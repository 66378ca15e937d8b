#include "distlab/runner.hpp"
#include "distlab/scenario.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace distlab;
using nlohmann::json;

namespace {

const char* kTrace = R"({
  "space": {"type": "euclidean", "dim": 2},
  "experiment": "trace",
  "params": {"a": [0, 0], "b": [1, 0]}
})";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("minimal trace scenario gets defaults") {
  const Scenario sc = parse_scenario_text(kTrace);
  CHECK(sc.experiment == "trace");
  CHECK(sc.params["steps"] == 64);
  CHECK(sc.params["triples"] == 500);
  CHECK_FALSE(sc.params.contains("r_min"));
  CHECK(sc.space.kind == SpaceSpec::Kind::Euclidean);
}

TEST_CASE("missing generator is named") {
  try {
    parse_scenario_text(R"({"space": {"type": "euclidean", "dim": 2},
                            "experiment": "trace", "params": {"a": [0, 0]}})");
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(e.field() == "params.b");
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }
}

TEST_CASE("p = 1 is rejected") {
  try {
    parse_scenario_text(R"({"space": {"type": "minkowski_pnorm", "dim": 2, "p": 1},
                            "experiment": "sphere", "params": {"radius": 1}})");
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("spheres not strictly convex") != std::string::npos);
  }
}

TEST_CASE("strict validation") {
  CHECK_THROWS_AS(parse_scenario_text(R"({"space": {"type": "euclidean", "dim": 2},
      "experiment": "trace", "params": {"a": [0, 0], "b": [1, 0], "stpes": 3}})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario_text(R"({"space": {"type": "euclidean", "dim": 2, "extra": 1},
      "experiment": "trace", "params": {"a": [0, 0], "b": [1, 0]}})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario_text(R"({"space": {"type": "torus", "dim": 2},
      "experiment": "trace", "params": {"a": [0, 0], "b": [1, 0]}})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario_text(R"({"space": {"type": "euclidean", "dim": 2},
      "experiment": "fly", "params": {}})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario_text(R"({"space": {"type": "euclidean", "dim": 2},
      "experiment": "trace", "params": {"a": [0, 0, 0], "b": [1, 0]}})"),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario_text(R"({"space": {"type": "euclidean", "dim": 2},
      "experiment": "trace", "params": {"a": [0, 0], "b": [1, 0]},
      "expect": {"nonsense": {"max": 1}}})"),
                  ScenarioError);
}

TEST_CASE("parse errors carry a line number") {
  try {
    parse_scenario_text("{\n  \"space\": {\"type\": \"euclidean\",\n  \"dim\": 2\n");
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(e.line() >= 3);
  }
}

TEST_CASE("randomized experiments require a seed") {
  try {
    parse_scenario_text(R"({"space": {"type": "euclidean", "dim": 2},
                            "experiment": "uniqueness", "params": {"a": [0, 0], "b": [1, 0], "r": 0.5}})");
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(e.field() == "params.seed");
  }
  const Scenario sc = parse_scenario_text(
      R"({"space": {"type": "euclidean", "dim": 2},
          "experiment": "uniqueness", "params": {"a": [0, 0], "b": [1, 0], "r": 0.5}})",
      std::uint64_t{4});
  CHECK(sc.seed == std::uint64_t{4});
}

TEST_CASE("Euclidean trace run passes") {
  Scenario sc = parse_scenario_text(kTrace);
  sc.expect = json::parse(R"({"max_off_line": {"max": 1e-8}})");
  const RunReport rep = run(sc);
  CHECK(rep.exit_code() == 0);
  CHECK(rep.document["metrics"]["max_off_line"].get<double>() <= 1e-8);
  CHECK(rep.document["checks"].size() == 1);
  const std::string& csv = rep.artifacts.at("trace.csv");
  CHECK(csv.rfind("# distlab " + std::string(tool_version()) + " scenario=" + scenario_hash(sc), 0) == 0);
}

TEST_CASE("failed expectations exit with 2") {
  Scenario sc = parse_scenario_text(kTrace);
  sc.expect = json::parse(R"({"samples": {"equals": 3}})");
  const RunReport rep = run(sc);
  CHECK(rep.exit_code() == 2);
  CHECK_FALSE(rep.document["pass"].get<bool>());
}

TEST_CASE("theorem4 on the metric transform reports unequal and passes") {
  const Scenario sc = parse_scenario_text(R"({
    "space": {"type": "metric_transform", "base": {"type": "euclidean", "dim": 2}, "transform": "ratio"},
    "experiment": "theorem4", "params": {"a": [0, 0], "b": [1, 0]},
    "expect": {"equal": {"equals": false}}})");
  const RunReport rep = run(sc);
  CHECK(rep.exit_code() == 0);
  CHECK(rep.document["metrics"]["equal"] == false);
}

TEST_CASE("hyperbolic uniqueness run") {
  const Scenario sc = parse_scenario_text(R"({
    "space": {"type": "hyperbolic_chart", "dim": 2}, "experiment": "uniqueness",
    "params": {"a": [0, 0], "b": [0.5, 0.5], "r": 0.3, "starts": 16, "seed": 2},
    "expect": {"clusters": {"equals": 1}}})");
  CHECK(run(sc).exit_code() == 0);
}

TEST_CASE("computational errors exit with 3 and carry the inputs") {
  const Scenario sc = parse_scenario_text(R"({
    "space": {"type": "metric_transform", "base": {"type": "euclidean", "dim": 2}, "transform": "ratio"},
    "experiment": "sphere", "params": {"radius": 2}})");
  const RunReport rep = run(sc);
  CHECK(rep.exit_code() == 3);
  CHECK(rep.document["operation"] == "sphere");
  CHECK(rep.document["inputs"]["radius"] == 2);
  CHECK(rep.artifacts.count("error.json") == 1);
  CHECK(rep.artifacts.count("report.json") == 0);
}

TEST_CASE("artifacts are written and reproducible") {
  const auto dir = std::filesystem::temp_directory_path() / "distlab_cli_test";
  std::filesystem::remove_all(dir);
  const Scenario sc = parse_scenario_text(kTrace);
  write_artifacts(run(sc), dir / "one");
  write_artifacts(run(sc), dir / "two");
  for (const char* name : {"report.json", "trace.csv"}) {
    CAPTURE(name);
    CHECK(read_file(dir / "one" / name) == read_file(dir / "two" / name));
  }
  CHECK(std::filesystem::exists(dir / "one" / "summary.txt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("output directory precedence") {
  Scenario sc = parse_scenario_text(kTrace);
  ::setenv("DISTLAB_OUT", "from_env", 1);
  CHECK(resolve_output_dir(sc, "") == "from_env");
  sc.output_dir = "from_scenario";
  CHECK(resolve_output_dir(sc, "") == "from_scenario");
  CHECK(resolve_output_dir(sc, "from_flag") == "from_flag");
  ::unsetenv("DISTLAB_OUT");
  sc.output_dir.reset();
  CHECK(resolve_output_dir(sc, "") == "distlab_out");
}

TEST_CASE("registries list every experiment and space") {
  CHECK(experiment_names().size() == 12);
  CHECK(space_names().size() == 4);
  CHECK(experiment_is_randomized("axioms"));
  CHECK_FALSE(experiment_is_randomized("theorem4"));
  for (const auto& name : experiment_names()) CHECK_FALSE(experiment_metrics(name).empty());
}
