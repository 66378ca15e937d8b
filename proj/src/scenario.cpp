#include "distlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace distlab {

using nlohmann::json;

namespace {

enum class Kind { Number, Integer, Point, IntList, NumberList, Text, Curve, Bounds };

struct ParamSpec {
  std::string key;
  Kind kind;
  bool required = false;
  json fallback = nullptr;  // null: optional without a default
  std::optional<double> min_value = std::nullopt;
};

struct ExperimentSpec {
  std::vector<ParamSpec> params;
  std::vector<std::string> metrics;
  bool randomized = false;
};

ParamSpec req(std::string key, Kind kind) { return {std::move(key), kind, true}; }
ParamSpec opt(std::string key, Kind kind, json fallback = nullptr,
              std::optional<double> min_value = std::nullopt) {
  return {std::move(key), kind, false, std::move(fallback), min_value};
}

const std::map<std::string, ExperimentSpec>& registry() {
  static const std::map<std::string, ExperimentSpec> table = [] {
    std::map<std::string, ExperimentSpec> t;
    const ParamSpec seed = opt("seed", Kind::Integer, nullptr, 0);
    const ParamSpec seed_req = req("seed", Kind::Integer);
    t["axioms"] = {{opt("box_lo", Kind::Bounds, -2.0), opt("box_hi", Kind::Bounds, 2.0),
                    opt("samples", Kind::Integer, 1000, 3), opt("tol", Kind::Number, 1e-9, 0),
                    seed_req},
                   {"worst_identity", "worst_symmetry", "worst_triangle", "pass_identity",
                    "pass_symmetry", "pass_triangle"},
                   true};
    t["sphere"] = {{opt("center", Kind::Point), req("radius", Kind::Number),
                    opt("resolution", Kind::Integer, 128, 4),
                    opt("curvature_tol", Kind::Number, 1e-10, 0),
                    opt("symmetry_tol", Kind::Number, 1e-8, 0)},
                   {"max_residual", "strictly_convex", "min_discrete_curvature", "symmetric",
                    "symmetry_residual"}};
    t["trace"] = {{req("a", Kind::Point), req("b", Kind::Point), opt("r_min", Kind::Number),
                   opt("r_max", Kind::Number), opt("steps", Kind::Integer, 64, 8),
                   opt("triples", Kind::Integer, 500, 1), seed},
                  {"samples", "max_off_line", "additivity_residual", "max_tangency_angle",
                   "max_lambda_ratio_error", "lambda_sign_ok", "min_projected_eigen",
                   "completed"}};
    t["quasigeodesic"] = {{req("a", Kind::Point), req("b", Kind::Point),
                           opt("r_min", Kind::Number), opt("r_max", Kind::Number),
                           opt("steps", Kind::Integer, 64, 8), opt("pairs", Kind::Integer, 3, 1),
                           opt("regen_steps", Kind::Integer, 64, 8), seed_req},
                          {"hausdorff"},
                          true};
    t["tangent_plane"] = {{req("a", Kind::Point), req("b", Kind::Point),
                           opt("r_min", Kind::Number), opt("r_max", Kind::Number),
                           opt("steps", Kind::Integer, 64, 8), opt("p0_index", Kind::Integer)},
                          {"max_angle"}};
    t["uniqueness"] = {{req("a", Kind::Point), req("b", Kind::Point), req("r", Kind::Number),
                        opt("starts", Kind::Integer, 16, 8), seed_req},
                       {"clusters", "converged"},
                       true};
    t["extract_metric"] = {{opt("x", Kind::Point), req("y", Kind::Point),
                            opt("method", Kind::Text, "ratio"),
                            opt("ladder_scale", Kind::Number, 1.0),
                            opt("ladder_count", Kind::Integer, 6, 2),
                            opt("order", Kind::Integer, 4, 1)},
                           {"F", "F_ratio", "F_radial", "cross_gap", "err_estimate"}};
    t["indicatrix"] = {{opt("x", Kind::Point), opt("resolution", Kind::Integer, 128, 32),
                        opt("curvature_tol", Kind::Number, 1e-10, 0)},
                       {"strictly_convex", "convex", "min_discrete_curvature"}};
    const std::vector<ParamSpec> arc = {req("curve", Kind::Curve),
                                        opt("N", Kind::IntList, json::array({100, 1000, 10000})),
                                        opt("panels", Kind::Integer, 16, 1),
                                        opt("nodes", Kind::Integer, 5, 1)};
    t["arclength"] = {arc, {"sD_extrapolated", "sD_last", "sF", "gap"}};
    t["theorem3"] = {arc,
                     {"gap", "final_chord_gap", "chord_gaps_shrink", "sD_extrapolated", "sF"}};
    t["theorem4"] = {{req("a", Kind::Point), req("b", Kind::Point),
                      opt("steps", Kind::IntList, json::array({64, 128, 256})),
                      opt("tol", Kind::Number, 1e-5, 0)},
                     {"sD", "rho_ab", "sF", "equal"}};
    t["theorem5"] = {{req("a", Kind::Point), req("b", Kind::Point), opt("center", Kind::Point),
                      opt("radii", Kind::NumberList, json::array({0.25, 0.5, 1.0})),
                      opt("resolution", Kind::Integer, 128, 4),
                      opt("symmetry_tol", Kind::Number, 1e-8, 0),
                      opt("steps", Kind::Integer, 64, 8)},
                     {"symmetry_residual", "symmetric", "chord_deviation", "affinity_residual"}};
    return t;
  }();
  return table;
}

const ExperimentSpec& experiment_spec(const std::string& name, const std::string& path) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    throw ScenarioError(path, "unknown experiment '" + name + "'");
  }
  return it->second;
}

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ScenarioError(path + "." + key, "unknown key '" + key + "' in " + path);
    }
  }
}

const json& need(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) {
    throw ScenarioError(path + "." + key, "missing required field '" + key + "' in " + path);
  }
  return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path, path + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ScenarioError(path, path + " must be finite");
  return x;
}

void check_point(const json& v, int dim, const std::string& path) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) {
    throw ScenarioError(path, path + " must be an array of " + std::to_string(dim) + " numbers");
  }
  for (std::size_t i = 0; i < v.size(); ++i) as_number(v[i], path);
}

void check_curve(const json& v, int dim, const std::string& path) {
  if (!v.is_object()) throw ScenarioError(path, path + " must be an object");
  const std::string type = need(v, "type", path).is_string() ? v["type"].get<std::string>() : "";
  if (type == "segment") {
    reject_unknown(v, {"type", "from", "to"}, path);
    check_point(need(v, "from", path), dim, path + ".from");
    check_point(need(v, "to", path), dim, path + ".to");
  } else if (type == "parabola") {
    reject_unknown(v, {"type", "t0", "t1"}, path);
    if (dim != 2) throw ScenarioError(path, "parabola curve needs a 2-dimensional space");
    if (v.contains("t0")) as_number(v["t0"], path + ".t0");
    if (v.contains("t1")) as_number(v["t1"], path + ".t1");
  } else if (type == "circle_arc") {
    reject_unknown(v, {"type", "center", "radius", "angle0", "angle1"}, path);
    if (dim != 2) throw ScenarioError(path, "circle_arc curve needs a 2-dimensional space");
    check_point(need(v, "center", path), dim, path + ".center");
    if (!(as_number(need(v, "radius", path), path + ".radius") > 0.0)) {
      throw ScenarioError(path + ".radius", "circle_arc radius must be positive");
    }
    as_number(need(v, "angle0", path), path + ".angle0");
    as_number(need(v, "angle1", path), path + ".angle1");
  } else {
    throw ScenarioError(path + ".type", "unknown curve type '" + type + "'");
  }
}

void check_param(const ParamSpec& spec, const json& v, int dim, const std::string& path) {
  switch (spec.kind) {
    case Kind::Number: {
      const double x = as_number(v, path);
      if (spec.min_value && x < *spec.min_value) {
        throw ScenarioError(path, path + " must be >= " + std::to_string(*spec.min_value));
      }
      break;
    }
    case Kind::Integer:
      if (!v.is_number_integer()) throw ScenarioError(path, path + " must be an integer");
      if (spec.min_value && v.get<double>() < *spec.min_value) {
        throw ScenarioError(path, path + " must be >= " + std::to_string(int(*spec.min_value)));
      }
      break;
    case Kind::Point: check_point(v, dim, path); break;
    case Kind::Bounds:
      if (v.is_array()) check_point(v, dim, path); else as_number(v, path);
      break;
    case Kind::IntList:
      if (!v.is_array() || v.empty()) throw ScenarioError(path, path + " must be a nonempty list");
      for (const auto& x : v) {
        if (!x.is_number_integer() || x.get<long long>() < 1) {
          throw ScenarioError(path, path + " must contain positive integers");
        }
      }
      break;
    case Kind::NumberList:
      if (!v.is_array() || v.empty()) throw ScenarioError(path, path + " must be a nonempty list");
      for (const auto& x : v) as_number(x, path);
      break;
    case Kind::Text:
      if (!v.is_string()) throw ScenarioError(path, path + " must be a string");
      break;
    case Kind::Curve: check_curve(v, dim, path); break;
  }
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& [name, spec] : registry()) names.push_back(name);
  return names;
}

std::vector<std::string> space_names() {
  return {"euclidean", "minkowski_pnorm", "metric_transform", "hyperbolic_chart"};
}

std::vector<std::string> experiment_metrics(const std::string& experiment) {
  return experiment_spec(experiment, "experiment").metrics;
}

bool experiment_is_randomized(const std::string& experiment) {
  return experiment_spec(experiment, "experiment").randomized;
}

SpaceSpec parse_space(const json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path, path + " must be an object");
  const json& type = need(j, "type", path);
  if (!type.is_string()) throw ScenarioError(path + ".type", "space type must be a string");
  const std::string name = type.get<std::string>();

  SpaceSpec spec;
  auto read_dim = [&] {
    const json& d = need(j, "dim", path);
    if (!d.is_number_integer() || d.get<int>() < 2) {
      throw ScenarioError(path + ".dim", "dim must be an integer >= 2");
    }
    spec.dim = d.get<int>();
  };
  if (name == "euclidean") {
    reject_unknown(j, {"type", "dim"}, path);
    spec.kind = SpaceSpec::Kind::Euclidean;
    read_dim();
  } else if (name == "hyperbolic_chart") {
    reject_unknown(j, {"type", "dim"}, path);
    spec.kind = SpaceSpec::Kind::HyperbolicChart;
    read_dim();
  } else if (name == "minkowski_pnorm") {
    reject_unknown(j, {"type", "dim", "p"}, path);
    spec.kind = SpaceSpec::Kind::MinkowskiPNorm;
    read_dim();
    spec.p = as_number(need(j, "p", path), path + ".p");
    if (!(spec.p > 1.0)) {
      throw ScenarioError(path + ".p", "p must be > 1: spheres not strictly convex for p <= 1");
    }
  } else if (name == "metric_transform") {
    reject_unknown(j, {"type", "base", "transform"}, path);
    spec.kind = SpaceSpec::Kind::MetricTransform;
    spec.base = std::make_shared<SpaceSpec>(parse_space(need(j, "base", path), path + ".base"));
    spec.dim = spec.base->dim;
    const json& f = need(j, "transform", path);
    const auto names = transform_names();
    if (!f.is_string() ||
        std::find(names.begin(), names.end(), f.get<std::string>()) == names.end()) {
      throw ScenarioError(path + ".transform", "transform must be one of ratio, log1p, tanh");
    }
    spec.transform = f.get<std::string>();
  } else {
    throw ScenarioError(path + ".type", "unknown space '" + name + "'");
  }
  return spec;
}

json space_to_json(const SpaceSpec& spec) {
  switch (spec.kind) {
    case SpaceSpec::Kind::Euclidean: return {{"type", "euclidean"}, {"dim", spec.dim}};
    case SpaceSpec::Kind::HyperbolicChart: return {{"type", "hyperbolic_chart"}, {"dim", spec.dim}};
    case SpaceSpec::Kind::MinkowskiPNorm:
      return {{"type", "minkowski_pnorm"}, {"dim", spec.dim}, {"p", spec.p}};
    case SpaceSpec::Kind::MetricTransform:
      return {{"type", "metric_transform"},
              {"base", space_to_json(*spec.base)},
              {"transform", spec.transform}};
  }
  return nullptr;
}

Scenario parse_scenario(const json& doc, std::optional<std::uint64_t> seed_override) {
  if (!doc.is_object()) throw ScenarioError("", "scenario must be a JSON object");
  reject_unknown(doc, {"space", "experiment", "params", "expect", "output_dir"}, "scenario");

  Scenario sc;
  sc.source = doc;
  sc.space = parse_space(need(doc, "space", "scenario"));
  const json& exp = need(doc, "experiment", "scenario");
  if (!exp.is_string()) throw ScenarioError("experiment", "experiment must be a string");
  sc.experiment = exp.get<std::string>();
  const ExperimentSpec& spec = experiment_spec(sc.experiment, "experiment");

  json params = doc.contains("params") ? doc["params"] : json::object();
  if (!params.is_object()) throw ScenarioError("params", "params must be an object");
  std::vector<std::string> keys;
  for (const auto& p : spec.params) keys.push_back(p.key);
  reject_unknown(params, keys, "params");
  if (seed_override && std::find(keys.begin(), keys.end(), "seed") != keys.end()) {
    params["seed"] = *seed_override;
  }
  for (const auto& p : spec.params) {
    const std::string path = "params." + p.key;
    if (params.contains(p.key)) {
      check_param(p, params[p.key], sc.space.dim, path);
    } else if (p.required) {
      if (p.key == "seed") {
        throw ScenarioError(path, "experiment '" + sc.experiment +
                                      "' is randomized: seed is mandatory");
      }
      throw ScenarioError(path, "missing required parameter '" + p.key + "'");
    } else if (!p.fallback.is_null()) {
      params[p.key] = p.fallback;
    }
  }
  if (params.contains("seed")) sc.seed = params["seed"].get<std::uint64_t>();
  sc.params = std::move(params);

  sc.expect = doc.contains("expect") ? doc["expect"] : json::object();
  if (!sc.expect.is_object()) throw ScenarioError("expect", "expect must be an object");
  for (const auto& [metric, cond] : sc.expect.items()) {
    const std::string path = "expect." + metric;
    if (std::find(spec.metrics.begin(), spec.metrics.end(), metric) == spec.metrics.end()) {
      throw ScenarioError(path, "experiment '" + sc.experiment + "' has no metric '" + metric + "'");
    }
    if (!cond.is_object() || cond.empty()) {
      throw ScenarioError(path, path + " must be an object with max, min or equals");
    }
    reject_unknown(cond, {"max", "min", "equals"}, path);
    if (cond.contains("max")) as_number(cond["max"], path + ".max");
    if (cond.contains("min")) as_number(cond["min"], path + ".min");
  }

  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) {
      throw ScenarioError("output_dir", "output_dir must be a string");
    }
    sc.output_dir = doc["output_dir"].get<std::string>();
  }

  // Constructing the field runs the space's own preconditions.
  try {
    builtin_space(sc.space);
  } catch (const Error& e) {
    throw ScenarioError("space", e.what());
  }
  return sc;
}

Scenario parse_scenario_text(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of_offset(text, e.byte);
    std::ostringstream msg;
    msg << "parse error at line " << line << ": " << e.what();
    throw ScenarioError("", msg.str(), line);
  }
  return parse_scenario(doc, seed_override);
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), seed_override);
}

}  // namespace distlab
