#include "distlab/runner.hpp"

#include "distlab/axioms.hpp"
#include "distlab/finsler.hpp"
#include "distlab/osculation.hpp"
#include "distlab/sphere.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

namespace distlab {

using nlohmann::json;

namespace {

Point point_of(const json& j) {
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return p;
}

Point point_or_origin(const json& params, const char* key, int dim) {
  if (params.contains(key)) return point_of(params[key]);
  return Point::Zero(dim);
}

Vector bounds_of(const json& j, int dim) {
  if (j.is_array()) return point_of(j);
  return Vector::Constant(dim, j.get<double>());
}

std::vector<int> ints_of(const json& j) {
  std::vector<int> out;
  for (const auto& x : j) out.push_back(x.get<int>());
  return out;
}

// Non-finite values have no JSON literal; report them as strings.
json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

ParamCurve curve_of(const json& c) {
  const std::string type = c["type"].get<std::string>();
  if (type == "segment") return segment_curve(point_of(c["from"]), point_of(c["to"]));
  if (type == "parabola") return parabola_curve(c.value("t0", 0.0), c.value("t1", 1.0));
  return circle_arc_curve(point_of(c["center"]), c["radius"].get<double>(),
                          c["angle0"].get<double>(), c["angle1"].get<double>());
}

struct Window {
  double r_min;
  double r_max;
};

Window window_of(const json& params, double delta) {
  return {params.contains("r_min") ? params["r_min"].get<double>() : -0.5 * delta,
          params.contains("r_max") ? params["r_max"].get<double>() : 1.5 * delta};
}

std::string csv_text(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

struct Outcome {
  json metrics = json::object();
  std::map<std::string, std::string> artifacts;
};

using Experiment = std::function<void(const DistanceField&, const Scenario&, const std::string&,
                                      Outcome&)>;

void run_axioms(const DistanceField& field, const Scenario& sc, const std::string&, Outcome& out) {
  const json& p = sc.params;
  BoxSampler box;
  box.lo = bounds_of(p["box_lo"], field.dim);
  box.hi = bounds_of(p["box_hi"], field.dim);
  box.count = p["samples"].get<int>();
  box.seed = p["seed"].get<std::uint64_t>();
  const AxiomReport r = axiom_check(field, box, p["tol"].get<double>());
  out.metrics = {{"worst_identity", number(r.worst_identity)},
                 {"worst_symmetry", number(r.worst_symmetry)},
                 {"worst_triangle", number(r.worst_triangle)},
                 {"pass_identity", r.pass_identity},
                 {"pass_symmetry", r.pass_symmetry},
                 {"pass_triangle", r.pass_triangle}};
}

void run_sphere(const DistanceField& field, const Scenario& sc, const std::string& prov,
                Outcome& out) {
  const json& p = sc.params;
  const Point center = point_or_origin(p, "center", field.dim);
  const SphereSample s =
      sphere_sample(field, center, p["radius"].get<double>(), p["resolution"].get<int>());
  out.metrics["max_residual"] = number(s.max_residual());
  if (field.dim == 2) {
    const ConvexityReport c = convexity_check(s, field, p["curvature_tol"].get<double>(),
                                              p["symmetry_tol"].get<double>());
    out.metrics["strictly_convex"] = c.strictly_convex;
    out.metrics["min_discrete_curvature"] = number(c.min_discrete_curvature);
    out.metrics["symmetric"] = c.symmetric;
    out.metrics["symmetry_residual"] = number(c.symmetry_residual);
  } else {
    const SymmetryResult sym = symmetry_of_sample(field, s, p["symmetry_tol"].get<double>());
    out.metrics["symmetric"] = sym.symmetric;
    out.metrics["symmetry_residual"] = number(sym.residual);
  }
  out.artifacts["sphere.csv"] = csv_text([&](std::ostream& o) { write_csv(o, s, prov); });
}

CurveTrace trace_of(const DistanceField& field, const json& p) {
  const Point a = point_of(p["a"]);
  const Point b = point_of(p["b"]);
  const Window w = window_of(p, eval_distance(field, a, b));
  return trace(field, a, b, w.r_min, w.r_max, p["steps"].get<int>());
}

[[noreturn]] void raise_trace_error(const CurveTrace& tr) {
  std::ostringstream msg;
  msg << "trace failed at r = " << std::setprecision(17) << tr.error->r << ": "
      << tr.error->message;
  throw Error(tr.error->kind, msg.str());
}

void run_trace(const DistanceField& field, const Scenario& sc, const std::string& prov,
               Outcome& out) {
  const json& p = sc.params;
  const CurveTrace tr = trace_of(field, p);
  out.artifacts["trace.csv"] = csv_text([&](std::ostream& o) { write_csv(o, tr, prov); });
  if (!tr.ok()) raise_trace_error(tr);
  const TraceDiagnostics d = diagnose(field, tr);
  const std::uint64_t seed = p.contains("seed") ? p["seed"].get<std::uint64_t>() : 1;
  out.metrics = {{"samples", tr.samples.size()},
                 {"max_off_line", number(d.max_off_line)},
                 {"additivity_residual",
                  number(additivity_residual(field, tr, p["triples"].get<int>(), seed))},
                 {"max_tangency_angle", number(d.max_tangency_angle)},
                 {"max_lambda_ratio_error", number(d.max_lambda_ratio_error)},
                 {"lambda_sign_ok", d.lambda_sign_ok},
                 {"min_projected_eigen", number(d.min_projected_eigen)},
                 {"completed", tr.ok()}};
}

void run_quasigeodesic(const DistanceField& field, const Scenario& sc, const std::string& prov,
                       Outcome& out) {
  const json& p = sc.params;
  const CurveTrace tr = trace_of(field, p);
  out.artifacts["trace.csv"] = csv_text([&](std::ostream& o) { write_csv(o, tr, prov); });
  if (!tr.ok()) raise_trace_error(tr);
  out.metrics["hausdorff"] = number(quasigeodesic_check(
      field, tr, p["pairs"].get<int>(), p["regen_steps"].get<int>(), p["seed"].get<std::uint64_t>()));
}

void run_tangent_plane(const DistanceField& field, const Scenario& sc, const std::string& prov,
                       Outcome& out) {
  const json& p = sc.params;
  const CurveTrace tr = trace_of(field, p);
  out.artifacts["trace.csv"] = csv_text([&](std::ostream& o) { write_csv(o, tr, prov); });
  if (!tr.ok()) raise_trace_error(tr);
  int index = 0;
  if (p.contains("p0_index")) {
    index = p["p0_index"].get<int>();
  } else {
    // Sample nearest the midpoint of the generator segment.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
      const double gap = std::abs(tr.samples[i].r - 0.5 * tr.delta);
      if (gap < best) {
        best = gap;
        index = static_cast<int>(i);
      }
    }
  }
  out.metrics["max_angle"] = number(common_tangent_check(field, tr, index));
}

void run_uniqueness(const DistanceField& field, const Scenario& sc, const std::string&,
                    Outcome& out) {
  const json& p = sc.params;
  const UniquenessResult u =
      multistart_uniqueness(field, point_of(p["a"]), point_of(p["b"]), p["r"].get<double>(),
                            p["starts"].get<int>(), p["seed"].get<std::uint64_t>());
  out.metrics = {{"clusters", u.clusters}, {"converged", u.converged}};
}

FinslerEvaluator evaluator_of(const DistanceField& field, const json& p) {
  FinslerMethod method = FinslerMethod::Ratio;
  int order = 4;
  std::vector<double> ladder = default_ladder();
  if (p.contains("method")) {
    const std::string m = p["method"].get<std::string>();
    if (m == "radial_derivative") {
      method = FinslerMethod::RadialDerivative;
    } else if (m != "ratio") {
      throw Error(ErrorKind::InvalidArgument, "unknown extraction method '" + m + "'");
    }
  }
  if (p.contains("ladder_scale")) {
    ladder = default_ladder(p["ladder_scale"].get<double>(), p["ladder_count"].get<int>());
  }
  if (p.contains("order")) order = p["order"].get<int>();
  return FinslerEvaluator(field, method, ladder, order);
}

void run_extract_metric(const DistanceField& field, const Scenario& sc, const std::string&,
                        Outcome& out) {
  const json& p = sc.params;
  const Point x = point_or_origin(p, "x", field.dim);
  const Vector y = point_of(p["y"]);
  FinslerEvaluator ev = evaluator_of(field, p);
  const double F = ev.extract(x, y);
  const double err = ev.err_estimate_last();
  FinslerEvaluator ratio = ev.with_method(FinslerMethod::Ratio);
  FinslerEvaluator radial = ev.with_method(FinslerMethod::RadialDerivative);
  out.metrics = {{"F", number(F)},
                 {"F_ratio", number(ratio.extract(x, y))},
                 {"F_radial", number(radial.extract(x, y))},
                 {"cross_gap", number(cross_validate_F(ev, x, y))},
                 {"err_estimate", number(err)}};
}

void run_indicatrix(const DistanceField& field, const Scenario& sc, const std::string& prov,
                    Outcome& out) {
  const json& p = sc.params;
  FinslerEvaluator ev(field);
  const Indicatrix ind = indicatrix_sample(ev, point_or_origin(p, "x", field.dim),
                                           p["resolution"].get<int>(),
                                           p["curvature_tol"].get<double>());
  out.metrics = {{"strictly_convex", ind.convexity == Convexity::StrictlyConvex},
                 {"convex", ind.convexity != Convexity::NotConvex},
                 {"min_discrete_curvature", number(ind.turning.min_curvature)}};
  out.artifacts["indicatrix.csv"] = csv_text([&](std::ostream& o) { write_csv(o, ind, prov); });
}

ArcLengthReport arc_of(const DistanceField& field, const Scenario& sc, const std::string& prov,
                       Outcome& out) {
  const json& p = sc.params;
  FinslerEvaluator ev(field);
  const ParamCurve curve = curve_of(p["curve"]);
  curve.check_regular();
  const ArcLengthReport rep = arc_length_report(field, ev, curve, ints_of(p["N"]),
                                                {p["panels"].get<int>(), p["nodes"].get<int>()});
  out.artifacts["arclength.csv"] = csv_text([&](std::ostream& o) { write_csv(o, rep, prov); });
  return rep;
}

void run_arclength(const DistanceField& field, const Scenario& sc, const std::string& prov,
                   Outcome& out) {
  const ArcLengthReport rep = arc_of(field, sc, prov, out);
  out.metrics = {{"sD_extrapolated", number(rep.extrapolated_sD)},
                 {"sD_last", number(rep.chord_sums.back().second)},
                 {"sF", number(rep.quadrature_value)},
                 {"gap", number(rep.gap)}};
}

void run_theorem3(const DistanceField& field, const Scenario& sc, const std::string& prov,
                  Outcome& out) {
  const ArcLengthReport rep = arc_of(field, sc, prov, out);
  // Each refinement must cut the chord gap at least in proportion to 1/N,
  // up to an absolute floor set by the quadrature's own accuracy.
  bool shrink = true;
  for (std::size_t k = 1; k < rep.chord_sums.size(); ++k) {
    const double g0 = std::abs(rep.chord_sums[k - 1].second - rep.quadrature_value);
    const double g1 = std::abs(rep.chord_sums[k].second - rep.quadrature_value);
    const double ratio = double(rep.chord_sums[k - 1].first) / double(rep.chord_sums[k].first);
    if (g1 > g0 * ratio * (1.0 + 1e-6) + 1e-12) shrink = false;
  }
  out.metrics = {{"gap", number(rep.gap)},
                 {"final_chord_gap",
                  number(std::abs(rep.chord_sums.back().second - rep.quadrature_value))},
                 {"chord_gaps_shrink", shrink},
                 {"sD_extrapolated", number(rep.extrapolated_sD)},
                 {"sF", number(rep.quadrature_value)}};
}

void run_theorem4(const DistanceField& field, const Scenario& sc, const std::string& prov,
                  Outcome& out) {
  const json& p = sc.params;
  const Point a = point_of(p["a"]);
  const Point b = point_of(p["b"]);
  const std::vector<int> steps = ints_of(p["steps"]);
  const CurveTrace tr = trace(field, a, b, 0.0, eval_distance(field, a, b), steps.front());
  out.artifacts["trace.csv"] = csv_text([&](std::ostream& o) { write_csv(o, tr, prov); });
  if (!tr.ok()) raise_trace_error(tr);
  FinslerEvaluator ev(field);
  const ConsistencyReport c = theorem4_consistency(field, ev, tr, p["tol"].get<double>(), steps);
  out.metrics = {{"sD", number(c.sD)},
                 {"rho_ab", number(c.rho_ab)},
                 {"sF", number(c.sF)},
                 {"equal", c.equal}};
}

void run_theorem5(const DistanceField& field, const Scenario& sc, const std::string& prov,
                  Outcome& out) {
  const json& p = sc.params;
  const Point a = point_of(p["a"]);
  const Point b = point_of(p["b"]);
  const Point center = p.contains("center") ? point_of(p["center"]) : a;
  const double tol = p["symmetry_tol"].get<double>();
  double residual = 0.0;
  for (const auto& r : p["radii"]) {
    const SymmetryResult s =
        symmetry_check(field, center, r.get<double>(), p["resolution"].get<int>(), tol);
    residual = std::max(residual, s.residual);
  }
  const CurveTrace tr =
      trace(field, a, b, 0.0, eval_distance(field, a, b), p["steps"].get<int>());
  out.artifacts["trace.csv"] = csv_text([&](std::ostream& o) { write_csv(o, tr, prov); });
  if (!tr.ok()) raise_trace_error(tr);
  const StraightnessReport st = straightness_and_affinity(tr);
  out.metrics = {{"symmetry_residual", number(residual)},
                 {"symmetric", residual <= tol},
                 {"chord_deviation", number(st.chord_deviation)},
                 {"affinity_residual", number(st.affinity_residual)}};
}

const std::map<std::string, Experiment>& dispatch() {
  static const std::map<std::string, Experiment> table = {
      {"axioms", run_axioms},
      {"sphere", run_sphere},
      {"trace", run_trace},
      {"quasigeodesic", run_quasigeodesic},
      {"tangent_plane", run_tangent_plane},
      {"uniqueness", run_uniqueness},
      {"extract_metric", run_extract_metric},
      {"indicatrix", run_indicatrix},
      {"arclength", run_arclength},
      {"theorem3", run_theorem3},
      {"theorem4", run_theorem4},
      {"theorem5", run_theorem5},
  };
  return table;
}

json evaluate_checks(const json& expect, const json& metrics, bool& all_pass) {
  json checks = json::array();
  all_pass = true;
  for (const auto& [metric, cond] : expect.items()) {
    const bool present = metrics.contains(metric);
    const json value = present ? metrics[metric] : json(nullptr);
    for (const auto& [op, threshold] : cond.items()) {
      bool pass = false;
      if (present) {
        if (op == "equals") {
          pass = value == threshold;
        } else if (value.is_number()) {
          const double v = value.get<double>();
          const double t = threshold.get<double>();
          pass = op == "max" ? v <= t : v >= t;
        }
      }
      all_pass = all_pass && pass;
      checks.push_back({{"metric", metric}, {"op", op}, {"threshold", threshold},
                        {"value", value}, {"pass", pass}});
    }
  }
  return checks;
}

json tolerance_table(const Scenario& sc) {
  const OsculationOptions osc;
  const FiniteDifference fd;
  json t = {{"radial_tol", osc.radial.tol},
            {"constraint_tol", osc.constraint_tol},
            {"first_order_tol", osc.first_order_tol},
            {"saddle_tol", osc.saddle_tol},
            {"max_iterations", osc.max_iterations},
            {"fd_grad_rel", fd.grad_rel},
            {"fd_hess_rel", fd.hess_rel}};
  for (const auto& [key, value] : sc.params.items()) {
    if (key.find("tol") != std::string::npos) t["param." + key] = value;
  }
  return t;
}

std::string format_value(const json& v) {
  if (v.is_number_float()) {
    std::ostringstream o;
    o << std::setprecision(6) << v.get<double>();
    return o.str();
  }
  return v.dump();
}

}  // namespace

const char* tool_version() { return DISTLAB_VERSION; }

std::string scenario_hash(const Scenario& sc) {
  const json effective = {{"space", space_to_json(sc.space)},
                          {"experiment", sc.experiment},
                          {"params", sc.params},
                          {"expect", sc.expect}};
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : effective.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

RunReport run(const Scenario& sc) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  const std::string hash = scenario_hash(sc);
  const std::string prov = std::string("distlab ") + tool_version() + " scenario=" + hash;
  std::ostringstream summary;
  summary << "distlab " << tool_version() << "\n"
          << "experiment: " << sc.experiment << "\n"
          << "space: " << describe(sc.space) << "\n"
          << "scenario: " << hash << "\n";

  Outcome out;
  try {
    const DistanceField field = builtin_space(sc.space);
    dispatch().at(sc.experiment)(field, sc, prov, out);
  } catch (const Error& e) {
    rep.status = RunStatus::ComputationalError;
    rep.document = {{"tool", "distlab"},
                    {"version", tool_version()},
                    {"scenario_hash", hash},
                    {"operation", sc.experiment},
                    {"space", space_to_json(sc.space)},
                    {"kind", to_string(e.kind())},
                    {"message", e.what()},
                    {"inputs", sc.params}};
    rep.artifacts = std::move(out.artifacts);
    rep.artifacts["error.json"] = rep.document.dump(2) + "\n";
    summary << "ERROR " << to_string(e.kind()) << ": " << e.what() << "\n";
  }

  if (rep.status != RunStatus::ComputationalError) {
    bool pass = true;
    const json checks = evaluate_checks(sc.expect, out.metrics, pass);
    rep.status = pass ? RunStatus::Pass : RunStatus::ExpectationFailed;
    rep.document = {{"tool", "distlab"},
                    {"version", tool_version()},
                    {"scenario", sc.source},
                    {"scenario_hash", hash},
                    {"space", space_to_json(sc.space)},
                    {"experiment", sc.experiment},
                    {"inputs", sc.params},
                    {"metrics", out.metrics},
                    {"checks", checks},
                    {"pass", pass},
                    {"tolerances", tolerance_table(sc)}};
    rep.artifacts = std::move(out.artifacts);
    rep.artifacts["report.json"] = rep.document.dump(2) + "\n";
    summary << "metrics:\n";
    for (const auto& [k, v] : out.metrics.items()) {
      summary << "  " << k << " = " << format_value(v) << "\n";
    }
    for (const auto& c : checks) {
      summary << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["metric"].get<std::string>()
              << " " << c["op"].get<std::string>() << " " << format_value(c["threshold"])
              << " (value " << format_value(c["value"]) << ")\n";
    }
    summary << "result: " << (pass ? "PASS" : "FAIL") << "\n";
  }

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary << "wall time: " << std::fixed << std::setprecision(3) << rep.wall_seconds << " s\n";
  rep.summary = summary.str();
  return rep;
}

void write_artifacts(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << text;
  };
  for (const auto& [name, text] : report.artifacts) put(name, text);
  put("summary.txt", report.summary);
}

std::filesystem::path resolve_output_dir(const Scenario& sc, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (sc.output_dir) return *sc.output_dir;
  if (const char* env = std::getenv("DISTLAB_OUT"); env && *env) return env;
  return "distlab_out";
}

}  // namespace distlab
