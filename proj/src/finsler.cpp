#include "distlab/finsler.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

namespace distlab {

const char* to_string(FinslerMethod m) {
  return m == FinslerMethod::Ratio ? "ratio" : "radial_derivative";
}

std::vector<double> default_ladder(double scale, int count) {
  std::vector<double> ladder;
  for (int k = 0; k < count; ++k) ladder.push_back(0.1 * std::ldexp(1.0, -k) * scale);
  return ladder;
}

Extrapolation richardson_to_zero(const std::vector<double>& nodes, const std::vector<double>& values,
                                 int order) {
  const std::size_t m = nodes.size();
  if (m == 0 || values.size() != m) {
    throw Error(ErrorKind::InvalidArgument, "richardson: nodes and values must match");
  }
  order = std::clamp(order, 0, static_cast<int>(m) - 1);

  // table[k][j]: value at 0 of the interpolant through nodes k-j..k
  std::vector<std::vector<double>> table(m, std::vector<double>(order + 1, 0.0));
  for (std::size_t k = 0; k < m; ++k) {
    table[k][0] = values[k];
    for (int j = 1; j <= order && static_cast<std::size_t>(j) <= k; ++j) {
      const double xk = nodes[k];
      const double xkj = nodes[k - j];
      table[k][j] = (xk * table[k - 1][j - 1] - xkj * table[k][j - 1]) / (xk - xkj);
    }
  }

  Extrapolation out;
  const std::size_t last = m - 1;
  out.value = table[last][order];
  if (order == 0) {
    out.error = m > 1 ? std::abs(values[last] - values[last - 1]) : 0.0;
  } else if (last >= static_cast<std::size_t>(order) + 1) {
    out.error = std::abs(table[last][order] - table[last - 1][order]);
  } else {
    out.error = std::abs(table[last][order] - table[last][order - 1]);
  }
  for (int j = 1; j <= order; ++j) {
    out.corrections.push_back(std::abs(table[last][j] - table[last][j - 1]));
  }
  return out;
}

FinslerEvaluator::FinslerEvaluator(const DistanceField& field, FinslerMethod method,
                                   std::vector<double> ladder, int order)
    : field_(field), method_(method), ladder_(std::move(ladder)), order_(order) {
  if (ladder_.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "finsler: ladder needs at least two nodes");
  }
  for (std::size_t k = 0; k < ladder_.size(); ++k) {
    if (!(ladder_[k] > 0.0) || (k > 0 && !(ladder_[k] < ladder_[k - 1]))) {
      throw Error(ErrorKind::InvalidArgument, "finsler: ladder must be positive and decreasing");
    }
  }
  if (ladder_.back() < 1e-6 * ladder_.front()) {
    throw Error(ErrorKind::InvalidArgument, "finsler: smallest ladder node below 1e-6 * scale");
  }
  if (order_ < 1 || order_ >= static_cast<int>(ladder_.size())) {
    throw Error(ErrorKind::InvalidArgument, "finsler: order must be in [1, ladder size)");
  }
}

FinslerEvaluator FinslerEvaluator::with_method(FinslerMethod m) const {
  return FinslerEvaluator(field_, m, ladder_, order_);
}

double FinslerEvaluator::extract(const Point& x, const Vector& y) {
  check_point(field_, x, "x");
  if (y.size() != field_.dim) {
    throw Error(ErrorKind::DimensionMismatch, "finsler: direction has wrong dimension");
  }
  const double len = y.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw Error(ErrorKind::InvalidArgument, "finsler: direction must be nonzero and finite");
  }
  const Vector u = y / len;

  std::vector<double> values;
  values.reserve(ladder_.size());
  for (double r : ladder_) {
    if (method_ == FinslerMethod::Ratio) {
      values.push_back(eval_distance(field_, x, Point(x + r * u)) / r);
    } else {
      // Step proportional to r keeps the difference error a power series in r.
      const double h = 0.25 * r;
      const double up = eval_distance(field_, x, Point(x + (r + h) * u));
      const double down = eval_distance(field_, x, Point(x + (r - h) * u));
      values.push_back((up - down) / (2.0 * h));
    }
  }

  const Extrapolation ex = richardson_to_zero(ladder_, values, order_);
  if (!std::isfinite(ex.value)) {
    throw Error(ErrorKind::ExtrapolationDivergence, "finsler: non-finite extrapolation");
  }
  const double first = ex.corrections.front();
  const double final_corr = ex.corrections.back();
  if (final_corr > 10.0 * first && final_corr > 1e-10 * std::abs(ex.value)) {
    std::ostringstream msg;
    msg << field_.name << ": extrapolation corrections grow (" << first << " -> " << final_corr
        << "); rho/r not smooth near r = 0";
    throw Error(ErrorKind::ExtrapolationDivergence, msg.str());
  }
  // Differences of the raw samples contract along the ladder when the limit is
  // smooth; non-contracting tail differences mean the samples run away.
  const std::size_t m = values.size();
  bool runaway = m >= 4;
  for (std::size_t k = m - 2; runaway && k + 3 >= m && k >= 1; --k) {
    const double outer = std::abs(values[k] - values[k - 1]);
    const double inner = std::abs(values[k + 1] - values[k]);
    runaway = inner >= 0.9 * outer && inner > 1e-10 * std::abs(values[k + 1]);
  }
  if (runaway) {
    std::ostringstream msg;
    msg << field_.name << ": samples do not settle (" << values.front() << " -> " << values.back()
        << "); rho/r unbounded near r = 0";
    throw Error(ErrorKind::ExtrapolationDivergence, msg.str());
  }
  if (!(ex.value > 0.0)) {
    throw Error(ErrorKind::ExtrapolationDivergence, "finsler: extracted F is not positive");
  }
  err_estimate_last_ = len * ex.error;
  return len * ex.value;
}

double extract_F(FinslerEvaluator& evaluator, const Point& x, const Vector& y) {
  return evaluator.extract(x, y);
}

double cross_validate_F(const FinslerEvaluator& evaluator, const Point& x, const Vector& y) {
  FinslerEvaluator ratio = evaluator.with_method(FinslerMethod::Ratio);
  FinslerEvaluator radial = evaluator.with_method(FinslerMethod::RadialDerivative);
  const double f_ratio = ratio.extract(x, y);
  const double f_radial = radial.extract(x, y);
  return std::abs(f_ratio - f_radial) / f_ratio;
}

Indicatrix indicatrix_sample(FinslerEvaluator& evaluator, const Point& x, int resolution,
                             double curvature_tol) {
  if (evaluator.field().dim != 2) {
    throw Error(ErrorKind::InvalidArgument, "indicatrix: only n = 2 supported");
  }
  if (resolution < 32) throw Error(ErrorKind::InvalidArgument, "indicatrix: resolution >= 32");
  Indicatrix ind;
  for (int k = 0; k < resolution; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / resolution;
    Vector u(2);
    u << std::cos(theta), std::sin(theta);
    ind.angles.push_back(theta);
    ind.points.push_back(u / evaluator.extract(x, u));
  }
  ind.turning = polygon_turning(ind.points);
  ind.convexity = classify_polygon(ind.turning, curvature_tol);
  return ind;
}

void write_csv(std::ostream& out, const Indicatrix& ind, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << "theta,y0,y1\n" << std::setprecision(17);
  for (std::size_t k = 0; k < ind.points.size(); ++k) {
    out << ind.angles[k] << ',' << ind.points[k][0] << ',' << ind.points[k][1] << '\n';
  }
}

Vector ParamCurve::velocity_at(double t) const {
  if (velocity) return velocity(t);
  const double h = 1e-6 * std::max(std::abs(t1 - t0), 1e-300);
  return (position(t + h) - position(t - h)) / (2.0 * h);
}

void ParamCurve::check_regular(int samples) const {
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidArgument, "curve: empty parameter interval");
  std::vector<double> speed;
  for (int k = 0; k <= samples; ++k) speed.push_back(velocity_at(t0 + (t1 - t0) * k / samples).norm());
  const double top = *std::max_element(speed.begin(), speed.end());
  for (int k = 0; k <= samples; ++k) {
    // Relative floor: a finite-difference velocity never comes out exactly zero.
    if (!(speed[k] > 1e-8 * top)) {
      throw Error(ErrorKind::InvalidArgument,
                  "curve: velocity vanishes at t = " + std::to_string(t0 + (t1 - t0) * k / samples));
    }
  }
}

ParamCurve segment_curve(const Point& from, const Point& to) {
  ParamCurve c;
  c.position = [from, to](double t) -> Point { return from + t * (to - from); };
  c.velocity = [from, to](double) -> Vector { return to - from; };
  return c;
}

ParamCurve parabola_curve(double t0, double t1) {
  ParamCurve c;
  c.position = [](double t) -> Point { return Eigen::Vector2d(t, t * t); };
  c.velocity = [](double t) -> Vector { return Eigen::Vector2d(1.0, 2.0 * t); };
  c.t0 = t0;
  c.t1 = t1;
  return c;
}

ParamCurve circle_arc_curve(const Point& center, double radius, double angle0, double angle1) {
  if (center.size() != 2) throw Error(ErrorKind::InvalidArgument, "circle arc is planar");
  ParamCurve c;
  c.position = [center, radius](double t) -> Point {
    return center + radius * Eigen::Vector2d(std::cos(t), std::sin(t));
  };
  c.velocity = [radius](double t) -> Vector {
    return radius * Eigen::Vector2d(-std::sin(t), std::cos(t));
  };
  c.t0 = angle0;
  c.t1 = angle1;
  return c;
}

ParamCurve polyline_curve(std::vector<Point> points) {
  if (points.size() < 2) throw Error(ErrorKind::InvalidArgument, "polyline needs two points");
  auto shared = std::make_shared<const std::vector<Point>>(std::move(points));
  const double last = static_cast<double>(shared->size() - 1);
  auto locate = [shared, last](double t) {
    const double clamped = std::clamp(t, 0.0, last);
    const std::size_t k = std::min(static_cast<std::size_t>(clamped), shared->size() - 2);
    return std::pair<std::size_t, double>(k, clamped - static_cast<double>(k));
  };
  ParamCurve c;
  c.position = [shared, locate](double t) -> Point {
    const auto [k, s] = locate(t);
    return (*shared)[k] + s * ((*shared)[k + 1] - (*shared)[k]);
  };
  c.velocity = [shared, locate](double t) -> Vector {
    const auto [k, s] = locate(t);
    return (*shared)[k + 1] - (*shared)[k];
  };
  c.t0 = 0.0;
  c.t1 = last;
  return c;
}

double pairwise_sum(const std::vector<double>& values) {
  auto rec = [&](auto&& self, std::size_t lo, std::size_t hi) -> double {
    if (hi - lo <= 8) {
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += values[i];
      return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return self(self, lo, mid) + self(self, mid, hi);
  };
  return rec(rec, 0, values.size());
}

ArcLengthReport arc_length_D(const DistanceField& field, const ParamCurve& curve,
                             const std::vector<int>& n_list) {
  if (n_list.empty()) throw Error(ErrorKind::InvalidArgument, "arc_length_D: empty N list");
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (n_list[k] < 1 || n_list[k] > 1000000 || (k > 0 && n_list[k] <= n_list[k - 1])) {
      throw Error(ErrorKind::InvalidArgument,
                  "arc_length_D: N list must be increasing within [1, 1e6]");
    }
  }
  curve.check_regular();

  ArcLengthReport report;
  std::vector<double> nodes;
  std::vector<double> sums;
  for (int n : n_list) {
    std::vector<double> chords(n);
    Point prev = curve.position(curve.t0);
    for (int i = 1; i <= n; ++i) {
      const double t = i == n ? curve.t1 : curve.t0 + (curve.t1 - curve.t0) * i / n;
      Point next = curve.position(t);
      chords[i - 1] = eval_distance(field, prev, next);
      prev = std::move(next);
    }
    const double s = pairwise_sum(chords);
    report.chord_sums.emplace_back(n, s);
    nodes.push_back(1.0 / n);
    sums.push_back(s);
  }
  report.extrapolated_sD =
      richardson_to_zero(nodes, sums, static_cast<int>(nodes.size()) - 1).value;
  return report;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int nodes) {
  if (nodes < 1) throw Error(ErrorKind::InvalidArgument, "gauss_legendre: nodes >= 1");
  std::vector<double> x(nodes);
  std::vector<double> w(nodes);
  for (int i = 0; i < (nodes + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (nodes + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= nodes; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = nodes * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[nodes - 1 - i] = z;
    w[i] = w[nodes - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

double arc_length_F(FinslerEvaluator& evaluator, const ParamCurve& curve, const Quadrature& quad) {
  if (quad.panels < 1) throw Error(ErrorKind::InvalidArgument, "arc_length_F: panels >= 1");
  curve.check_regular();
  const auto [x, w] = gauss_legendre(quad.nodes);
  const double width = (curve.t1 - curve.t0) / quad.panels;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(quad.panels) * x.size());
  for (int p = 0; p < quad.panels; ++p) {
    const double mid = curve.t0 + (p + 0.5) * width;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double t = mid + 0.5 * width * x[k];
      terms.push_back(0.5 * width * w[k] *
                      evaluator.extract(curve.position(t), curve.velocity_at(t)));
    }
  }
  return pairwise_sum(terms);
}

ArcLengthReport arc_length_report(const DistanceField& field, FinslerEvaluator& evaluator,
                                  const ParamCurve& curve, const std::vector<int>& n_list,
                                  const Quadrature& quad) {
  ArcLengthReport report = arc_length_D(field, curve, n_list);
  report.quadrature_value = arc_length_F(evaluator, curve, quad);
  report.gap = std::abs(report.extrapolated_sD - report.quadrature_value);
  return report;
}

double theorem3_gap(const DistanceField& field, FinslerEvaluator& evaluator,
                    const ParamCurve& curve, const std::vector<int>& n_list,
                    const Quadrature& quad) {
  return arc_length_report(field, evaluator, curve, n_list, quad).gap;
}

ConsistencyReport theorem4_consistency(const DistanceField& field, FinslerEvaluator& evaluator,
                                       const CurveTrace& tr, double tol,
                                       const std::vector<int>& steps,
                                       const OsculationOptions& opts) {
  if (steps.empty()) throw Error(ErrorKind::InvalidArgument, "theorem4: empty step list");
  ConsistencyReport report;
  report.rho_ab = eval_distance(field, tr.generator_a, tr.generator_b);

  std::vector<double> nodes;
  std::vector<double> sums;
  std::vector<Point> finest;
  for (int n : steps) {
    const CurveTrace refined =
        trace(field, tr.generator_a, tr.generator_b, 0.0, report.rho_ab, n, opts);
    if (!refined.ok()) {
      throw Error(refined.error->kind, "theorem4 re-trace failed: " + refined.error->message);
    }
    std::vector<double> chords;
    for (std::size_t k = 0; k + 1 < refined.samples.size(); ++k) {
      chords.push_back(
          eval_distance(field, refined.samples[k].point, refined.samples[k + 1].point));
    }
    const double s = pairwise_sum(chords);
    report.levels.emplace_back(n, s);
    nodes.push_back(1.0 / n);
    sums.push_back(s);
    finest.clear();
    for (const auto& smp : refined.samples) finest.push_back(smp.point);
  }
  report.sD = richardson_to_zero(nodes, sums, static_cast<int>(nodes.size()) - 1).value;

  const int segments = static_cast<int>(finest.size()) - 1;
  report.sF = arc_length_F(evaluator, polyline_curve(finest), Quadrature{segments, 2});
  report.equal = std::abs(report.sD - report.rho_ab) <= tol;
  return report;
}

StraightnessReport straightness_and_affinity(const CurveTrace& tr) {
  const std::vector<OsculationSolution> seg = tr.segment();
  if (seg.size() < 3 || !seg.front().generator || !seg.back().generator) {
    throw Error(ErrorKind::InvalidArgument,
                "straightness: trace must cover [0, delta] with at least 3 samples");
  }
  const Point& a = seg.front().point;
  const Point& b = seg.back().point;
  const std::vector<Point> chord{a, b};

  StraightnessReport report;
  std::vector<double> progress;
  for (const auto& s : seg) {
    report.chord_deviation = std::max(report.chord_deviation, distance_to_polyline(s.point, chord));
    progress.push_back((s.point - a).norm());
  }
  const double span = (b - a).norm();
  const double scale = tr.delta * tr.delta / span;
  for (std::size_t k = 1; k + 1 < seg.size(); ++k) {
    const double h0 = seg[k].r - seg[k - 1].r;
    const double h1 = seg[k + 1].r - seg[k].r;
    const double second = 2.0 *
                          ((progress[k + 1] - progress[k]) / h1 - (progress[k] - progress[k - 1]) / h0) /
                          (h0 + h1);
    report.affinity_residual = std::max(report.affinity_residual, std::abs(second) * scale);
  }
  return report;
}

void write_csv(std::ostream& out, const ArcLengthReport& report, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << "N,chord_sum,extrapolated_sD,quadrature_sF\n" << std::setprecision(17);
  for (const auto& [n, s] : report.chord_sums) {
    out << n << ',' << s << ',' << report.extrapolated_sD << ',' << report.quadrature_value << '\n';
  }
}

}  // namespace distlab
