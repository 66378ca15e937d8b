#pragma once

#include "distlab/distance_field.hpp"
#include "distlab/osculation.hpp"
#include "distlab/sphere.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace distlab {

enum class FinslerMethod {
  /// F = lim rho(x, x + r y) / r
  Ratio,
  /// F = lim d/dr rho(x, x + r y)
  RadialDerivative,
};

const char* to_string(FinslerMethod m);

/// Richardson ladder r_k = 0.1 * 2^-k * scale, k = 0..count-1.
std::vector<double> default_ladder(double scale = 1.0, int count = 6);

/// Polynomial extrapolation to 0 (Neville tableau) of samples g(r_k).
struct Extrapolation {
  double value = 0.0;
  /// |T[last][order] - T[last-1][order]|
  double error = 0.0;
  /// Size of the tableau corrections per column, used to spot divergence.
  std::vector<double> corrections;
};

Extrapolation richardson_to_zero(const std::vector<double>& nodes, const std::vector<double>& values,
                                 int order);

/// Induced (weak) Finsler metric of a distance field (holds its own copy of
/// the field). Not thread-safe to
/// share: extract() records the last error estimate.
class FinslerEvaluator {
 public:
  explicit FinslerEvaluator(const DistanceField& field,
                            FinslerMethod method = FinslerMethod::Ratio,
                            std::vector<double> ladder = default_ladder(), int order = 4);

  /// F(x, y); positive homogeneous in y by construction.
  double extract(const Point& x, const Vector& y);

  const DistanceField& field() const { return field_; }
  FinslerMethod method() const { return method_; }
  const std::vector<double>& ladder() const { return ladder_; }
  int order() const { return order_; }
  double err_estimate_last() const { return err_estimate_last_; }

  FinslerEvaluator with_method(FinslerMethod m) const;

 private:
  DistanceField field_;
  FinslerMethod method_;
  std::vector<double> ladder_;
  int order_;
  double err_estimate_last_ = 0.0;
};

double extract_F(FinslerEvaluator& evaluator, const Point& x, const Vector& y);

/// |F_ratio - F_radial| / F_ratio with otherwise identical settings.
double cross_validate_F(const FinslerEvaluator& evaluator, const Point& x, const Vector& y);

struct Indicatrix {
  std::vector<double> angles;
  std::vector<Vector> points;  // y with F(x, y) = 1
  PolygonTurning turning;
  Convexity convexity = Convexity::NotConvex;
};

/// n = 2. y(theta) = u(theta) / F(x, u(theta)).
Indicatrix indicatrix_sample(FinslerEvaluator& evaluator, const Point& x, int resolution,
                             double curvature_tol = 1e-10);

void write_csv(std::ostream& out, const Indicatrix& ind, const std::string& provenance = {});

/// Regular parametrized curve t -> x(t) on [t0, t1].
struct ParamCurve {
  std::function<Point(double)> position;
  /// Optional; central differences of `position` when empty.
  std::function<Vector(double)> velocity;
  double t0 = 0.0;
  double t1 = 1.0;

  Vector velocity_at(double t) const;
  /// Throws InvalidArgument if the velocity vanishes on a `samples` grid.
  void check_regular(int samples = 64) const;
};

ParamCurve segment_curve(const Point& from, const Point& to);
/// t -> (t, t^2), t in [t0, t1]
ParamCurve parabola_curve(double t0 = 0.0, double t1 = 1.0);
ParamCurve circle_arc_curve(const Point& center, double radius, double angle0, double angle1);
/// Piecewise-linear curve through the points, parametrized by index.
ParamCurve polyline_curve(std::vector<Point> points);

struct ArcLengthReport {
  std::vector<std::pair<int, double>> chord_sums;
  double quadrature_value = 0.0;
  double extrapolated_sD = 0.0;
  double gap = 0.0;
};

/// Chord sums on uniform subdivisions plus Richardson extrapolation in 1/N.
ArcLengthReport arc_length_D(const DistanceField& field, const ParamCurve& curve,
                             const std::vector<int>& n_list);

struct Quadrature {
  int panels = 16;
  int nodes = 5;
};

/// Gauss-Legendre nodes/weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int nodes);

double arc_length_F(FinslerEvaluator& evaluator, const ParamCurve& curve,
                    const Quadrature& quad = {});

/// Fills every field of the report, including s_F and the gap.
ArcLengthReport arc_length_report(const DistanceField& field, FinslerEvaluator& evaluator,
                                  const ParamCurve& curve, const std::vector<int>& n_list,
                                  const Quadrature& quad = {});

double theorem3_gap(const DistanceField& field, FinslerEvaluator& evaluator,
                    const ParamCurve& curve, const std::vector<int>& n_list,
                    const Quadrature& quad = {});

struct ConsistencyReport {
  double sD = 0.0;
  double rho_ab = 0.0;
  double sF = 0.0;
  bool equal = false;
  /// (steps, chord sum) per re-trace.
  std::vector<std::pair<int, double>> levels;
};

/// Chord length of the osculation curve between its generators, refined by
/// re-tracing [0, delta] at each step count and extrapolating in 1/steps.
ConsistencyReport theorem4_consistency(const DistanceField& field, FinslerEvaluator& evaluator,
                                       const CurveTrace& trace, double tol = 1e-5,
                                       const std::vector<int>& steps = {64, 128, 256},
                                       const OsculationOptions& opts = {});

struct StraightnessReport {
  double chord_deviation = 0.0;
  /// max |d^2/dr^2 |o(r) - a|| * delta^2 / |b - a| over the grid
  double affinity_residual = 0.0;
};

/// Uses the samples with 0 <= r <= delta; both generators must be present.
StraightnessReport straightness_and_affinity(const CurveTrace& trace);

/// Fixed-order pairwise summation.
double pairwise_sum(const std::vector<double>& values);

void write_csv(std::ostream& out, const ArcLengthReport& report, const std::string& provenance = {});

}  // namespace distlab
