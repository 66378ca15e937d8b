#pragma once

#include "distlab/distance_field.hpp"
#include "distlab/sphere.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace distlab {

/// outer_min: point of S_a(r) nearest to b (r >= 0).
/// inner_max: point of S_a(|r|) farthest from b, reported with r <= 0.
enum class Branch { OuterMin, InnerMax };

const char* to_string(Branch b);

struct OsculationOptions {
  double constraint_tol = 1e-10;
  /// Bound on sin(angle) between grad rho_a and grad rho_b.
  double first_order_tol = 1e-8;
  int max_iterations = 200;
  /// Lagrange-Newton steps attempted per polish phase.
  int newton_steps = 5;
  /// Projected Hessian eigenvalues below -saddle_tol * scale mean the
  /// stationary point is not an optimum of the requested kind.
  double saddle_tol = 1e-8;
  /// When > 0, osculation_point also runs a multistart and rejects
  /// non-unique answers.
  int uniqueness_starts = 0;
  std::uint64_t seed = 1;
  RadialOptions radial;
};

struct OsculationSolution {
  Point point;
  /// Signed trace parameter; negative on the inner_max branch.
  double r = 0.0;
  /// rho(b, point).
  double r_partner = 0.0;
  /// grad rho_a = lambda * grad rho_b at the point.
  double lambda = 0.0;
  double tangency_residual = 0.0;
  /// Angle between the sphere normals (radians).
  double tangency_angle = 0.0;
  /// Smallest eigenvalue of the Lagrangian Hessian of the (sign-adjusted)
  /// objective restricted to the tangent space of S_a.
  double min_eigen_constrained = 0.0;
  Branch branch = Branch::OuterMin;
  bool converged = false;
  /// Analytic generator sample (r = 0 or r = Delta); derivative fields are NaN.
  bool generator = false;
  int iterations = 0;
};

/// Single solve without the throwing policy: the result carries `converged`
/// and the residuals. Degenerate stationary points come back with
/// converged = true and min_eigen_constrained <= 0.
OsculationSolution solve_osculation(const DistanceField& field, const Point& a, const Point& b,
                                    double r, Branch branch, const std::optional<Point>& init,
                                    const OsculationOptions& opts = {});

/// Osculation point o(r; a, b). Throws NoConvergence, DegenerateOsculation
/// (min_eigen_constrained <= 0) and, with uniqueness_starts > 0,
/// NonUniqueOsculation.
OsculationSolution osculation_point(const DistanceField& field, const Point& a, const Point& b,
                                    double r, Branch branch,
                                    const std::optional<Point>& init = std::nullopt,
                                    const OsculationOptions& opts = {});

struct TraceError {
  double r = 0.0;
  ErrorKind kind = ErrorKind::NoConvergence;
  std::string message;
};

struct CurveTrace {
  Point generator_a;
  Point generator_b;
  double delta = 0.0;
  /// Sorted by increasing r; includes the analytic generator samples that
  /// fall inside the window.
  std::vector<OsculationSolution> samples;
  std::optional<TraceError> error;

  bool ok() const { return !error.has_value(); }
  /// Samples with 0 <= r <= delta, in order.
  std::vector<OsculationSolution> segment() const;
};

/// Marches r over a uniform grid of `steps` intervals, warm-starting each
/// solve from the previous point. On failure returns the samples solved so
/// far plus an error record.
CurveTrace trace(const DistanceField& field, const Point& a, const Point& b, double r_min,
                 double r_max, int steps, const OsculationOptions& opts = {});

/// trace() over the default window [-delta/2, 3 delta/2].
CurveTrace trace_default(const DistanceField& field, const Point& a, const Point& b,
                         int steps = 64, const OsculationOptions& opts = {});

/// Max |rho(g1,g) + rho(g,g2) - rho(g1,g2)| over ordered triples of
/// segment points.
double additivity_residual(const DistanceField& field, const CurveTrace& trace, int triple_count,
                           std::uint64_t seed = 1);

/// Regenerates traces from pairs of interior points and returns the largest
/// symmetric Hausdorff distance (point-to-polyline) to the original.
double quasigeodesic_check(const DistanceField& field, const CurveTrace& trace, int pair_count,
                           int steps, std::uint64_t seed = 1, const OsculationOptions& opts = {});

/// Largest pairwise angle between the tangent hyperplanes at p0 of the
/// spheres centred at the other trace points and passing through p0.
double common_tangent_check(const DistanceField& field, const CurveTrace& trace, int p0_index);

struct UniquenessResult {
  int clusters = 0;
  int converged = 0;
  std::vector<Point> representatives;
};

UniquenessResult multistart_uniqueness(const DistanceField& field, const Point& a, const Point& b,
                                       double r, int starts, std::uint64_t seed,
                                       const OsculationOptions& opts = {});

/// First-order and multiplier checks over the solved (non-generator) samples.
struct TraceDiagnostics {
  double max_tangency_angle = 0.0;
  /// max | |lambda| * |grad rho_b| / |grad rho_a| - 1 |
  double max_lambda_ratio_error = 0.0;
  /// lambda < 0 strictly between the generators, > 0 outside.
  bool lambda_sign_ok = true;
  double min_projected_eigen = std::numeric_limits<double>::infinity();
  /// Largest Euclidean distance from the straight line through a and b.
  double max_off_line = 0.0;
  int solved = 0;
};

TraceDiagnostics diagnose(const DistanceField& field, const CurveTrace& trace);

/// Euclidean distance from p to the polyline through `points`.
double distance_to_polyline(const Point& p, const std::vector<Point>& points);

void write_csv(std::ostream& out, const CurveTrace& trace, const std::string& provenance = {});

}  // namespace distlab
