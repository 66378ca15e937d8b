#pragma once

#include "distlab/distance_field.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace distlab {

struct RadialOptions {
  double tol = 1e-10;
  int max_expansions = 60;
  int max_iterations = 200;
  /// Interior probes used to confirm s -> rho(a, a + s u) is increasing.
  int monotone_probes = 8;
};

/// Euclidean distance t along the unit direction u such that
/// rho(a, a + t u) = r. Bracketing plus safeguarded Newton.
double radial_solve(const DistanceField& field, const Point& a, const Vector& u, double r,
                    const RadialOptions& opts = {});

/// Unit direction for an angular parameter: theta for n = 2, (theta, phi)
/// polar/azimuth for n = 3.
Vector direction_from_angles(const Vector& angles);

/// Discretized distance sphere S_center(radius).
struct SphereSample {
  Point center;
  double radius = 0.0;
  std::vector<Vector> angles;
  std::vector<Point> points;
  std::vector<double> radial_t;
  /// |rho(center, point) - radius| per point.
  std::vector<double> residual;

  std::size_t size() const { return points.size(); }
  double max_residual() const;
};

/// Uniform angular grid. n = 2: `resolution` angles on [0, 2 pi).
/// n = 3: resolution/2 polar rows (cell-centred, poles excluded) by
/// `resolution` azimuths.
SphereSample sphere_sample(const DistanceField& field, const Point& a, double r, int resolution,
                           const RadialOptions& opts = {});

/// Discrete turning of a closed planar polygon.
struct PolygonTurning {
  /// Orientation-normalized min over vertices of cross(e1, e2) / (|e1||e2|).
  double min_curvature = 0.0;
  int worst_index = -1;
  /// Sum of signed exterior angles, orientation-normalized (2 pi for a simple
  /// convex loop).
  double total_turning = 0.0;
};

PolygonTurning polygon_turning(const std::vector<Point>& polygon);

enum class Convexity { StrictlyConvex, Convex, NotConvex };

const char* to_string(Convexity c);

Convexity classify_polygon(const PolygonTurning& turning, double curvature_tol);

struct ConvexityReport {
  bool strictly_convex = false;
  double min_discrete_curvature = 0.0;
  int worst_index = -1;
  bool symmetric = false;
  double symmetry_residual = 0.0;
};

struct SymmetryResult {
  bool symmetric = false;
  double residual = 0.0;
};

/// n = 2 only. Fills the symmetry fields from the sample's own points.
ConvexityReport convexity_check(const SphereSample& sample, const DistanceField& field,
                                double curvature_tol = 1e-10, double symmetry_tol = 1e-8);

/// Outward unit normal of S_a(rho(a, p)) at p.
Vector tangent_normal(const DistanceField& field, const Point& a, const Point& p);

/// Max over sphere points p of |rho(a, 2a - p) - r|: central symmetry in the
/// Euclidean sense.
SymmetryResult symmetry_check(const DistanceField& field, const Point& a, double r,
                              int resolution, double tol, const RadialOptions& opts = {});

SymmetryResult symmetry_of_sample(const DistanceField& field, const SphereSample& sample,
                                  double tol);

/// CSV with header; optional provenance comment written first.
void write_csv(std::ostream& out, const SphereSample& sample, const std::string& provenance = {});

}  // namespace distlab
