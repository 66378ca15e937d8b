#include "distlab/sphere.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace distlab {

double radial_solve(const DistanceField& field, const Point& a, const Vector& u, double r,
                    const RadialOptions& opts) {
  check_point(field, a, "center");
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::InvalidArgument, "radial_solve: radius must be positive");
  }
  if (u.size() != field.dim || std::abs(u.norm() - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidArgument, "radial_solve: direction must be a unit vector");
  }

  auto profile = [&](double s) { return field.eval(a, a + s * u) - r; };

  // Expand [lo, hi] until the profile changes sign, insisting on growth.
  double lo = 0.0;
  double hi = r;
  double g_prev = -r;
  double g_hi = profile(hi);
  int expansions = 0;
  while (g_hi < 0.0) {
    if (g_hi == g_prev) {
      std::ostringstream msg;
      msg << field.name << ": no bracket for radius " << r << " (profile saturates at "
          << g_hi + r << ")";
      throw Error(ErrorKind::BracketNotFound, msg.str());
    }
    if (!(g_hi > g_prev)) {
      std::ostringstream msg;
      msg << field.name << ": radial profile not increasing near s = " << hi;
      throw Error(ErrorKind::NonMonotoneRadial, msg.str());
    }
    if (++expansions > opts.max_expansions) {
      std::ostringstream msg;
      msg << field.name << ": no bracket for radius " << r << " (rho stays below " << g_hi + r
          << ")";
      throw Error(ErrorKind::BracketNotFound, msg.str());
    }
    lo = hi;
    g_prev = g_hi;
    hi *= 2.0;
    g_hi = profile(hi);
  }
  if (!std::isfinite(g_hi)) {
    throw Error(ErrorKind::InvalidField, field.name + ": non-finite radial profile");
  }

  double prev = -r;
  for (int k = 1; k <= opts.monotone_probes; ++k) {
    const double g = profile(hi * k / opts.monotone_probes);
    if (!(g > prev)) {
      std::ostringstream msg;
      if (g == prev && std::abs(g) <= opts.tol) {
        // Bounded profile rounding up to r: the radius is a supremum, not a value.
        msg << field.name << ": radius " << r << " not attained (profile saturates)";
        throw Error(ErrorKind::BracketNotFound, msg.str());
      }
      msg << field.name << ": radial profile not increasing on (0, " << hi << "]";
      throw Error(ErrorKind::NonMonotoneRadial, msg.str());
    }
    prev = g;
  }

  double s = 0.5 * (lo + hi);
  double g = profile(s);
  auto slope = [&](double at) {
    return grad2_distance(field, a, Point(a + at * u)).dot(u);
  };
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (g < 0.0) lo = s; else hi = s;
    if (std::abs(g) <= opts.tol) break;
    const double d = slope(s);
    double next = (d > 0.0 && std::isfinite(d)) ? s - g / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
    g = profile(s);
  }
  if (std::abs(g) > opts.tol) {
    std::ostringstream msg;
    msg << field.name << ": radial solve did not reach tolerance (|g| = " << std::abs(g) << ")";
    throw Error(ErrorKind::NoConvergence, msg.str());
  }
  // Polish below the acceptance tolerance while it keeps improving.
  for (int it = 0; it < 3 && g != 0.0; ++it) {
    const double d = slope(s);
    if (!(d > 0.0)) break;
    const double next = s - g / d;
    const double gn = profile(next);
    if (!(std::abs(gn) < std::abs(g))) break;
    s = next;
    g = gn;
  }
  return s;
}

Vector direction_from_angles(const Vector& angles) {
  if (angles.size() == 1) {
    Vector u(2);
    u << std::cos(angles[0]), std::sin(angles[0]);
    return u;
  }
  if (angles.size() == 2) {
    const double st = std::sin(angles[0]);
    Vector u(3);
    u << st * std::cos(angles[1]), st * std::sin(angles[1]), std::cos(angles[0]);
    return u;
  }
  throw Error(ErrorKind::InvalidArgument, "direction_from_angles: only n = 2, 3 supported");
}

double SphereSample::max_residual() const {
  double worst = 0.0;
  for (double r : residual) worst = std::max(worst, r);
  return worst;
}

SphereSample sphere_sample(const DistanceField& field, const Point& a, double r, int resolution,
                           const RadialOptions& opts) {
  if (field.dim != 2 && field.dim != 3) {
    throw Error(ErrorKind::InvalidArgument, "sphere_sample: only n = 2, 3 supported");
  }
  if (resolution < 4) {
    throw Error(ErrorKind::InvalidArgument, "sphere_sample: resolution must be >= 4");
  }
  SphereSample sample;
  sample.center = a;
  sample.radius = r;

  std::vector<Vector> grid;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (field.dim == 2) {
    for (int k = 0; k < resolution; ++k) grid.push_back(Vector::Constant(1, kTwoPi * k / resolution));
  } else {
    const int rows = std::max(resolution / 2, 2);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < resolution; ++j) {
        Vector ang(2);
        ang << std::numbers::pi * (i + 0.5) / rows, kTwoPi * j / resolution;
        grid.push_back(ang);
      }
    }
  }

  for (const Vector& ang : grid) {
    const Vector u = direction_from_angles(ang);
    double t = 0.0;
    try {
      t = radial_solve(field, a, u, r, opts);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " [angle";
      for (Eigen::Index i = 0; i < ang.size(); ++i) msg << ' ' << ang[i];
      msg << ']';
      throw Error(e.kind(), msg.str());
    }
    Point p = a + t * u;
    sample.angles.push_back(ang);
    sample.radial_t.push_back(t);
    sample.residual.push_back(std::abs(eval_distance(field, a, p) - r));
    sample.points.push_back(std::move(p));
  }
  return sample;
}

PolygonTurning polygon_turning(const std::vector<Point>& polygon) {
  const std::size_t m = polygon.size();
  if (m < 3) throw Error(ErrorKind::DegeneratePolygon, "polygon needs at least 3 vertices");
  for (const Point& p : polygon) {
    if (p.size() != 2) throw Error(ErrorKind::InvalidArgument, "polygon turning is planar only");
  }

  double perimeter = 0.0;
  double area2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Point& p = polygon[k];
    const Point& q = polygon[(k + 1) % m];
    perimeter += (q - p).norm();
    area2 += p[0] * q[1] - p[1] * q[0];
  }
  const double min_edge = 1e-14 * perimeter;

  PolygonTurning out;
  out.min_curvature = std::numeric_limits<double>::infinity();
  const double orientation = area2 >= 0.0 ? 1.0 : -1.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Vector e1 = polygon[k] - polygon[(k + m - 1) % m];
    const Vector e2 = polygon[(k + 1) % m] - polygon[k];
    const double l1 = e1.norm();
    const double l2 = e2.norm();
    if (l1 <= min_edge || l2 <= min_edge) {
      throw Error(ErrorKind::DegeneratePolygon,
                  "repeated polygon vertex at index " + std::to_string(k));
    }
    const double cross = e1[0] * e2[1] - e1[1] * e2[0];
    const double kappa = orientation * cross / (l1 * l2);
    out.total_turning += orientation * std::atan2(cross, e1.dot(e2));
    if (kappa < out.min_curvature) {
      out.min_curvature = kappa;
      out.worst_index = static_cast<int>(k);
    }
  }
  return out;
}

const char* to_string(Convexity c) {
  switch (c) {
    case Convexity::StrictlyConvex: return "strictly_convex";
    case Convexity::Convex: return "convex";
    case Convexity::NotConvex: return "not_convex";
  }
  return "unknown";
}

Convexity classify_polygon(const PolygonTurning& turning, double curvature_tol) {
  // A locally convex loop that winds more than once is not convex.
  if (std::abs(turning.total_turning - 2.0 * std::numbers::pi) > 1e-6) return Convexity::NotConvex;
  if (turning.min_curvature > curvature_tol) return Convexity::StrictlyConvex;
  if (turning.min_curvature >= -curvature_tol) return Convexity::Convex;
  return Convexity::NotConvex;
}

SymmetryResult symmetry_of_sample(const DistanceField& field, const SphereSample& sample,
                                  double tol) {
  SymmetryResult out;
  for (const Point& p : sample.points) {
    const Point reflected = 2.0 * sample.center - p;
    out.residual =
        std::max(out.residual, std::abs(eval_distance(field, sample.center, reflected) - sample.radius));
  }
  out.symmetric = out.residual <= tol;
  return out;
}

ConvexityReport convexity_check(const SphereSample& sample, const DistanceField& field,
                                double curvature_tol, double symmetry_tol) {
  if (field.dim != 2) {
    throw Error(ErrorKind::InvalidArgument, "convexity_check: only n = 2 spheres are checked");
  }
  const PolygonTurning turning = polygon_turning(sample.points);
  ConvexityReport report;
  report.min_discrete_curvature = turning.min_curvature;
  report.worst_index = turning.worst_index;
  report.strictly_convex = classify_polygon(turning, curvature_tol) == Convexity::StrictlyConvex;
  const SymmetryResult sym = symmetry_of_sample(field, sample, symmetry_tol);
  report.symmetric = sym.symmetric;
  report.symmetry_residual = sym.residual;
  return report;
}

Vector tangent_normal(const DistanceField& field, const Point& a, const Point& p) {
  const Vector g = grad2_distance(field, a, p);
  const double norm = g.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorKind::DegenerateSphere, field.name + ": vanishing sphere gradient");
  }
  return g / norm;
}

SymmetryResult symmetry_check(const DistanceField& field, const Point& a, double r, int resolution,
                              double tol, const RadialOptions& opts) {
  return symmetry_of_sample(field, sphere_sample(field, a, r, resolution, opts), tol);
}

void write_csv(std::ostream& out, const SphereSample& sample, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  const Eigen::Index dim = sample.center.size();
  if (dim == 2) out << "theta"; else out << "theta,phi";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x" << i;
  out << ",radial_t,residual\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < sample.size(); ++k) {
    for (Eigen::Index i = 0; i < sample.angles[k].size(); ++i) {
      out << (i ? "," : "") << sample.angles[k][i];
    }
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << sample.points[k][i];
    out << ',' << sample.radial_t[k] << ',' << sample.residual[k] << '\n';
  }
}

}  // namespace distlab
