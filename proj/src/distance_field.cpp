#include "distlab/distance_field.hpp"

#include <cmath>
#include <sstream>

namespace distlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::InvalidField: return "invalid_field";
    case ErrorKind::NondifferentiablePoint: return "nondifferentiable_point";
    case ErrorKind::BracketNotFound: return "bracket_not_found";
    case ErrorKind::NonMonotoneRadial: return "non_monotone_radial";
    case ErrorKind::DegenerateSphere: return "degenerate_sphere";
    case ErrorKind::DegeneratePolygon: return "degenerate_polygon";
    case ErrorKind::NoConvergence: return "no_convergence";
    case ErrorKind::DegenerateOsculation: return "degenerate_osculation";
    case ErrorKind::NonUniqueOsculation: return "non_unique_osculation";
    case ErrorKind::ExtrapolationDivergence: return "extrapolation_divergence";
  }
  return "unknown";
}

void check_point(const DistanceField& field, const Point& p, const char* what) {
  if (p.size() != field.dim) {
    std::ostringstream msg;
    msg << field.name << ": point " << what << " has dimension " << p.size()
        << ", expected " << field.dim;
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  if (!p.allFinite()) {
    throw Error(ErrorKind::InvalidArgument,
                std::string("point ") + what + " has non-finite coordinates");
  }
}

double eval_distance(const DistanceField& field, const Point& a, const Point& b) {
  check_point(field, a, "a");
  check_point(field, b, "b");
  if (a == b) return 0.0;
  const double d = field.eval(a, b);
  if (!std::isfinite(d) || d < 0.0) {
    std::ostringstream msg;
    msg << field.name << ": distance evaluated to " << d;
    throw Error(ErrorKind::InvalidField, msg.str());
  }
  return d;
}

namespace {

void require_off_diagonal(const DistanceField& field, const Point& a, const Point& b) {
  check_point(field, a, "a");
  check_point(field, b, "b");
  if (a == b) {
    throw Error(ErrorKind::NondifferentiablePoint,
                field.name + ": distance is not differentiable on the diagonal a = b");
  }
}

double step_scale(const Point& a, const Point& b) {
  return std::max((b - a).norm(), 1.0);
}

}  // namespace

Vector fd_grad2(const DistanceField& field, const Point& a, const Point& b, double rel_step) {
  const double h = rel_step * step_scale(a, b);
  Vector g(field.dim);
  Point p = b;
  for (int i = 0; i < field.dim; ++i) {
    p[i] = b[i] + h;
    const double fp = field.eval(a, p);
    p[i] = b[i] - h;
    const double fm = field.eval(a, p);
    p[i] = b[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix fd_hess2(const DistanceField& field, const Point& a, const Point& b, double rel_step) {
  const double h = rel_step * step_scale(a, b);
  const int n = field.dim;
  Matrix H(n, n);
  const double f0 = field.eval(a, b);
  Point p = b;
  for (int i = 0; i < n; ++i) {
    p[i] = b[i] + h;
    const double fp = field.eval(a, p);
    p[i] = b[i] - h;
    const double fm = field.eval(a, p);
    p[i] = b[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      auto at = [&](double si, double sj) {
        Point q = b;
        q[i] += si * h;
        q[j] += sj * h;
        return field.eval(a, q);
      };
      const double hij = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
      H(i, j) = hij;
      H(j, i) = hij;
    }
  }
  return H;
}

Vector grad2_distance(const DistanceField& field, const Point& a, const Point& b,
                      const FiniteDifference& fd) {
  require_off_diagonal(field, a, b);
  Vector g = field.grad2 ? field.grad2(a, b) : fd_grad2(field, a, b, fd.grad_rel);
  if (!g.allFinite()) {
    throw Error(ErrorKind::InvalidField, field.name + ": non-finite gradient");
  }
  return g;
}

Matrix hess2_distance(const DistanceField& field, const Point& a, const Point& b,
                      const FiniteDifference& fd) {
  require_off_diagonal(field, a, b);
  Matrix H = field.hess2 ? field.hess2(a, b) : fd_hess2(field, a, b, fd.hess_rel);
  if (!H.allFinite()) {
    throw Error(ErrorKind::InvalidField, field.name + ": non-finite Hessian");
  }
  return H;
}

}  // namespace distlab
