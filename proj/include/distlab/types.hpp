#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace distlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point of the base manifold R^n.
using Point = Eigen::VectorXd;

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  InvalidField,
  NondifferentiablePoint,
  BracketNotFound,
  NonMonotoneRadial,
  DegenerateSphere,
  DegeneratePolygon,
  NoConvergence,
  DegenerateOsculation,
  NonUniqueOsculation,
  ExtrapolationDivergence,
};

const char* to_string(ErrorKind kind);

/// Single exception type for every numerical failure in the library. The kind
/// lets callers (and the CLI's error report) distinguish diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Tangent vector y at a base point.
struct TangentVector {
  Point base;
  Vector dir;
};

inline double angle_between_lines(const Vector& u, const Vector& v) {
  // atan2 form keeps accuracy for nearly parallel vectors
  const double nu = u.norm();
  const double nv = v.norm();
  const double dot = std::abs(u.dot(v)) / (nu * nv);
  const Vector perp = v / nv - (v.dot(u) / (nu * nu * nv)) * u;
  return std::atan2(perp.norm(), dot);
}

}  // namespace distlab
