#pragma once

#include "distlab/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace distlab {

/// Evaluator bundle for a distance function rho on R^n.
///
/// `grad2` and `hess2` are derivatives of p -> rho(a, p). Either may be empty;
/// the free functions below fall back to central differences in that case.
/// Every callable must be pure: fields are shared across threads.
struct DistanceField {
  using Eval = std::function<double(const Point&, const Point&)>;
  using Grad = std::function<Vector(const Point&, const Point&)>;
  using Hess = std::function<Matrix(const Point&, const Point&)>;

  int dim = 0;
  std::string name;
  Eval eval;
  Grad grad2;
  Hess hess2;

  bool has_analytic_derivatives() const { return bool(grad2) && bool(hess2); }
};

/// Step controls for the finite-difference fallbacks. Steps are relative and
/// scaled by max(|b - a|, 1).
struct FiniteDifference {
  double grad_rel = 1e-5;
  double hess_rel = 1e-4;
};

double eval_distance(const DistanceField& field, const Point& a, const Point& b);

/// Gradient of p -> rho(a, p) at p = b. Throws NondifferentiablePoint on the
/// diagonal.
Vector grad2_distance(const DistanceField& field, const Point& a, const Point& b,
                      const FiniteDifference& fd = {});

Matrix hess2_distance(const DistanceField& field, const Point& a, const Point& b,
                      const FiniteDifference& fd = {});

/// Central-difference gradient of rho(a, .) at b, ignoring any analytic
/// gradient the field carries.
Vector fd_grad2(const DistanceField& field, const Point& a, const Point& b,
                double rel_step = 1e-5);

/// Central-difference Hessian of rho(a, .) at b from function values only.
Matrix fd_hess2(const DistanceField& field, const Point& a, const Point& b,
                double rel_step = 1e-4);

void check_point(const DistanceField& field, const Point& p, const char* what);

}  // namespace distlab
