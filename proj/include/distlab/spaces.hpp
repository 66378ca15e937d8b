#pragma once

#include "distlab/distance_field.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace distlab {

/// Scalar profile f for a metric transform rho = f o d. Must be smooth,
/// increasing, concave, with f(0) = 0.
struct Transform {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  /// Inverse of f where available; used by tests and radial inversion checks.
  std::function<double(double)> inverse;
};

/// f(s) = s / (1 + s)
Transform ratio_transform();
/// f(s) = log(1 + s)
Transform log1p_transform();
/// f(s) = tanh(s)
Transform tanh_transform();

/// Looks up one of the named transforms above ("ratio", "log1p", "tanh").
Transform transform_by_name(const std::string& name);
std::vector<std::string> transform_names();

DistanceField euclidean(int n);

/// rho(a, b) = |a - b|_p. Requires 1 < p < infinity.
DistanceField minkowski_pnorm(int n, double p);

/// rho = f(base(a, b)). Validates f on a grid before accepting it.
DistanceField metric_transform(const DistanceField& base, const Transform& f);

/// Hyperboloid-model chart: rho = arcosh(sqrt(1+|a|^2) sqrt(1+|b|^2) - <a,b>).
DistanceField hyperbolic_chart(int n);

/// Tagged descriptor mirroring the scenario file's `space` object.
struct SpaceSpec {
  enum class Kind { Euclidean, MinkowskiPNorm, MetricTransform, HyperbolicChart };

  Kind kind = Kind::Euclidean;
  int dim = 2;
  double p = 2.0;
  std::string transform;              // MetricTransform only
  std::shared_ptr<SpaceSpec> base;    // MetricTransform only
};

DistanceField builtin_space(const SpaceSpec& spec);

std::string describe(const SpaceSpec& spec);

}  // namespace distlab
