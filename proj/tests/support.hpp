#pragma once

#include "distlab/spaces.hpp"

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace testing {

inline distlab::Point pt(double x, double y) {
  distlab::Point p(2);
  p << x, y;
  return p;
}

inline distlab::Point pt(double x, double y, double z) {
  distlab::Point p(3);
  p << x, y, z;
  return p;
}

inline distlab::DistanceField ratio_space(int n = 2) {
  return distlab::metric_transform(distlab::euclidean(n), distlab::ratio_transform());
}

/// The four built-in families in dimension n, with the parameters the
/// criteria use.
inline std::vector<std::pair<std::string, distlab::DistanceField>> all_spaces(int n = 2) {
  return {{"euclidean", distlab::euclidean(n)},
          {"minkowski_pnorm", distlab::minkowski_pnorm(n, 4.0)},
          {"metric_transform", ratio_space(n)},
          {"hyperbolic_chart", distlab::hyperbolic_chart(n)}};
}

inline distlab::Point uniform_point(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  distlab::Point p(n);
  for (int i = 0; i < n; ++i) p[i] = u(rng);
  return p;
}

// Independent central difference with a fixed absolute step.
template <class F>
distlab::Vector central_gradient(F f, const distlab::Point& x, double h) {
  distlab::Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    distlab::Point xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

}  // namespace testing
