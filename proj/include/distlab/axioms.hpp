#pragma once

#include "distlab/distance_field.hpp"

#include <cstdint>
#include <string>

namespace distlab {

/// Axis-aligned sampling box with a seeded sample count.
struct BoxSampler {
  Vector lo;
  Vector hi;
  int count = 1000;
  std::uint64_t seed = 1;
};

struct AxiomReport {
  std::string space;
  int n_samples = 0;
  double worst_identity = 0.0;
  double worst_symmetry = 0.0;
  /// Most negative rho(a,c) + rho(c,b) - rho(a,b) seen over sampled triples.
  double worst_triangle = 0.0;
  bool pass_identity = false;
  bool pass_symmetry = false;
  bool pass_triangle = false;

  bool pass() const { return pass_identity && pass_symmetry && pass_triangle; }
};

/// Monte-Carlo falsification of identity, symmetry and the triangle
/// inequality. Deterministic for a given seed.
AxiomReport axiom_check(const DistanceField& field, const BoxSampler& sampler, double tol);

}  // namespace distlab
