#include "distlab/axioms.hpp"

#include <cmath>
#include <random>

namespace distlab {

AxiomReport axiom_check(const DistanceField& field, const BoxSampler& sampler, double tol) {
  if (sampler.lo.size() != field.dim || sampler.hi.size() != field.dim) {
    throw Error(ErrorKind::DimensionMismatch, "axiom_check: box dimension does not match field");
  }
  if (sampler.count < 3) {
    throw Error(ErrorKind::InvalidArgument, "axiom_check: need at least 3 samples");
  }
  if ((sampler.hi.array() <= sampler.lo.array()).any()) {
    throw Error(ErrorKind::InvalidArgument, "axiom_check: empty box");
  }

  std::mt19937_64 rng(sampler.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    Point p(field.dim);
    for (int i = 0; i < field.dim; ++i) {
      p[i] = sampler.lo[i] + (sampler.hi[i] - sampler.lo[i]) * unit(rng);
    }
    return p;
  };

  AxiomReport report;
  report.space = field.name;
  report.n_samples = sampler.count;
  report.worst_triangle = std::numeric_limits<double>::infinity();
  for (int k = 0; k < sampler.count; ++k) {
    const Point a = draw();
    const Point b = draw();
    const Point c = draw();
    // Call the raw evaluator for identity so a field that is not exactly zero
    // on the diagonal is caught; eval_distance would special-case it.
    report.worst_identity = std::max(report.worst_identity, std::abs(field.eval(a, a)));
    const double ab = eval_distance(field, a, b);
    const double ba = eval_distance(field, b, a);
    report.worst_symmetry = std::max(report.worst_symmetry, std::abs(ab - ba));
    const double slack = eval_distance(field, a, c) + eval_distance(field, c, b) - ab;
    report.worst_triangle = std::min(report.worst_triangle, slack);
  }
  report.pass_identity = report.worst_identity <= tol;
  report.pass_symmetry = report.worst_symmetry <= tol;
  report.pass_triangle = report.worst_triangle >= -tol;
  return report;
}

}  // namespace distlab
