#include "distlab/osculation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace distlab {

const char* to_string(Branch b) {
  return b == Branch::OuterMin ? "outer_min" : "inner_max";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Probe {
  Point p;
  Vector ga;  // grad rho(a, .) at p
  Vector gb;  // grad rho(b, .) at p
  Vector normal;
  double objective = 0.0;  // sign * rho(b, p)
  double sin_angle = 1.0;
};

struct Reduced {
  double min_eigen = 0.0;
  double scale = 1.0;
  Vector direction;  // ambient eigenvector for min_eigen
  Matrix lagrangian;
  double mu = 0.0;
};

// min sign * rho(b, p) subject to rho(a, p) = R
class LevelSetProblem {
 public:
  LevelSetProblem(const DistanceField& field, const Point& a, const Point& b, double radius,
                  double sign, const OsculationOptions& opts)
      : field_(field), a_(a), b_(b), radius_(radius), sign_(sign), opts_(opts) {}

  Point project(const Point& q) const {
    const Vector d = q - a_;
    const double len = d.norm();
    if (!(len > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "projection through the sphere centre");
    }
    const Vector u = d / len;
    return a_ + radial_solve(field_, a_, u, radius_, opts_.radial) * u;
  }

  Probe probe(const Point& p) const {
    Probe pr;
    pr.p = p;
    pr.ga = grad2_distance(field_, a_, p);
    pr.gb = grad2_distance(field_, b_, p);
    pr.normal = pr.ga / pr.ga.norm();
    pr.objective = sign_ * eval_distance(field_, b_, p);
    const Vector g = sign_ * pr.gb;
    const Vector gt = g - g.dot(pr.normal) * pr.normal;
    pr.sin_angle = gt.norm() / g.norm();
    return pr;
  }

  Reduced reduce(const Probe& pr) const {
    Reduced red;
    const int n = field_.dim;
    red.mu = sign_ * pr.gb.dot(pr.ga) / pr.ga.squaredNorm();
    red.lagrangian = sign_ * hess2_distance(field_, b_, pr.p) - red.mu * hess2_distance(field_, a_, pr.p);
    Eigen::HouseholderQR<Matrix> qr(Matrix(pr.normal));
    const Matrix q = qr.householderQ();
    const Matrix basis = q.rightCols(n - 1);
    const Matrix projected = basis.transpose() * red.lagrangian * basis;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (projected + projected.transpose()));
    red.min_eigen = eig.eigenvalues()[0];
    red.scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    red.direction = basis * eig.eigenvectors().col(0);
    return red;
  }

  // One Lagrange-Newton step on the KKT system; nullopt if singular.
  std::optional<Vector> newton_direction(const Probe& pr, const Reduced& red) const {
    const int n = field_.dim;
    Matrix kkt = Matrix::Zero(n + 1, n + 1);
    kkt.topLeftCorner(n, n) = red.lagrangian;
    kkt.block(0, n, n, 1) = -pr.ga;
    kkt.block(n, 0, 1, n) = pr.ga.transpose();
    Vector rhs(n + 1);
    rhs.head(n) = -(sign_ * pr.gb - red.mu * pr.ga);
    rhs[n] = -(eval_distance(field_, a_, pr.p) - radius_);
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (!lu.isInvertible()) return std::nullopt;
    const Vector step = lu.solve(rhs);
    if (!step.allFinite()) return std::nullopt;
    return Vector(step.head(n));
  }

  double radius() const { return radius_; }
  double sign() const { return sign_; }

 private:
  const DistanceField& field_;
  const Point& a_;
  const Point& b_;
  double radius_;
  double sign_;
  const OsculationOptions& opts_;
};

OsculationSolution generator_sample(const Point& p, double r, double r_partner) {
  OsculationSolution s;
  s.point = p;
  s.r = r;
  s.r_partner = r_partner;
  s.lambda = kNaN;
  s.tangency_residual = 0.0;
  s.tangency_angle = 0.0;
  s.min_eigen_constrained = kNaN;
  s.branch = Branch::OuterMin;
  s.converged = true;
  s.generator = true;
  return s;
}

}  // namespace

OsculationSolution solve_osculation(const DistanceField& field, const Point& a, const Point& b,
                                    double r, Branch branch, const std::optional<Point>& init,
                                    const OsculationOptions& opts) {
  check_point(field, a, "a");
  check_point(field, b, "b");
  if (a == b) throw Error(ErrorKind::InvalidArgument, "osculation: generators must differ");
  if (!std::isfinite(r) || r == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "osculation: r must be finite and nonzero");
  }
  if ((branch == Branch::OuterMin) != (r > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "osculation: outer_min needs r > 0 and inner_max needs r < 0");
  }
  const double delta = eval_distance(field, a, b);
  const double radius = std::abs(r);
  if (branch == Branch::OuterMin && radius == delta) return generator_sample(b, delta, 0.0);

  const double sign = branch == Branch::OuterMin ? 1.0 : -1.0;
  LevelSetProblem problem(field, a, b, radius, sign, opts);

  Vector u;
  if (init && (*init - a).norm() > 0.0) {
    u = *init - a;
  } else {
    u = sign * (b - a);
  }
  Point p = problem.project(a + u / u.norm());

  OsculationSolution out;
  out.branch = branch;
  out.r = sign * radius;

  double alpha = radius;
  int perturbations = 0;
  bool converged = false;
  Probe pr = problem.probe(p);
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (pr.sin_angle <= opts.first_order_tol) {
      const Reduced red = problem.reduce(pr);
      if (red.min_eigen < -opts.saddle_tol * red.scale) {
        // Stationary but of the wrong kind; leave along the descent eigenvector.
        if (++perturbations > 4) break;
        pr = problem.probe(problem.project(pr.p + 0.25 * radius * red.direction));
        continue;
      }
      converged = true;
      break;
    }

    if (pr.sin_angle <= 0.1) {
      const Reduced red = problem.reduce(pr);
      if (red.min_eigen > 0.0) {
        bool improved = false;
        for (int k = 0; k < opts.newton_steps && pr.sin_angle > opts.first_order_tol; ++k) {
          const Reduced local = k == 0 ? red : problem.reduce(pr);
          auto step = problem.newton_direction(pr, local);
          if (!step) break;
          Vector dp = *step;
          const double cap = 0.25 * radius;
          if (dp.norm() > cap) dp *= cap / dp.norm();
          const Probe trial = problem.probe(problem.project(pr.p + dp));
          if (!(trial.sin_angle < pr.sin_angle)) break;
          pr = trial;
          improved = true;
        }
        if (improved) continue;
      }
    }

    // Projected gradient with Armijo backtracking along the sphere.
    const Vector g = sign * pr.gb;
    const Vector gt = g - g.dot(pr.normal) * pr.normal;
    const Vector dir = -gt / g.norm();
    const double decrease = pr.sin_angle * pr.sin_angle * g.norm();
    bool accepted = false;
    double trial_alpha = alpha;
    for (int k = 0; k < 60; ++k) {
      const Point q = problem.project(pr.p + trial_alpha * dir);
      const double obj = sign * eval_distance(field, b, q);
      if (obj <= pr.objective - 1e-4 * trial_alpha * decrease) {
        pr = problem.probe(q);
        alpha = std::min(2.0 * trial_alpha, 8.0 * radius);
        accepted = true;
        break;
      }
      trial_alpha *= 0.5;
    }
    if (!accepted) break;
  }

  const Point& x = pr.p;
  out.point = x;
  out.iterations = it;
  out.converged = converged;
  out.r_partner = eval_distance(field, b, x);
  out.lambda = pr.ga.dot(pr.gb) / pr.gb.squaredNorm();
  out.tangency_residual = (pr.ga - out.lambda * pr.gb).norm();
  out.tangency_angle = angle_between_lines(pr.ga, pr.gb);
  out.min_eigen_constrained = problem.reduce(pr).min_eigen;
  return out;
}

UniquenessResult multistart_uniqueness(const DistanceField& field, const Point& a, const Point& b,
                                       double r, int starts, std::uint64_t seed,
                                       const OsculationOptions& opts) {
  if (starts < 8) throw Error(ErrorKind::InvalidArgument, "multistart: need at least 8 starts");
  const Branch branch = r > 0.0 ? Branch::OuterMin : Branch::InnerMax;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  std::vector<Point> inits;
  for (int k = 0; k < starts; ++k) {
    Vector u(field.dim);
    if (field.dim == 2) {
      const double theta = 2.0 * std::numbers::pi * (k + unit(rng)) / starts;
      u << std::cos(theta), std::sin(theta);
    } else {
      for (int i = 0; i < field.dim; ++i) u[i] = normal(rng);
    }
    inits.push_back(a + u / u.norm());
  }

  std::vector<std::future<std::optional<Point>>> jobs;
  for (const Point& init : inits) {
    jobs.push_back(std::async(std::launch::async, [&, init]() -> std::optional<Point> {
      try {
        const OsculationSolution s = solve_osculation(field, a, b, r, branch, init, opts);
        if (s.converged && (s.generator || s.min_eigen_constrained > 0.0)) return s.point;
      } catch (const Error&) {
      }
      return std::nullopt;
    }));
  }
  std::vector<Point> found;
  for (auto& job : jobs) {
    if (auto p = job.get()) found.push_back(*p);
  }
  std::sort(found.begin(), found.end(), [](const Point& x, const Point& y) {
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  });

  UniquenessResult result;
  result.converged = static_cast<int>(found.size());
  for (const Point& p : found) {
    const bool known = std::any_of(result.representatives.begin(), result.representatives.end(),
                                   [&](const Point& q) { return (p - q).norm() <= 1e-6; });
    if (!known) result.representatives.push_back(p);
  }
  result.clusters = static_cast<int>(result.representatives.size());
  return result;
}

OsculationSolution osculation_point(const DistanceField& field, const Point& a, const Point& b,
                                    double r, Branch branch, const std::optional<Point>& init,
                                    const OsculationOptions& opts) {
  OsculationSolution s = solve_osculation(field, a, b, r, branch, init, opts);
  std::ostringstream where;
  where << " (" << field.name << ", r = " << r << ", " << to_string(branch) << ")";
  if (!s.converged) {
    throw Error(ErrorKind::NoConvergence,
                "osculation solver did not converge in " + std::to_string(s.iterations) +
                    " iterations" + where.str());
  }
  if (!s.generator && !(s.min_eigen_constrained > 0.0)) {
    std::ostringstream msg;
    msg << "degenerate osculation: projected Hessian eigenvalue " << s.min_eigen_constrained
        << where.str();
    throw Error(ErrorKind::DegenerateOsculation, msg.str());
  }
  if (opts.uniqueness_starts > 0) {
    const UniquenessResult u =
        multistart_uniqueness(field, a, b, r, opts.uniqueness_starts, opts.seed, opts);
    if (u.clusters > 1) {
      throw Error(ErrorKind::NonUniqueOsculation,
                  std::to_string(u.clusters) + " distinct osculation points" + where.str());
    }
  }
  return s;
}

std::vector<OsculationSolution> CurveTrace::segment() const {
  std::vector<OsculationSolution> out;
  for (const auto& s : samples) {
    if (s.r >= 0.0 && s.r <= delta) out.push_back(s);
  }
  return out;
}

CurveTrace trace(const DistanceField& field, const Point& a, const Point& b, double r_min,
                 double r_max, int steps, const OsculationOptions& opts) {
  check_point(field, a, "a");
  check_point(field, b, "b");
  if (a == b) throw Error(ErrorKind::InvalidArgument, "trace: generators must differ");
  if (!(r_min < r_max)) throw Error(ErrorKind::InvalidArgument, "trace: empty r window");
  if (steps < 8) throw Error(ErrorKind::InvalidArgument, "trace: need at least 8 steps");

  CurveTrace out;
  out.generator_a = a;
  out.generator_b = b;
  out.delta = eval_distance(field, a, b);
  const double delta = out.delta;

  const double h = (r_max - r_min) / steps;
  const double snap = 1e-9 * h;
  std::vector<double> grid;
  for (int k = 0; k <= steps; ++k) {
    double r = k == steps ? r_max : r_min + k * h;
    if (std::abs(r) <= snap) r = 0.0;
    if (std::abs(r - delta) <= snap) r = delta;
    grid.push_back(r);
  }
  if (r_min <= 0.0 && r_max >= 0.0) grid.push_back(0.0);
  if (r_min <= delta && r_max >= delta) grid.push_back(delta);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> forward;
  std::vector<double> backward;
  for (double r : grid) (r >= 0.0 ? forward : backward).push_back(r);
  std::reverse(backward.begin(), backward.end());

  auto march = [&](const std::vector<double>& rs, Branch branch) {
    std::optional<Point> warm;
    for (double r : rs) {
      if (r == 0.0) {
        out.samples.push_back(generator_sample(a, 0.0, delta));
        continue;  // no usable warm start at the centre itself
      }
      if (branch == Branch::OuterMin && r == delta) {
        out.samples.push_back(generator_sample(b, delta, 0.0));
        warm = b;
        continue;
      }
      try {
        OsculationSolution s = osculation_point(field, a, b, r, branch, warm, opts);
        warm = s.point;
        out.samples.push_back(std::move(s));
      } catch (const Error& e) {
        out.error = TraceError{r, e.kind(), e.what()};
        return false;
      }
    }
    return true;
  };

  if (march(forward, Branch::OuterMin)) march(backward, Branch::InnerMax);
  std::sort(out.samples.begin(), out.samples.end(),
            [](const OsculationSolution& x, const OsculationSolution& y) { return x.r < y.r; });
  return out;
}

CurveTrace trace_default(const DistanceField& field, const Point& a, const Point& b, int steps,
                         const OsculationOptions& opts) {
  const double delta = eval_distance(field, a, b);
  return trace(field, a, b, -0.5 * delta, 1.5 * delta, steps, opts);
}

double additivity_residual(const DistanceField& field, const CurveTrace& trace, int triple_count,
                           std::uint64_t seed) {
  const std::vector<OsculationSolution> seg = trace.segment();
  const std::size_t m = seg.size();
  if (m < 3) throw Error(ErrorKind::InvalidArgument, "additivity: need 3 samples in [0, delta]");

  auto residual = [&](std::size_t i, std::size_t j, std::size_t k) {
    const Point& g1 = seg[i].point;
    const Point& g = seg[j].point;
    const Point& g2 = seg[k].point;
    return std::abs(eval_distance(field, g1, g) + eval_distance(field, g, g2) -
                    eval_distance(field, g1, g2));
  };

  double worst = 0.0;
  const double all = static_cast<double>(m) * (m - 1) * (m - 2) / 6.0;
  if (all <= triple_count) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) worst = std::max(worst, residual(i, j, k));
    return worst;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  worst = residual(0, m / 2, m - 1);
  for (int t = 0; t < triple_count; ++t) {
    std::size_t idx[3];
    do {
      idx[0] = pick(rng);
      idx[1] = pick(rng);
      idx[2] = pick(rng);
      std::sort(idx, idx + 3);
    } while (idx[0] == idx[1] || idx[1] == idx[2]);
    worst = std::max(worst, residual(idx[0], idx[1], idx[2]));
  }
  return worst;
}

double distance_to_polyline(const Point& p, const std::vector<Point>& points) {
  if (points.empty()) return std::numeric_limits<double>::infinity();
  double best = (p - points.front()).norm();
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const Vector e = points[k + 1] - points[k];
    const double len2 = e.squaredNorm();
    double t = len2 > 0.0 ? (p - points[k]).dot(e) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, (p - (points[k] + t * e)).norm());
  }
  return best;
}

double quasigeodesic_check(const DistanceField& field, const CurveTrace& tr, int pair_count,
                           int steps, std::uint64_t seed, const OsculationOptions& opts) {
  if (pair_count < 1) throw Error(ErrorKind::InvalidArgument, "quasigeodesic: pair_count >= 1");
  if (!tr.ok()) throw Error(ErrorKind::InvalidArgument, "quasigeodesic: trace carries an error");
  std::vector<std::size_t> interior;
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const double r = tr.samples[k].r;
    if (r > 0.0 && r < tr.delta) interior.push_back(k);
  }
  if (interior.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "quasigeodesic: need two interior trace points");
  }

  std::vector<Point> original;
  for (const auto& s : tr.samples) original.push_back(s.point);
  const Point& first = original.front();
  const Point& last = original.back();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
  double worst = 0.0;
  for (int k = 0; k < pair_count; ++k) {
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    if (i > j) std::swap(i, j);
    const Point& abar = tr.samples[interior[i]].point;
    const Point& bbar = tr.samples[interior[j]].point;

    // Window so the regenerated curve spans the same stretch as the original.
    const double lo = tr.samples.front().r < tr.samples[interior[i]].r
                          ? -eval_distance(field, abar, first)
                          : eval_distance(field, abar, first);
    const double hi = eval_distance(field, abar, last);
    const CurveTrace regen = trace(field, abar, bbar, lo, hi, steps, opts);
    if (!regen.ok()) {
      throw Error(regen.error->kind, "quasigeodesic regeneration failed: " + regen.error->message);
    }
    std::vector<Point> regenerated;
    for (const auto& s : regen.samples) regenerated.push_back(s.point);
    for (const Point& p : regenerated) worst = std::max(worst, distance_to_polyline(p, original));
    for (const Point& p : original) worst = std::max(worst, distance_to_polyline(p, regenerated));
  }
  return worst;
}

double common_tangent_check(const DistanceField& field, const CurveTrace& tr, int p0_index) {
  if (p0_index < 0 || static_cast<std::size_t>(p0_index) >= tr.samples.size()) {
    throw Error(ErrorKind::InvalidArgument, "common_tangent: p0_index out of range");
  }
  const Point& p0 = tr.samples[p0_index].point;
  std::vector<Vector> normals;
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const Point& p = tr.samples[k].point;
    if (p == p0) continue;
    normals.push_back(tangent_normal(field, p, p0));
  }
  if (normals.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "common_tangent: need 3 trace points besides p0");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < normals.size(); ++i)
    for (std::size_t j = i + 1; j < normals.size(); ++j)
      worst = std::max(worst, angle_between_lines(normals[i], normals[j]));
  return worst;
}

TraceDiagnostics diagnose(const DistanceField& field, const CurveTrace& tr) {
  TraceDiagnostics d;
  const Vector axis = (tr.generator_b - tr.generator_a).normalized();
  for (const auto& s : tr.samples) {
    const Vector rel = s.point - tr.generator_a;
    d.max_off_line = std::max(d.max_off_line, (rel - rel.dot(axis) * axis).norm());
    if (s.generator) continue;
    ++d.solved;
    const Vector ga = grad2_distance(field, tr.generator_a, s.point);
    const Vector gb = grad2_distance(field, tr.generator_b, s.point);
    d.max_tangency_angle = std::max(d.max_tangency_angle, angle_between_lines(ga, gb));
    d.max_lambda_ratio_error = std::max(
        d.max_lambda_ratio_error, std::abs(std::abs(s.lambda) * gb.norm() / ga.norm() - 1.0));
    const bool between = s.r > 0.0 && s.r < tr.delta;
    if (between ? !(s.lambda < 0.0) : !(s.lambda > 0.0)) d.lambda_sign_ok = false;
    d.min_projected_eigen = std::min(d.min_projected_eigen, s.min_eigen_constrained);
  }
  return d;
}

void write_csv(std::ostream& out, const CurveTrace& tr, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  const Eigen::Index dim = tr.generator_a.size();
  out << "r";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x" << i;
  out << ",r_partner,lambda,tangency_residual,min_eigen_constrained,branch,converged\n";
  out << std::setprecision(17);
  for (const auto& s : tr.samples) {
    out << s.r;
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << s.point[i];
    out << ',' << s.r_partner << ',' << s.lambda << ',' << s.tangency_residual << ','
        << s.min_eigen_constrained << ',' << to_string(s.branch) << ','
        << (s.converged ? "true" : "false") << '\n';
  }
}

}  // namespace distlab
