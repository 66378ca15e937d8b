#include "distlab/spaces.hpp"

#include <cmath>
#include <sstream>

namespace distlab {

Transform ratio_transform() {
  return {"ratio",
          [](double s) { return s / (1.0 + s); },
          [](double s) { return 1.0 / ((1.0 + s) * (1.0 + s)); },
          [](double s) { return -2.0 / ((1.0 + s) * (1.0 + s) * (1.0 + s)); },
          [](double r) { return r / (1.0 - r); }};
}

Transform log1p_transform() {
  return {"log1p",
          [](double s) { return std::log1p(s); },
          [](double s) { return 1.0 / (1.0 + s); },
          [](double s) { return -1.0 / ((1.0 + s) * (1.0 + s)); },
          [](double r) { return std::expm1(r); }};
}

Transform tanh_transform() {
  return {"tanh",
          [](double s) { return std::tanh(s); },
          [](double s) {
            const double c = std::cosh(s);
            return 1.0 / (c * c);
          },
          [](double s) {
            const double c = std::cosh(s);
            return -2.0 * std::tanh(s) / (c * c);
          },
          [](double r) { return std::atanh(r); }};
}

std::vector<std::string> transform_names() { return {"ratio", "log1p", "tanh"}; }

Transform transform_by_name(const std::string& name) {
  if (name == "ratio") return ratio_transform();
  if (name == "log1p") return log1p_transform();
  if (name == "tanh") return tanh_transform();
  throw Error(ErrorKind::InvalidArgument, "unknown transform '" + name + "'");
}

DistanceField euclidean(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "euclidean: dimension must be >= 2");
  DistanceField field;
  field.dim = n;
  field.name = "euclidean(" + std::to_string(n) + ")";
  field.eval = [](const Point& a, const Point& b) { return (b - a).norm(); };
  field.grad2 = [](const Point& a, const Point& b) -> Vector {
    const Vector d = b - a;
    return d / d.norm();
  };
  field.hess2 = [](const Point& a, const Point& b) -> Matrix {
    const Vector d = b - a;
    const double r = d.norm();
    const Vector u = d / r;
    return (Matrix::Identity(d.size(), d.size()) - u * u.transpose()) / r;
  };
  return field;
}

namespace {

double pnorm(const Vector& d, double p) {
  const double m = d.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) sum += std::pow(std::abs(d[i]) / m, p);
  return m * std::pow(sum, 1.0 / p);
}

}  // namespace

DistanceField minkowski_pnorm(int n, double p) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "minkowski_pnorm: dimension must be >= 2");
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw Error(ErrorKind::InvalidArgument,
                "minkowski_pnorm: p must lie in (1, inf); spheres not strictly convex otherwise");
  }
  DistanceField field;
  field.dim = n;
  std::ostringstream name;
  name << "minkowski_pnorm(" << n << "," << p << ")";
  field.name = name.str();
  field.eval = [p](const Point& a, const Point& b) { return pnorm(b - a, p); };
  field.grad2 = [p](const Point& a, const Point& b) -> Vector {
    const Vector d = b - a;
    const double r = pnorm(d, p);
    Vector g(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      g[i] = std::copysign(std::pow(std::abs(d[i]) / r, p - 1.0), d[i]);
    }
    return g;
  };
  field.hess2 = [p](const Point& a, const Point& b) -> Matrix {
    const Vector d = b - a;
    const double r = pnorm(d, p);
    const Eigen::Index n = d.size();
    Vector s(n);
    Matrix H = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = std::abs(d[i]) / r;
      s[i] = std::copysign(std::pow(x, p - 1.0), d[i]);
      H(i, i) = (p - 1.0) * std::pow(x, p - 2.0) / r;
    }
    H -= (p - 1.0) / r * s * s.transpose();
    return H;
  };
  return field;
}

DistanceField metric_transform(const DistanceField& base, const Transform& f) {
  if (!f.f || !f.df || !f.d2f) {
    throw Error(ErrorKind::InvalidArgument, "metric_transform: transform is incomplete");
  }
  if (std::abs(f.f(0.0)) > 1e-14) {
    throw Error(ErrorKind::InvalidArgument, "metric_transform: f(0) must be 0");
  }
  // Grid validation of the profile. Only falsifies; cannot certify smoothness.
  constexpr int kGrid = 2000;
  constexpr double kMax = 20.0;
  for (int k = 0; k <= kGrid; ++k) {
    const double s = kMax * k / kGrid;
    if (!(f.df(s) > 0.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  "metric_transform: f is not increasing (f'(" + std::to_string(s) + ") <= 0)");
    }
    if (f.d2f(s) > 1e-12) {
      throw Error(ErrorKind::InvalidArgument,
                  "metric_transform: f is not concave at s = " + std::to_string(s));
    }
  }

  DistanceField field;
  field.dim = base.dim;
  field.name = "metric_transform(" + base.name + "," + f.name + ")";
  field.eval = [base, f](const Point& a, const Point& b) { return f.f(base.eval(a, b)); };
  if (base.has_analytic_derivatives()) {
    field.grad2 = [base, f](const Point& a, const Point& b) -> Vector {
      return f.df(base.eval(a, b)) * base.grad2(a, b);
    };
    field.hess2 = [base, f](const Point& a, const Point& b) -> Matrix {
      const double s = base.eval(a, b);
      const Vector g = base.grad2(a, b);
      return f.d2f(s) * g * g.transpose() + f.df(s) * base.hess2(a, b);
    };
  }
  return field;
}

DistanceField hyperbolic_chart(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "hyperbolic_chart: dimension must be >= 2");

  // Lift to the hyperboloid t = sqrt(1 + |x|^2). With q = |a-b|^2 - (t_a-t_b)^2
  // we have A - 1 = q/2 where A = t_a t_b - <a,b>, which avoids cancellation
  // in arcosh(A) for nearby points.
  struct Lift {
    double ta, tb, q;
  };
  auto lift = [](const Point& a, const Point& b) {
    const double ta = std::sqrt(1.0 + a.squaredNorm());
    const double tb = std::sqrt(1.0 + b.squaredNorm());
    const Vector d = a - b;
    const double dt = d.dot(a + b) / (ta + tb);
    return Lift{ta, tb, std::max(d.squaredNorm() - dt * dt, 0.0)};
  };

  DistanceField field;
  field.dim = n;
  field.name = "hyperbolic_chart(" + std::to_string(n) + ")";
  field.eval = [lift](const Point& a, const Point& b) {
    const Lift l = lift(a, b);
    return 2.0 * std::asinh(0.5 * std::sqrt(l.q));
  };
  // grad_b A = (t_a (b - a) + (t_a - t_b) a) / t_b
  auto grad_a = [](const Point& a, const Point& b, const Lift& l) -> Vector {
    const double dt = (a - b).dot(a + b) / (l.ta + l.tb);
    return (l.ta * (b - a) + dt * a) / l.tb;
  };
  field.grad2 = [lift, grad_a](const Point& a, const Point& b) -> Vector {
    const Lift l = lift(a, b);
    const double am1 = 0.5 * l.q;
    const double s = std::sqrt(am1 * (am1 + 2.0));
    return grad_a(a, b, l) / s;
  };
  field.hess2 = [lift, grad_a](const Point& a, const Point& b) -> Matrix {
    const Lift l = lift(a, b);
    const double am1 = 0.5 * l.q;
    const double A = 1.0 + am1;
    const double s = std::sqrt(am1 * (am1 + 2.0));
    const Vector gA = grad_a(a, b, l);
    const Eigen::Index dim = b.size();
    const Matrix hA = l.ta * (Matrix::Identity(dim, dim) / l.tb -
                              b * b.transpose() / (l.tb * l.tb * l.tb));
    return hA / s - (A / (s * s * s)) * gA * gA.transpose();
  };
  return field;
}

DistanceField builtin_space(const SpaceSpec& spec) {
  switch (spec.kind) {
    case SpaceSpec::Kind::Euclidean: return euclidean(spec.dim);
    case SpaceSpec::Kind::MinkowskiPNorm: return minkowski_pnorm(spec.dim, spec.p);
    case SpaceSpec::Kind::HyperbolicChart: return hyperbolic_chart(spec.dim);
    case SpaceSpec::Kind::MetricTransform: {
      if (!spec.base) {
        throw Error(ErrorKind::InvalidArgument, "metric_transform: missing base space");
      }
      return metric_transform(builtin_space(*spec.base), transform_by_name(spec.transform));
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown space kind");
}

std::string describe(const SpaceSpec& spec) { return builtin_space(spec).name; }

}  // namespace distlab
