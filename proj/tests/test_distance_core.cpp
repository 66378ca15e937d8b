#include "support.hpp"

#include "distlab/axioms.hpp"
#include "distlab/distance_field.hpp"
#include "distlab/spaces.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace distlab;
using testing::pt;

TEST_CASE("eval_distance basic values") {
  CHECK(eval_distance(euclidean(2), pt(0, 0), pt(3, 4)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(eval_distance(euclidean(2), pt(0, 0), pt(1, 1)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(eval_distance(testing::ratio_space(), pt(0, 0), pt(1, 0)) == doctest::Approx(0.5));
  CHECK(eval_distance(minkowski_pnorm(2, 4), pt(0, 0), pt(1, 1)) ==
        doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-14));
  for (double x : {0.1, 0.5, 1.0, 3.0}) {
    CHECK(eval_distance(hyperbolic_chart(2), pt(0, 0), pt(x, 0)) ==
          doctest::Approx(std::asinh(x)).epsilon(1e-13));
  }
}

TEST_CASE("eval_distance is exactly zero on the diagonal") {
  for (const auto& [name, field] : testing::all_spaces()) {
    CAPTURE(name);
    CHECK(eval_distance(field, pt(1, 2), pt(1, 2)) == 0.0);
  }
}

TEST_CASE("eval_distance rejects mismatched dimensions") {
  try {
    eval_distance(euclidean(2), pt(0, 0), pt(0, 0, 0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("eval_distance flags an invalid field") {
  DistanceField bad = euclidean(2);
  bad.eval = [](const Point&, const Point&) { return std::nan(""); };
  CHECK_THROWS_AS(eval_distance(bad, pt(0, 0), pt(1, 0)), Error);
}

TEST_CASE("grad2_distance values") {
  CHECK(grad2_distance(euclidean(2), pt(0, 0), pt(2, 0)).isApprox(pt(1, 0)));
  CHECK(grad2_distance(euclidean(2), pt(0, 0), pt(0, -3)).isApprox(pt(0, -1)));
  const Vector g = grad2_distance(testing::ratio_space(), pt(0, 0), pt(1, 0));
  CHECK(g[0] == doctest::Approx(0.25));
  CHECK(std::abs(g[1]) < 1e-15);
  // Oracle: independent central difference of f(|p|).
  const auto f = [](const Point& p) { return p.norm() / (1 + p.norm()); };
  const Vector oracle = testing::central_gradient(f, pt(1, 0), 1e-6);
  CHECK((g - oracle).norm() < 1e-8);
}

TEST_CASE("grad2 and hess2 fail on the diagonal") {
  for (const auto& [name, field] : testing::all_spaces()) {
    CAPTURE(name);
    try {
      grad2_distance(field, pt(0.3, 0.3), pt(0.3, 0.3));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NondifferentiablePoint);
    }
    CHECK_THROWS_AS(hess2_distance(field, pt(0.3, 0.3), pt(0.3, 0.3)), Error);
  }
}

TEST_CASE("finite-difference fallback is used when no gradient is supplied") {
  DistanceField plain = euclidean(2);
  plain.grad2 = nullptr;
  plain.hess2 = nullptr;
  CHECK_FALSE(plain.has_analytic_derivatives());
  const Vector g = grad2_distance(plain, pt(0, 0), pt(3, 4));
  CHECK((g - pt(0.6, 0.8)).norm() < 1e-9);
  const Matrix h = hess2_distance(plain, pt(0, 0), pt(3, 4));
  // Hessian of |p| is (I - u u^T) / |p|.
  Matrix exact = Matrix::Identity(2, 2) - pt(0.6, 0.8) * pt(0.6, 0.8).transpose();
  exact /= 5.0;
  CHECK((h - exact).norm() < 1e-6);
}

TEST_CASE("builtin spaces are reversible on seeded pairs") {
  for (const auto& [name, field] : testing::all_spaces()) {
    CAPTURE(name);
    std::mt19937_64 rng(42);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Point a = testing::uniform_point(rng, 2, -2, 2);
      const Point b = testing::uniform_point(rng, 2, -2, 2);
      worst = std::max(worst, std::abs(eval_distance(field, a, b) - eval_distance(field, b, a)));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("analytic gradients match central differences") {
  for (const auto& [name, field] : testing::all_spaces()) {
    CAPTURE(name);
    std::mt19937_64 rng(7);
    int checked = 0;
    double worst = 0.0;
    while (checked < 100) {
      const Point a = testing::uniform_point(rng, 2, -2, 2);
      const Point b = testing::uniform_point(rng, 2, -2, 2);
      if ((b - a).norm() < 0.1) continue;
      ++checked;
      const auto f = [&](const Point& p) { return field.eval(a, p); };
      const Vector oracle = testing::central_gradient(f, b, 1e-6);
      worst = std::max(worst, (grad2_distance(field, a, b) - oracle).norm());
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("hessians are symmetric and match differences of the gradient") {
  for (const auto& [name, field] : testing::all_spaces()) {
    CAPTURE(name);
    std::mt19937_64 rng(9);
    int checked = 0;
    double asym = 0.0;
    double gap = 0.0;
    while (checked < 50) {
      const Point a = testing::uniform_point(rng, 2, -2, 2);
      const Point b = testing::uniform_point(rng, 2, -2, 2);
      if ((b - a).norm() < 0.2) continue;
      ++checked;
      const Matrix h = hess2_distance(field, a, b);
      asym = std::max(asym, (h - h.transpose()).cwiseAbs().maxCoeff());
      Matrix oracle(2, 2);
      for (int i = 0; i < 2; ++i) {
        Point bp = b, bm = b;
        bp[i] += 1e-6;
        bm[i] -= 1e-6;
        oracle.col(i) = (grad2_distance(field, a, bp) - grad2_distance(field, a, bm)) / 2e-6;
      }
      gap = std::max(gap, (h - oracle).cwiseAbs().maxCoeff() / std::max(1.0, h.norm()));
    }
    CHECK(asym <= 1e-9);
    CHECK(gap <= 1e-5);
  }
}

TEST_CASE("metric_transform composes exactly") {
  const DistanceField base = minkowski_pnorm(2, 3);
  for (const auto& name : transform_names()) {
    CAPTURE(name);
    const Transform t = transform_by_name(name);
    const DistanceField field = metric_transform(base, t);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
      const Point a = testing::uniform_point(rng, 2, -2, 2);
      const Point b = testing::uniform_point(rng, 2, -2, 2);
      CHECK(eval_distance(field, a, b) == t.f(eval_distance(base, a, b)));
    }
  }
}

TEST_CASE("builtin_space preconditions") {
  CHECK_THROWS_WITH_AS(minkowski_pnorm(2, 1.0), doctest::Contains("spheres not strictly convex"),
                       Error);
  CHECK_THROWS_AS(minkowski_pnorm(2, 0.5), Error);
  CHECK_THROWS_AS(euclidean(1), Error);
  Transform convex{"square", [](double s) { return s * s; }, [](double s) { return 2 * s; },
                   [](double) { return 2.0; }, nullptr};
  CHECK_THROWS_AS(metric_transform(euclidean(2), convex), Error);
  Transform decreasing{"neg", [](double s) { return -s; }, [](double) { return -1.0; },
                       [](double) { return 0.0; }, nullptr};
  CHECK_THROWS_AS(metric_transform(euclidean(2), decreasing), Error);
  CHECK_THROWS_AS(transform_by_name("cube"), Error);
}

TEST_CASE("builtin_space from descriptors") {
  SpaceSpec spec;
  spec.kind = SpaceSpec::Kind::MetricTransform;
  spec.dim = 2;
  spec.transform = "ratio";
  spec.base = std::make_shared<SpaceSpec>();
  const DistanceField f = builtin_space(spec);
  CHECK(f.dim == 2);
  CHECK(eval_distance(f, pt(0, 0), pt(1, 0)) == doctest::Approx(0.5));
  CHECK(describe(spec) == "metric_transform(euclidean(2),ratio)");
}

TEST_CASE("axiom_check passes on the builtin spaces") {
  for (const auto& [name, field] : testing::all_spaces()) {
    CAPTURE(name);
    const BoxSampler box{Vector::Constant(2, -2.0), Vector::Constant(2, 2.0), 1000, 5};
    const AxiomReport r = axiom_check(field, box, 1e-12);
    CHECK(r.n_samples == 1000);
    CHECK(r.worst_triangle >= -1e-12);
    CHECK(r.pass());
  }
}

TEST_CASE("axiom_check catches the squared distance") {
  DistanceField squared = euclidean(2);
  squared.name = "squared";
  squared.eval = [](const Point& a, const Point& b) { return (a - b).squaredNorm(); };
  const BoxSampler box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0), 1000, 5};
  const AxiomReport r = axiom_check(squared, box, 1e-12);
  CHECK(r.pass_identity);
  CHECK(r.pass_symmetry);
  CHECK_FALSE(r.pass_triangle);
  // Collinear equally spaced triple: 1 + 1 < 4.
  CHECK(r.worst_triangle < 0.0);
}

TEST_CASE("axiom_check is deterministic for a seed") {
  const DistanceField f = hyperbolic_chart(2);
  const BoxSampler box{Vector::Constant(2, -2.0), Vector::Constant(2, 2.0), 500, 17};
  const AxiomReport r1 = axiom_check(f, box, 1e-12);
  const AxiomReport r2 = axiom_check(f, box, 1e-12);
  CHECK(r1.worst_triangle == r2.worst_triangle);
  CHECK(r1.worst_symmetry == r2.worst_symmetry);
}
