#include "support.hpp"

#include "distlab/finsler.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace distlab;
using testing::pt;

namespace {

// Closed-form length of t -> (t, t^2) on [0, 1].
double parabola_length() { return (2 * std::sqrt(5.0) + std::asinh(2.0)) / 4; }

}  // namespace

TEST_CASE("richardson_to_zero is exact for polynomials up to the order") {
  const std::vector<double> nodes = default_ladder();
  std::vector<double> values;
  for (double r : nodes) values.push_back(2 - 3 * r + 0.5 * r * r * r);
  const Extrapolation e = richardson_to_zero(nodes, values, 4);
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("ladder validation") {
  CHECK_THROWS_AS(FinslerEvaluator(euclidean(2), FinslerMethod::Ratio, {0.1, 0.2}), Error);
  CHECK_THROWS_AS(FinslerEvaluator(euclidean(2), FinslerMethod::Ratio, {0.1, 1e-9}), Error);
  CHECK_THROWS_AS(FinslerEvaluator(euclidean(2), FinslerMethod::Ratio, default_ladder(), 0), Error);
}

TEST_CASE("extract_F known values") {
  FinslerEvaluator e(euclidean(2));
  CHECK(extract_F(e, pt(0, 0), pt(3, 4)) == doctest::Approx(5.0).epsilon(1e-12));
  FinslerEvaluator t(testing::ratio_space());
  CHECK(std::abs(extract_F(t, pt(0.5, 0.5), pt(0.6, -0.8)) - 1.0) <= 1e-8);
  CHECK(std::abs(extract_F(t, pt(-1, 2), pt(3, 4)) / 5.0 - 1.0) <= 1e-8);
  FinslerEvaluator h(hyperbolic_chart(2));
  CHECK(extract_F(h, pt(0, 0), pt(1, 0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(extract_F(e, pt(0, 0), pt(0, 0)), Error);
}

TEST_CASE("extract_F on the hyperbolic chart matches the Riemannian metric") {
  // Oracle: the hyperboloid pull-back g = I - x x^T / (1 + |x|^2).
  FinslerEvaluator h(hyperbolic_chart(2));
  const Point x = pt(0.7, -0.4);
  const Vector y = pt(0.3, 1.1);
  const Matrix g = Matrix::Identity(2, 2) - x * x.transpose() / (1 + x.squaredNorm());
  const double oracle = std::sqrt(y.dot(g * y));
  CHECK(std::abs(extract_F(h, x, y) / oracle - 1.0) <= 1e-8);
}

TEST_CASE("extraction error estimate is recorded") {
  FinslerEvaluator h(hyperbolic_chart(2));
  h.extract(pt(0.3, 0.2), pt(1, 1));
  CHECK(h.err_estimate_last() >= 0.0);
  CHECK(h.err_estimate_last() < 1e-8);
}

TEST_CASE("cross validation of the two limits") {
  const Point x = pt(0.4, -0.2);
  const Vector y = pt(1.0, 2.0);
  CHECK(cross_validate_F(FinslerEvaluator(euclidean(2)), x, y) <= 1e-12);
  CHECK(cross_validate_F(FinslerEvaluator(testing::ratio_space()), x, y) <= 1e-8);
  CHECK(cross_validate_F(FinslerEvaluator(hyperbolic_chart(2)), x, y) <= 1e-7);
  CHECK(cross_validate_F(FinslerEvaluator(minkowski_pnorm(2, 4)), x, y) <= 1e-6);
}

TEST_CASE("homogeneity, symmetry and the triangle inequality of F") {
  for (const auto& [name, field] : testing::all_spaces()) {
    CAPTURE(name);
    FinslerEvaluator ev(field);
    std::mt19937_64 rng(23);
    for (int k = 0; k < 20; ++k) {
      const Point x = testing::uniform_point(rng, 2, -1, 1);
      const Vector y1 = testing::uniform_point(rng, 2, -1, 1);
      const Vector y2 = testing::uniform_point(rng, 2, -1, 1);
      const double f = ev.extract(x, y1);
      for (double lam : {0.5, 2.0, 10.0}) {
        CHECK(std::abs(ev.extract(x, lam * y1) - lam * f) <= 1e-13 * lam * f);
      }
      CHECK(std::abs(ev.extract(x, -y1) - f) <= 1e-8);
      CHECK(ev.extract(x, y1 + y2) <= f + ev.extract(x, y2) + 1e-8);
    }
  }
}

TEST_CASE("indicatrix samples") {
  FinslerEvaluator e(euclidean(2));
  const Indicatrix circle = indicatrix_sample(e, pt(0, 0), 64);
  CHECK(circle.convexity == Convexity::StrictlyConvex);
  for (const auto& y : circle.points) CHECK(y.norm() == doctest::Approx(1.0).epsilon(1e-12));
  FinslerEvaluator p4(minkowski_pnorm(2, 4));
  const Indicatrix ball = indicatrix_sample(p4, pt(0.3, 0.3), 128);
  CHECK(ball.convexity == Convexity::StrictlyConvex);
  for (const auto& y : ball.points) {
    CHECK(std::pow(std::pow(std::abs(y[0]), 4) + std::pow(std::abs(y[1]), 4), 0.25) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  FinslerEvaluator t(testing::ratio_space());
  for (const auto& y : indicatrix_sample(t, pt(1, 1), 32).points) {
    CHECK(std::abs(y.norm() - 1.0) <= 1e-8);
  }
  CHECK_THROWS_AS(indicatrix_sample(e, pt(0, 0), 16), Error);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  const auto [x, w] = gauss_legendre(5);
  double sum = 0.0, x8 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sum += w[k];
    x8 += w[k] * std::pow(x[k], 8);
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(x8 == doctest::Approx(2.0 / 9).epsilon(1e-14));
}

TEST_CASE("arc lengths of simple curves") {
  const DistanceField e = euclidean(2);
  FinslerEvaluator fe(e);
  const ParamCurve seg = segment_curve(pt(0, 0), pt(1, 0));
  const ArcLengthReport r = arc_length_D(e, seg, {10, 100, 1000});
  for (const auto& [n, s] : r.chord_sums) CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(arc_length_F(fe, seg) == doctest::Approx(1.0).epsilon(1e-12));

  const ParamCurve parabola = parabola_curve();
  const ArcLengthReport p = arc_length_report(e, fe, parabola, {100, 1000, 10000});
  CHECK(std::abs(p.extrapolated_sD - parabola_length()) <= 1e-8);
  CHECK(std::abs(p.quadrature_value - parabola_length()) <= 1e-8);
  CHECK(theorem3_gap(e, fe, parabola, {100, 1000, 10000}) <= 1e-6);
}

TEST_CASE("hyperbolic radial segment has length asinh(x)") {
  FinslerEvaluator h(hyperbolic_chart(2));
  CHECK(arc_length_F(h, segment_curve(pt(0, 0), pt(1.5, 0))) ==
        doctest::Approx(std::asinh(1.5)).epsilon(1e-8));
}

TEST_CASE("chord sums under a metric transform") {
  const DistanceField f = testing::ratio_space();
  FinslerEvaluator fe(f);
  const ParamCurve seg = segment_curve(pt(0, 0), pt(1, 0));
  const ArcLengthReport r = arc_length_D(f, seg, {10, 100, 1000});
  for (const auto& [n, s] : r.chord_sums) {
    // N f(1/N) = N / (N + 1)
    CHECK(s == doctest::Approx(double(n) / (n + 1)).epsilon(1e-12));
    CHECK(s >= eval_distance(f, pt(0, 0), pt(1, 0)) - 1e-9);
  }
  CHECK(r.extrapolated_sD == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(theorem3_gap(f, fe, circle_arc_curve(pt(0, 0), 0.5, 0, 2), {100, 1000, 10000}) <= 1e-5);
}

TEST_CASE("chord sums do not decrease under refinement") {
  for (const auto& [name, field] : testing::all_spaces()) {
    CAPTURE(name);
    const ArcLengthReport r =
        arc_length_D(field, circle_arc_curve(pt(0.1, 0.1), 0.8, 0.3, 2.5), {50, 100, 200, 400});
    for (std::size_t k = 1; k < r.chord_sums.size(); ++k) {
      CHECK(r.chord_sums[k].second >= r.chord_sums[k - 1].second - 1e-12);
    }
  }
}

TEST_CASE("quadrature converges at the expected order") {
  FinslerEvaluator h(hyperbolic_chart(2));
  const ParamCurve arc = circle_arc_curve(pt(0.2, 0.1), 1.0, 0.0, 2.0);
  const double ref = arc_length_F(h, arc, {64, 5});
  const double e1 = std::abs(arc_length_F(h, arc, {1, 2}) - ref);
  const double e2 = std::abs(arc_length_F(h, arc, {2, 2}) - ref);
  CHECK(e1 >= 4 * e2);
}

TEST_CASE("curve regularity") {
  CHECK_THROWS_AS(segment_curve(pt(1, 1), pt(1, 1)).check_regular(), Error);
  ParamCurve stall;
  stall.position = [](double t) { return pt(t * t * t, t * t * t); };
  stall.t0 = -1;
  stall.t1 = 1;
  CHECK_THROWS_AS(stall.check_regular(), Error);
}

TEST_CASE("theorem4 in both directions") {
  const auto consistency = [](const DistanceField& f, const Point& a, const Point& b) {
    FinslerEvaluator ev(f);
    const CurveTrace tr = trace(f, a, b, 0.0, eval_distance(f, a, b), 64);
    return theorem4_consistency(f, ev, tr);
  };
  const ConsistencyReport e = consistency(euclidean(2), pt(0, 0), pt(1, 0));
  CHECK(e.equal);
  const ConsistencyReport h = consistency(hyperbolic_chart(2), pt(1, 0), pt(0, 1));
  CHECK(h.equal);
  CHECK(h.sD >= h.rho_ab - 1e-9);
  const ConsistencyReport t = consistency(testing::ratio_space(), pt(0, 0), pt(1, 0));
  CHECK_FALSE(t.equal);
  CHECK(t.rho_ab == doctest::Approx(0.5));
  CHECK(std::abs(t.sD - 1.0) <= 1e-3);
}

TEST_CASE("straightness and affinity") {
  const auto report = [](const DistanceField& f, const Point& a, const Point& b) {
    return straightness_and_affinity(trace(f, a, b, 0.0, eval_distance(f, a, b), 64));
  };
  const StraightnessReport e = report(euclidean(2), pt(0, 0), pt(1, 0));
  CHECK(e.chord_deviation <= 1e-12);
  CHECK(e.affinity_residual <= 1e-12);
  const StraightnessReport p = report(minkowski_pnorm(2, 4), pt(0, 0), pt(1, 0.5));
  CHECK(p.chord_deviation <= 1e-6);
  CHECK(p.affinity_residual <= 1e-6);
  const StraightnessReport t = report(testing::ratio_space(), pt(0, 0), pt(1, 0));
  CHECK(t.chord_deviation <= 1e-6);
  // Oracle: |o(r) - a| = r / (1 - r); its second difference at the last
  // interior node, scaled by delta^2 / |b - a|.
  const double delta = 0.5, h = delta / 64;
  const auto t_of = [](double r) { return r / (1 - r); };
  const double second = (t_of(delta) - 2 * t_of(delta - h) + t_of(delta - 2 * h)) / (h * h);
  CHECK(t.affinity_residual == doctest::Approx(second * delta * delta).epsilon(1e-6));
  CHECK(t.affinity_residual > 1e-2);
}

TEST_CASE("arc length CSV layout") {
  const DistanceField e = euclidean(2);
  FinslerEvaluator fe(e);
  const ArcLengthReport r = arc_length_report(e, fe, parabola_curve(), {10, 100});
  std::ostringstream out;
  write_csv(out, r, "p");
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# p");
  std::getline(in, line);
  CHECK(line == "N,chord_sum,extrapolated_sD,quadrature_sF");
}

TEST_CASE("pairwise_sum") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum({}) == 0.0);
}

TEST_CASE("a non-differentiable metric is flagged as divergent") {
  // sqrt of the Euclidean distance is a metric, but rho / r grows like r^(-1/2).
  DistanceField snowflake = euclidean(2);
  snowflake.name = "snowflake";
  snowflake.eval = [](const Point& a, const Point& b) { return std::sqrt((a - b).norm()); };
  snowflake.grad2 = nullptr;
  snowflake.hess2 = nullptr;
  FinslerEvaluator ev(snowflake);
  try {
    ev.extract(pt(0, 0), pt(1, 0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ExtrapolationDivergence);
  }
}
