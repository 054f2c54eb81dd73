#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hetemb/manifold.hpp"
#include "test_util.hpp"

using namespace hetemb;

TEST_CASE("spec parsing and printing") {
  ManifoldSpec s = ManifoldSpec::parse("h5,h5,rot(a=auto,l=0.5)");
  REQUIRE(s.factors().size() == 3);
  CHECK(s.factor(0).kind == FactorKind::Hyperbolic);
  CHECK(s.factor(0).dim == 5);
  CHECK(s.factor(2).kind == FactorKind::RotSym);
  CHECK(s.factor(2).alpha_auto);
  CHECK(s.factor(2).scale == 0.5);
  CHECK(s.stride() == 6 + 6 + 1);
  CHECK(*s.radial_coord() == 12);
  for (const char* text : {"h5,h5,rot(a=auto,l=0.5)", "h5,s5", "e2", "s3(l=2)", "h2,s2,rot(a=1.5)", "e3,rot"}) {
    ManifoldSpec a = ManifoldSpec::parse(text);
    CHECK(ManifoldSpec::parse(a.to_string()) == a);
  }
  CHECK(ManifoldSpec::parse("h5,h5").homogeneous_curvature() == -40.0);
  CHECK_THROWS(ManifoldSpec::parse("rot,rot"));
  CHECK_THROWS(ManifoldSpec::parse("x3"));
  CHECK_THROWS(ManifoldSpec::parse("h0"));
  CHECK_THROWS(ManifoldSpec::parse("rot(a=-1)"));
  CHECK_THROWS(ManifoldSpec::parse("e2(l=0)"));
  CHECK_THROWS(ManifoldSpec::parse(""));
}

TEST_CASE("distance examples") {
  ManifoldSpec h2 = ManifoldSpec::parse("h2");
  Point p{0, 0, 1}, q{std::sinh(1.0), 0, std::cosh(1.0)};
  CHECK(distance(h2, p, q) == doctest::Approx(1.0).epsilon(1e-12));

  ManifoldSpec e1e1 = ManifoldSpec::parse("e1,e1");
  CHECK(distance(e1e1, Point{0, 0}, Point{3, 4}) == doctest::Approx(5.0));

  ManifoldSpec rot = ManifoldSpec::parse("rot(a=1,l=0.5)");
  CHECK(distance(rot, Point{2}, Point{6}) == doctest::Approx(2.0));

  CHECK_THROWS_AS(distance(h2, Point{0, 1}, q), ShapeError);
}

TEST_CASE("exp map examples") {
  ManifoldSpec h2 = ManifoldSpec::parse("h2");
  Point p{0, 0, 1};
  Point q = exp_map(h2, p, Point{1, 0, 0});
  CHECK(q[0] == doctest::Approx(std::sinh(1.0)));
  CHECK(q[1] == doctest::Approx(0.0));
  CHECK(q[2] == doctest::Approx(std::cosh(1.0)));
  CHECK(exp_map(h2, p, Point{0, 0, 0}) == p);
  CHECK_THROWS_AS(exp_map(h2, p, Point{0, 0, 1}), ContractViolation);

  ManifoldSpec rot = ManifoldSpec::parse("rot");
  CHECK(exp_map(rot, Point{0.5}, Point{-0.7})[0] == 0.0);

  ManifoldSpec s2 = ManifoldSpec::parse("s2");
  Point n{0, 0, 1};
  Point e = exp_map(s2, n, Point{std::numbers::pi / 2, 0, 0});
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("riemannian gradient examples") {
  ManifoldSpec e2 = ManifoldSpec::parse("e2");
  CHECK(riemannian_gradient(e2, Point{1, 2}, Point{3, -4}) == Point{3, -4});
  ManifoldSpec h2 = ManifoldSpec::parse("h2");
  Point g = riemannian_gradient(h2, Point{0, 0, 1}, Point{0.3, -2.0, 5.0});
  CHECK(g[0] == doctest::Approx(0.3));
  CHECK(g[1] == doctest::Approx(-2.0));
  CHECK(g[2] == doctest::Approx(0.0));
  ManifoldSpec rot = ManifoldSpec::parse("rot(a=1,l=2)");
  CHECK(riemannian_gradient(rot, Point{1.0}, Point{8.0})[0] == doctest::Approx(2.0));
}

TEST_CASE("scalar curvature examples") {
  CHECK(scalar_curvature(ManifoldSpec::parse("h5,h5"), testutil::base(ManifoldSpec::parse("h5,h5"))) == -40.0);
  ManifoldSpec rot = ManifoldSpec::parse("rot(a=1)");
  CHECK(scalar_curvature(rot, Point{0.0}) == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(scalar_curvature(rot, Point{1.0}) == doctest::Approx(4.97818749689).epsilon(1e-10));
  // Scaled factors divide their curvature by lambda^2; a product sums its factors.
  ManifoldSpec prod = ManifoldSpec::parse("h3(l=2),s2,e4,rot(a=0.5,l=3)");
  Point p = testutil::base(prod);
  p[*prod.radial_coord()] = 0.7;
  const double expect = -6.0 / 4.0 + 2.0 + 0.0 +
                        scalar_curvature(ManifoldSpec::parse("rot(a=0.5)"), Point{0.7}) / 9.0;
  CHECK(scalar_curvature(prod, p) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("validate_point") {
  ManifoldSpec h2 = ManifoldSpec::parse("h2,s1,rot");
  Point ok = testutil::base(h2);
  CHECK_NOTHROW(validate_point(h2, ok));
  Point bad = ok;
  bad[2] = 1.1;
  CHECK_THROWS_AS(validate_point(h2, bad), ContractViolation);
  bad = ok;
  bad[2] = -1.0;  // lower sheet
  CHECK_THROWS_AS(validate_point(h2, bad), ContractViolation);
  bad = ok;
  bad.back() = -0.1;
  CHECK_THROWS_AS(validate_point(h2, bad), ContractViolation);
  CHECK_THROWS_AS(validate_point(h2, Point{1, 2}), ShapeError);
}

TEST_CASE("constraint drift over 1000 exp-map steps stays below 1e-9") {
  std::mt19937_64 rng(1);
  for (const char* text : {"h3", "s3", "h5,s2"}) {
    ManifoldSpec s = ManifoldSpec::parse(text);
    Point p = testutil::base(s);
    for (int t = 0; t < 1000; ++t) {
      Point v = testutil::random_tangent(s, p, 0.3, rng);
      p = exp_map(s, p, v);
    }
    CHECK(testutil::constraint_violation(s, p) < 1e-9);
    // Far from the origin too.
    Point far = exp_map(s, testutil::base(s), testutil::random_tangent(s, testutil::base(s), 5.0, rng));
    for (int t = 0; t < 1000; ++t) far = exp_map(s, far, testutil::random_tangent(s, far, 0.3, rng));
    CHECK(testutil::constraint_violation(s, far) < 1e-9);
  }
}

TEST_CASE("geodesics are unit speed: d(p, exp_p(v)) = |v|") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> len(0.0, 10.0);
  for (const char* text : {"e3", "h3", "h2", "s3(l=1)", "h4(l=0.7)"}) {
    ManifoldSpec s = ManifoldSpec::parse(text);
    const bool sphere = s.factor(0).kind == FactorKind::Sphere;
    for (int t = 0; t < 200; ++t) {
      Point p = testutil::random_point(s, 1.5, rng);
      Point v = testutil::random_tangent(s, p, 1.0, rng);
      double target = len(rng);
      if (sphere) target = std::fmod(target, std::numbers::pi - 1e-3);  // beyond pi the geodesic stops minimizing
      const double norm = std::sqrt(metric_inner(s, p, v, v));
      if (norm < 1e-9) continue;
      for (double& x : v) x *= target / norm;
      const double d = distance(s, p, exp_map(s, p, v));
      CHECK(std::abs(d - target) <= 1e-7 * std::max(1.0, target));
    }
  }
}

TEST_CASE("distance is symmetric, zero on the diagonal and satisfies the triangle inequality") {
  std::mt19937_64 rng(3);
  for (const char* text : {"e3", "h3", "s3", "h2,s2,rot(a=1)", "h5(l=2),rot(a=0.5,l=0.3)"}) {
    ManifoldSpec s = ManifoldSpec::parse(text);
    for (int t = 0; t < 300; ++t) {
      Point a = testutil::random_point(s, 2.0, rng);
      Point b = testutil::random_point(s, 2.0, rng);
      Point c = testutil::random_point(s, 2.0, rng);
      CHECK(distance(s, a, b) == doctest::Approx(distance(s, b, a)).epsilon(1e-12));
      CHECK(distance(s, a, a) == 0.0);
      CHECK(distance(s, a, c) <= distance(s, a, b) + distance(s, b, c) + 1e-9);
    }
  }
}

TEST_CASE("riemannian gradient matches directional derivatives along exp curves") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = 1e-5;
  for (const char* text : {"e3", "s3", "h3", "h2(l=1.7),s2(l=0.6),rot(a=0.8,l=1.3)", "rot(a=2,l=0.5)"}) {
    ManifoldSpec s = ManifoldSpec::parse(text);
    for (int t = 0; t < 50; ++t) {
      // f(x) = sum a_c x_c + b_c x_c^2 on the ambient coordinates.
      std::vector<double> a(s.stride()), b(s.stride());
      for (std::size_t c = 0; c < s.stride(); ++c) {
        a[c] = gauss(rng);
        b[c] = 0.5 * gauss(rng);
      }
      auto f = [&](PointView x) {
        double v = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) v += a[c] * x[c] + b[c] * x[c] * x[c];
        return v;
      };
      Point p = testutil::random_point(s, 1.0, rng);
      if (auto rc = s.radial_coord()) p[*rc] += 0.5;  // stay off the r = 0 boundary
      Point grad_amb(s.stride());
      for (std::size_t c = 0; c < s.stride(); ++c) grad_amb[c] = a[c] + 2.0 * b[c] * p[c];
      Point g = riemannian_gradient(s, p, grad_amb);
      Point v = testutil::random_tangent(s, p, 1.0, rng);
      const double analytic = metric_inner(s, p, g, v);
      Point hv = v;
      for (double& x : hv) x *= h;
      Point mhv = hv;
      for (double& x : mhv) x = -x;
      // Central difference along the exp curve; the one-sided quotient carries
      // an O(h) bias that dominates when the derivative is small.
      const double numeric = (f(exp_map(s, p, hv)) - f(exp_map(s, p, mhv))) / (2.0 * h);
      CHECK(testutil::rel_err(analytic, numeric) <= 1e-4);
    }
  }
}

TEST_CASE("riemannian gradient output is tangent") {
  std::mt19937_64 rng(5);
  ManifoldSpec s = ManifoldSpec::parse("h3,s2");
  for (int t = 0; t < 50; ++t) {
    Point p = testutil::random_point(s, 2.0, rng);
    Point amb(s.stride());
    for (double& x : amb) x = std::normal_distribution<double>(0, 3)(rng);
    Point g = riemannian_gradient(s, p, amb);
    const PointView pv(p), gv(g);
    CHECK(std::abs(minkowski_dot(pv.subspan(0, 4), gv.subspan(0, 4))) < 1e-9 * std::max(1.0, std::abs(p[3]) * 10));
    double dot = 0.0;
    for (std::size_t c = 4; c < 7; ++c) dot += p[c] * g[c];
    CHECK(std::abs(dot) < 1e-12);
  }
}
