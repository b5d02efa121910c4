#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kflow/curve_model.hpp"
#include "kflow/initial_curves.hpp"
#include "reference/reference.hpp"

using namespace kflow;

namespace {

constexpr double kPi = std::numbers::pi;

CurvatureProfile circle(double r, std::size_t n = 256) { return generate(CurveSpec{Circle{r}, n}); }
CurvatureProfile ellipse(double a = 2, double b = 1, std::size_t n = 256) {
  return generate(CurveSpec{Ellipse{a, b}, n});
}

}  // namespace

TEST_SUITE("curve_model") {

TEST_CASE("profile rejects non-positive curvature") {
  std::vector<double> k(32, 1.0);
  k[7] = 0.0;
  try {
    CurvatureProfile kp(AngularGrid(32), k);
    FAIL("expected ConvexityError");
  } catch (const ConvexityError& e) {
    CHECK(e.index() == 7);
    CHECK(e.theta() == doctest::Approx(7 * 2 * kPi / 32));
  }
}

TEST_CASE("length") {
  CHECK(length(circle(2)) == doctest::Approx(4 * kPi).epsilon(1e-14));
  CHECK(length(circle(1)) == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(std::abs(length(ellipse()) - reference::ellipse_perimeter(2, 1)) < 1e-8);
  CHECK(std::abs(reference::ellipse_perimeter(2, 1) - 9.688448220547675) < 1e-12);
}

TEST_CASE("area") {
  CHECK(area(circle(2)) == doctest::Approx(4 * kPi).epsilon(1e-13));
  CHECK(area(circle(1)) == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(std::abs(area(ellipse()) - 2 * kPi) < 1e-8);
  const auto k = [](double t) { return reference::ellipse_curvature(3, 1.5, t); };
  CHECK(std::abs(area(ellipse(3, 1.5)) - reference::curve_measures(k).area) < 1e-8);
}

TEST_CASE("closure defect") {
  CHECK(closure_defect(circle(3)) < 1e-12);
  CHECK(closure_defect(ellipse()) < 1e-10);
  const auto open = PeriodicField::sample(AngularGrid(256), [](double t) { return 1.0 / (1.0 + 0.3 * std::cos(t)); });
  const double oracle = reference::integrate([](double t) { return (1 + 0.3 * std::cos(t)) * std::cos(t); }, 0, 2 * kPi);
  CHECK(std::abs(oracle - 0.3 * kPi) < 1e-12);
  CHECK(closure_defect(CurvatureProfile(open)) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(closure_defect(CurvatureProfile(open)) > 0.9);
}

TEST_CASE("closure projection restores closure") {
  const auto open = PeriodicField::sample(AngularGrid(128), [](double t) { return 1.0 / (1.0 + 0.3 * std::cos(t)); });
  CHECK(closure_defect(project_closure(CurvatureProfile(open))) < 1e-13);
}

TEST_CASE("reconstruction") {
  const auto c = circle(1);
  const auto pts = reconstruct_points(c, {1, 0});
  double err = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double th = c.grid().theta(j);
    err = std::max(err, norm(pts[j] - Vec2{std::cos(th), std::sin(th)}));
  }
  CHECK(err < 1e-10);

  const auto e = ellipse();
  const auto q = reconstruct_points(e, {2, 0});
  err = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    // The point with outward normal theta on x^2/a^2 + y^2/b^2 = 1.
    const double th = e.grid().theta(j);
    const double s = std::sqrt(4 * std::cos(th) * std::cos(th) + std::sin(th) * std::sin(th));
    err = std::max(err, norm(q[j] - Vec2{4 * std::cos(th) / s, std::sin(th) / s}));
  }
  CHECK(err < 1e-8);

  const auto moved = reconstruct_points(e, {5, -3});
  for (std::size_t j = 0; j < q.size(); j += 17) {
    CHECK(std::abs(moved[j].x - q[j].x - 3) < 1e-12);
    CHECK(std::abs(moved[j].y - q[j].y + 3) < 1e-12);
  }
}

TEST_CASE("support about the centroid") {
  const auto sc = support_about_centroid(circle(2.5));
  for (double u : sc.u.values()) CHECK(std::abs(u - 2.5) < 1e-12);

  const auto se = support_about_centroid(ellipse());
  CHECK(std::abs(se.u[0] - 2) < 1e-8);
  CHECK(std::abs(se.u[64] - 1) < 1e-8);

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto kp = random_convex(seed, 1.0, 6, 0.8);
    const auto s = support_about_centroid(kp);
    const auto resid = deriv(s.u, 2) + s.u - kp.radius_of_curvature();
    for (double r : resid.values()) CHECK(std::abs(r) < 1e-8);
  }
}

TEST_CASE("inradius and outradius") {
  const Radii c = inradius_outradius(circle(2));
  CHECK(std::abs(c.r_in - 2) < 1e-7);
  CHECK(std::abs(c.r_out - 2) < 1e-7);
  const Radii e = inradius_outradius(ellipse());
  CHECK(std::abs(e.r_in - 1) < 1e-6);
  CHECK(std::abs(e.r_out - 2) < 1e-6);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto kp = random_convex(seed, 1.0, 6, 0.8);
    const Radii r = inradius_outradius(kp);
    const BonnesenWindow w = bonnesen_window(length(kp), area(kp));
    CHECK(r.r_in >= w.lower - 1e-8);
    CHECK(r.r_out <= w.upper + 1e-8);
    CHECK(r.r_in <= r.r_out);
  }
}

TEST_CASE("radii match a brute-force center search") {
  const auto kp = random_convex(11, 1.0, 5, 0.8, 128);
  const auto sup = support_about_centroid(kp);
  const Radii r = inradius_outradius(sup);
  // min over theta of the refined support on a fine center grid around the optimum
  const TrigInterpolant u(sup.u);
  auto inner = [&](Vec2 c) {
    double m = 1e300;
    for (int i = 0; i < 4096; ++i) {
      const double t = 2 * kPi * i / 4096;
      m = std::min(m, u.value(t) - c.x * std::cos(t) - c.y * std::sin(t));
    }
    return m;
  };
  double best = -1e300;
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) {
      best = std::max(best, inner(r.in_center + Vec2{1e-3 * i, 1e-3 * j}));
    }
  }
  CHECK(r.r_in >= best - 1e-9);
  CHECK(std::abs(inner(r.in_center) - r.r_in) < 1e-9);
}

TEST_CASE("warm start reproduces the cold optimum") {
  const auto kp = random_convex(5, 1.0, 6, 0.8);
  const auto sup = support_about_centroid(kp);
  const Radii cold = inradius_outradius(sup);
  const Radii warm = inradius_outradius(sup, RadiiGuess{cold.in_center + Vec2{0.01, 0}, cold.out_center});
  CHECK(std::abs(cold.r_in - warm.r_in) < 1e-12);
  CHECK(std::abs(cold.r_out - warm.r_out) < 1e-12);
}

TEST_CASE("bonnesen sigma") {
  CHECK(bonnesen_sigma(1.0) == 1.0);
  CHECK(bonnesen_sigma(2.0) == doctest::Approx(3 + 2 * std::sqrt(2.0)).epsilon(1e-15));
  const double L = reference::ellipse_perimeter(2, 1);
  const double I = L * L / (8 * kPi * kPi);
  CHECK(std::abs(bonnesen_sigma(I) - std::pow(std::sqrt(I) + std::sqrt(I - 1), 2)) < 1e-12);
  CHECK(bonnesen_sigma(1.0 - 1e-14) == 1.0);
  CHECK_THROWS_AS(bonnesen_sigma(0.9), DomainError);
}

TEST_CASE("geometry scales with the curve") {
  const auto a = ellipse(2, 1);
  const auto b = ellipse(6, 3);
  CHECK(length(b) == doctest::Approx(3 * length(a)).epsilon(1e-13));
  CHECK(area(b) == doctest::Approx(9 * area(a)).epsilon(1e-12));
}

}  // TEST_SUITE
