#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kflow/diagnostics.hpp"
#include "kflow/initial_curves.hpp"
#include "reference/reference.hpp"

using namespace kflow;

namespace {

constexpr double kPi = std::numbers::pi;

CurvatureProfile circle(double r, std::size_t n = 128) { return generate(CurveSpec{Circle{r}, n}); }
CurvatureProfile ellipse() { return generate(CurveSpec{Ellipse{2, 1}, 256}); }

const Margin* find(const std::vector<Margin>& ms, const std::string& name) {
  for (const auto& m : ms) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("rate formulas") {
  for (LawKind kind : {LawKind::LP, LawKind::AP, LawKind::G1, LawKind::G2}) {
    const auto r = rate_formulas(FlowLaw(kind, 2.0), circle(1.3));
    CHECK(std::abs(r.dA_dt) < 1e-12);
    CHECK(std::abs(r.dL_dt) < 1e-12);
  }
  for (double a : {0.5, 1.0, 3.0}) {
    const auto lp = rate_formulas(FlowLaw(LawKind::LP, a), ellipse());
    CHECK(lp.dA_dt > 0.0);
    CHECK(lp.dL_dt == 0.0);
    const auto ap = rate_formulas(FlowLaw(LawKind::AP, a), ellipse());
    CHECK(ap.dL_dt < 0.0);
    CHECK(ap.dA_dt == 0.0);
  }
  const auto c = rate_formulas(FlowLaw(LawKind::Contraction, 1.0), circle(2.0));
  CHECK(c.dL_dt == doctest::Approx(-kPi).epsilon(1e-13));
  CHECK(c.dA_dt == doctest::Approx(-2 * kPi).epsilon(1e-13));
}

TEST_CASE("tso constants match the reference and the ellipse values") {
  const auto e = ellipse();
  const TsoContext ctx = TsoContext::from_initial(e, 1.0);
  const auto ref = reference::tso_constants(reference::ellipse_perimeter(2, 1), 2 * kPi, 1.0);
  CHECK(ctx.sigma == doctest::Approx(ref.sigma).epsilon(1e-9));
  CHECK(ctx.beta == doctest::Approx(ref.beta).epsilon(1e-9));
  CHECK(ctx.T1 == doctest::Approx(ref.T1).epsilon(1e-9));
  CHECK(ctx.Q0 == doctest::Approx(ref.Q0).epsilon(1e-9));
  CHECK(ctx.sigma == doctest::Approx(2.3252).epsilon(1e-4));
  CHECK(ctx.beta == doctest::Approx(0.21503).epsilon(1e-4));
  CHECK(ctx.bound(1.0) == ctx.Q0);
  CHECK(ctx.bound(1e-4) == doctest::Approx(1.0 / (2.0 * 1e-4)));
}

TEST_CASE("tso quantity") {
  const double r = 2.0;
  const auto c = circle(r);
  const TsoContext ctx = TsoContext::from_initial(c, 2.0);
  CHECK(ctx.sigma == 1.0);
  const auto q = tso_quantity(c, ctx);
  CHECK(q.precondition_ok);
  CHECK(q.Q_max == doctest::Approx(std::pow(r, -2.0) / (r - ctx.beta)).epsilon(1e-12));

  TsoContext zero = ctx;
  zero.beta = 0.0;
  const auto e = ellipse();
  const auto qe = tso_quantity(e, zero);
  const auto sup = support_about_centroid(e);
  double best = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) best = std::max(best, e[j] * e[j] / sup.u[j]);
  CHECK(qe.Q_max >= best);
  CHECK(qe.Q_max == doctest::Approx(best).epsilon(1e-6));

  TsoContext huge = ctx;
  huge.beta = 5.0;
  const auto qh = tso_quantity(c, huge);
  CHECK_FALSE(qh.precondition_ok);
  CHECK(std::isnan(qh.Q_max));
}

TEST_CASE("gradient functional") {
  CHECK(gradient_functional(circle(2.0), 1.5) == doctest::Approx(std::pow(2.0, -3.0)).epsilon(1e-13));
  for (double eps : {0.01, 0.1, 0.2}) {
    const auto kp = CurvatureProfile(
        PeriodicField::sample(AngularGrid(128), [eps](double t) { return 1.0 + eps * std::cos(t); }));
    CHECK(gradient_functional(kp, 1.0) == doctest::Approx((1 + eps) * (1 + eps)).epsilon(1e-12));
  }
}

TEST_CASE("lower bound functional") {
  CHECK_FALSE(lower_bound_functional(ellipse(), std::nullopt).has_value());
  CHECK(std::abs(*lower_bound_functional(circle(1.5), 0.0)) < 1e-13);
  const auto e = ellipse();
  const double expect = 4.0 - length(e) / (2 * kPi);  // max 1/k = a^2/b = 4
  CHECK(*lower_bound_functional(e, 0.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(*lower_bound_functional(e, 2 * kPi) == doctest::Approx(expect - 1.0).epsilon(1e-12));
}

TEST_CASE("entropy values and directions") {
  const double r = 1.7;
  const auto ap1 = entropy(FlowLaw(LawKind::AP, 1.0), circle(r));
  CHECK(ap1.value == doctest::Approx(2 * kPi * std::log(2 * kPi)).epsilon(1e-13));
  CHECK(ap1.direction == Monotonicity::Decreasing);
  const auto lp3 = entropy(FlowLaw(LawKind::LP, 3.0), circle(r));
  CHECK(lp3.value == doctest::Approx(2 * kPi * std::pow(r, -2.0)).epsilon(1e-13));
  CHECK(lp3.direction == Monotonicity::Decreasing);
  const auto lp1 = entropy(FlowLaw(LawKind::LP, 1.0), ellipse());
  CHECK(lp1.value == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(lp1.direction == Monotonicity::Constant);
  CHECK(entropy(FlowLaw(LawKind::LP, 0.5), ellipse()).direction == Monotonicity::Increasing);
  CHECK(entropy(FlowLaw(LawKind::AP, 0.5), ellipse()).direction == Monotonicity::Increasing);
  CHECK(entropy(FlowLaw(LawKind::AP, 2.0), circle(r)).value ==
        doctest::Approx(std::pow(2 * kPi * r, 1.0) * 2 * kPi / r).epsilon(1e-13));
  CHECK(std::isnan(entropy(FlowLaw(LawKind::G1, 1.0), ellipse()).value));
  CHECK(entropy_direction(FlowLaw(LawKind::Contraction, 1.0)) == Monotonicity::Unspecified);
}

TEST_CASE("inequality audit on circles is an equality") {
  for (double r : {1.0, 0.4}) {
    for (const auto& m : inequality_audit(circle(r))) {
      INFO(m.name);
      CHECK(std::abs(m.value) <= 1e-10 * std::max(1.0, m.scale));
    }
  }
}

TEST_CASE("inequality audit on the ellipse") {
  const auto ms = inequality_audit(ellipse());
  for (const auto& m : ms) {
    INFO(m.name);
    CHECK(m.holds());
  }
  const Margin* m22 = find(ms, "ineq22[beta=1]");
  REQUIRE(m22 != nullptr);
  CHECK(m22->value > 1e-3);
  const Margin* gage = find(ms, "gage");
  REQUIRE(gage != nullptr);
  CHECK(gage->value > 0.0);
  CHECK(find(ms, "gage1.lower[alpha=0.5]") == nullptr);
  CHECK(find(ms, "gage2.upper[alpha=2]") != nullptr);
  CHECK(find(ms, "andrews[alpha=3]") != nullptr);
}

TEST_CASE("inequality audit accepts user test functions") {
  AuditOptions opts;
  opts.test_functions.push_back({"log", [](double k) { return std::log(k); }});
  opts.test_functions.push_back({"inverse", [](double k) { return 1.0 / k; }});
  const auto ms = inequality_audit(random_convex(3, 1.0, 6, 0.8), opts);
  REQUIRE(find(ms, "minkowski1[log]") != nullptr);
  REQUIRE(find(ms, "minkowski2[inverse]") != nullptr);
  for (const auto& m : ms) CHECK(m.holds());
}

TEST_CASE("diagnostic names") {
  CHECK(DiagnosticsConfig::from_names({"radii"}).enabled_names() == std::vector<std::string>{"radii"});
  CHECK(DiagnosticsConfig{}.enabled_names() == DiagnosticsConfig::all_names());
  CHECK_THROWS_AS(DiagnosticsConfig::from_names({"radius"}), ConfigError);
  CHECK(sample_field_names().size() == 16);
  SampleRecord r;
  r.t = 1.5;
  r.entropy = 7.0;
  const auto v = sample_field_values(r);
  CHECK(v.front() == 1.5);
  CHECK(v.back() == 7.0);
}

TEST_CASE("series ordering and margin consistency") {
  DiagnosticsSeries s;
  SampleRecord a;
  a.t = 0.0;
  a.margins = {{"m", 1.0, 1.0}};
  s.append(a);
  SampleRecord b = a;
  CHECK_THROWS_AS(s.append(b), DomainError);
  b.t = 1.0;
  b.margins = {{"other", 1.0, 1.0}};
  CHECK_THROWS_AS(s.append(b), DomainError);
  b.margins = a.margins;
  s.append(b);
  CHECK(s.size() == 2);
  CHECK(s.margin_names() == std::vector<std::string>{"m"});
}

TEST_CASE("sampler fills every field") {
  const auto e = ellipse();
  Sampler sampler(FlowLaw(LawKind::LP, 1.0), e, DiagnosticsConfig{});
  const SampleRecord r = sampler.sample(e, 0.0, 0.0);
  CHECK(r.L == doctest::Approx(reference::ellipse_perimeter(2, 1)).epsilon(1e-10));
  CHECK(r.A == doctest::Approx(2 * kPi).epsilon(1e-10));
  CHECK(r.k_max == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.k_min == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.r_in == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.r_out == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(r.tso_precondition_ok);
  CHECK_FALSE(r.margins.empty());
  Sampler bare(FlowLaw(LawKind::LP, 1.0), e, DiagnosticsConfig::from_names({}));
  const SampleRecord q = bare.sample(e, 0.0, std::nullopt);
  CHECK(std::isnan(q.r_in));
  CHECK(std::isnan(q.Q_max));
  CHECK(std::isnan(q.Phi_max));
  CHECK(q.margins.empty());
}

TEST_CASE("series audit flags injected violations") {
  const FlowLaw law(LawKind::LP, 1.0);
  const auto e = ellipse();
  Sampler sampler(law, e, DiagnosticsConfig::from_names({"gradient", "lower_bound"}));
  DiagnosticsSeries s;
  s.append(sampler.sample(e, 0.0, 0.0));
  SampleRecord bad = sampler.sample(e, 0.1, 0.0);
  bad.L *= 1.0 + 1e-5;
  bad.I *= 1.01;
  s.append(bad);
  const auto fails = audit_series(law, s, sampler.tso_context());
  std::vector<std::string> checks;
  for (const auto& f : fails) checks.push_back(f.check);
  CHECK(std::find(checks.begin(), checks.end(), "length_conservation") != checks.end());
  CHECK(std::find(checks.begin(), checks.end(), "isoperimetric_monotone") != checks.end());
}

}  // TEST_SUITE
