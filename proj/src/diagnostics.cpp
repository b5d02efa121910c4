#include "kflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace kflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double power_integral(const CurvatureProfile& kp, double p) {
  return integrate(curvature_power(kp, p));
}

std::string tagged(const char* base, const char* key, double x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s[%s=%g]", base, key, x);
  return buf;
}

Margin make_margin(std::string name, double large, double small) {
  return {std::move(name), large - small, std::max(std::abs(large), std::abs(small))};
}

struct MinkowskiTerms {
  double in1;  // (int Phi)^2 - 2pi int Phi (Phi'' + Phi)
  double in2;  // (int Phi/k)^2 - 2A int Phi (Phi'' + Phi)
  double quad; // int Phi (Phi'' + Phi)
};

MinkowskiTerms minkowski(const PeriodicField& phi, const PeriodicField& rho, double A) {
  const PeriodicField lhs = phi * (deriv(phi, 2) + phi);
  const double quad = integrate(lhs);
  const double s1 = integrate(phi);
  const double s2 = integrate(phi * rho);
  return {s1 * s1 - 2.0 * kPi * quad, s2 * s2 - 2.0 * A * quad, quad};
}

}  // namespace

RateFormulas rate_formulas(const FlowLaw& law, const CurvatureProfile& kp) {
  const double a = law.alpha();
  const double L = length(kp);
  const double Ia = power_integral(kp, a);
  const double Ia1 = power_integral(kp, a - 1.0);
  switch (law.kind()) {
    case LawKind::LP:
      return {-Ia1 + L / (2.0 * kPi) * Ia, 0.0};
    case LawKind::AP:
      return {0.0, -Ia + 2.0 * kPi / L * Ia1};
    default: {
      const double lam = lambda(law, kp);
      return {lam * L - Ia1, 2.0 * kPi * lam - Ia};
    }
  }
}

TsoContext TsoContext::from_initial(const CurvatureProfile& kp0, double alpha) {
  TsoContext c;
  c.alpha = alpha;
  const double L = length(kp0);
  const double A = area(kp0);
  c.sigma = bonnesen_sigma(isoperimetric_ratio(L, A));
  const double r = std::sqrt(A / kPi) / c.sigma;
  c.beta = std::pow(0.5, (2.0 + alpha) / (1.0 + alpha)) * r;
  c.T1 = std::pow(r, 1.0 + alpha) / (2.0 + 2.0 * alpha);
  c.Q0 = std::pow(2.0 * (alpha + 1.0) / (alpha * std::pow(c.beta, 1.0 + 1.0 / alpha)), alpha);
  return c;
}

double TsoContext::bound(double t) const {
  return std::max(Q0, 1.0 / ((alpha + 1.0) * t));
}

TsoQuantity tso_quantity(const CurvatureProfile& kp, const SupportRepresentation& support,
                         const TsoContext& ctx) {
  const double u_min = refined_extrema(support.u).min.value;
  TsoQuantity q{kNaN, u_min >= 2.0 * ctx.beta, u_min};
  if (!(u_min > ctx.beta)) {
    q.precondition_ok = false;
    return q;
  }
  const PeriodicField v = curvature_power(kp, ctx.alpha);
  const PeriodicField Q = v.zip(support.u, [b = ctx.beta](double vv, double u) { return vv / (u - b); });
  q.Q_max = refined_extrema(Q).max.value;
  return q;
}

TsoQuantity tso_quantity(const CurvatureProfile& kp, const TsoContext& ctx) {
  return tso_quantity(kp, support_about_centroid(kp), ctx);
}

double gradient_functional(const CurvatureProfile& kp, double alpha) {
  const PeriodicField v = curvature_power(kp, alpha);
  const PeriodicField vt = deriv(v, 1);
  return refined_extrema(v * v + vt * vt).max.value;
}

std::optional<double> lower_bound_functional(const CurvatureProfile& kp,
                                             std::optional<double> accumulated) {
  if (!accumulated) return std::nullopt;
  const double L = length(kp);
  return refined_extrema(kp.radius_of_curvature()).max.value - L / (2.0 * kPi) -
         *accumulated / (2.0 * kPi);
}

std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Increasing: return "increasing";
    case Monotonicity::Decreasing: return "decreasing";
    case Monotonicity::Constant: return "constant";
    case Monotonicity::Unspecified: return "unspecified";
  }
  return "?";
}

Monotonicity entropy_direction(const FlowLaw& law) {
  const double a = law.alpha();
  switch (law.kind()) {
    case LawKind::LP:
      if (a == 1.0) return Monotonicity::Constant;
      return a < 1.0 ? Monotonicity::Increasing : Monotonicity::Decreasing;
    case LawKind::AP:
      return a < 1.0 ? Monotonicity::Increasing : Monotonicity::Decreasing;
    default:
      return Monotonicity::Unspecified;
  }
}

EntropyValue entropy(const FlowLaw& law, const CurvatureProfile& kp) {
  const double a = law.alpha();
  const Monotonicity dir = entropy_direction(law);
  switch (law.kind()) {
    case LawKind::LP:
      return {power_integral(kp, a - 1.0), dir};
    case LawKind::AP: {
      const double L = length(kp);
      if (a == 1.0) {
        return {integrate(kp.k().map([L](double k) { return std::log(k * L); })), dir};
      }
      return {std::pow(L, a - 1.0) * power_integral(kp, a - 1.0), dir};
    }
    default:
      return {kNaN, dir};
  }
}

std::vector<Margin> inequality_audit(const CurvatureProfile& kp, const AuditOptions& opts) {
  std::vector<Margin> out;
  const double L = length(kp);
  const double A = area(kp);
  const PeriodicField rho = kp.radius_of_curvature();

  for (double a : opts.alphas) {
    const double lp = power_integral(kp, a) / (2.0 * kPi);
    const double ap = power_integral(kp, a - 1.0) / L;
    out.push_back(make_margin(tagged("kkL", "alpha", a), lp, ap));
  }
  for (double b : opts.exponents) {
    out.push_back(make_margin(tagged("ineq11", "beta", b), L / (2.0 * kPi) * power_integral(kp, b),
                              power_integral(kp, b - 1.0)));
  }
  for (double b : opts.exponents) {
    out.push_back(make_margin(tagged("ineq22", "beta", b),
                              2.0 * A / L * power_integral(kp, b + 1.0), power_integral(kp, b)));
  }
  out.push_back(make_margin("gage", integrate(kp.k()), kPi * L / A));

  for (double a : opts.alphas) {
    if (a < 1.0) continue;
    const double Ia = power_integral(kp, a);
    const double Ia1 = power_integral(kp, a - 1.0);
    const double ap = Ia1 / L;
    const double lp = Ia / (2.0 * kPi);
    const double g1 = 2.0 * A / (L * L) * Ia;
    const double g2 = L / (4.0 * kPi * A) * Ia1;
    out.push_back(make_margin(tagged("gage1.lower", "alpha", a), g1, ap));
    out.push_back(make_margin(tagged("gage1.upper", "alpha", a), lp, g1));
    out.push_back(make_margin(tagged("gage2.lower", "alpha", a), g2, ap));
    out.push_back(make_margin(tagged("gage2.upper", "alpha", a), lp, g2));
  }

  for (double a : opts.alphas) {
    const PeriodicField v = curvature_power(kp, a);
    const double v2 = integrate(v * v);
    const double lp = integrate(v) / (2.0 * kPi);
    const double ap = integrate(v * rho) / L;
    const auto m1 = minkowski(v.map([lp](double x) { return x - lp; }), rho, A);
    const auto m2 = minkowski(v.map([ap](double x) { return x - ap; }), rho, A);
    out.push_back({tagged("minkowski1.LP", "alpha", a), m1.in1, 2.0 * kPi * v2});
    out.push_back({tagged("minkowski2.AP", "alpha", a), m2.in2, 2.0 * A * v2});
  }
  for (const auto& tf : opts.test_functions) {
    const PeriodicField phi = kp.k().map(tf.phi);
    const PeriodicField phit = deriv(phi, 1);
    const double s1 = integrate(phi);
    const double s2 = integrate(phi * rho);
    const double q = integrate(phi * phi + phit * phit);
    const auto m = minkowski(phi, rho, A);
    out.push_back({"minkowski1[" + tf.name + "]", m.in1, s1 * s1 + 2.0 * kPi * q});
    out.push_back({"minkowski2[" + tf.name + "]", m.in2, s2 * s2 + 2.0 * A * q});
  }

  // Decreasing F(xi) = xi^(-1/a) with xi = k^a and measure dtheta.
  for (double a : opts.alphas) {
    const double lhs = power_integral(kp, a) * L;
    const double rhs = 2.0 * kPi * power_integral(kp, a - 1.0);
    out.push_back(make_margin(tagged("andrews", "alpha", a), lhs, rhs));
  }
  return out;
}

const std::vector<std::string>& DiagnosticsConfig::all_names() {
  static const std::vector<std::string> names{"radii",       "tso",     "gradient",
                                              "lower_bound", "entropy", "inequalities"};
  return names;
}

DiagnosticsConfig DiagnosticsConfig::from_names(const std::vector<std::string>& names) {
  DiagnosticsConfig c{false, false, false, false, false, false, {}};
  for (const auto& n : names) {
    if (n == "radii") c.radii = true;
    else if (n == "tso") c.tso = true;
    else if (n == "gradient") c.gradient = true;
    else if (n == "lower_bound") c.lower_bound = true;
    else if (n == "entropy") c.entropy = true;
    else if (n == "inequalities") c.inequalities = true;
    else throw ConfigError("unknown audit '" + n + "'");
  }
  return c;
}

std::vector<std::string> DiagnosticsConfig::enabled_names() const {
  std::vector<std::string> out;
  const bool flags[] = {radii, tso, gradient, lower_bound, entropy, inequalities};
  for (std::size_t i = 0; i < all_names().size(); ++i) {
    if (flags[i]) out.push_back(all_names()[i]);
  }
  return out;
}

const std::vector<std::string>& sample_field_names() {
  static const std::vector<std::string> names{
      "t",      "L",      "A",       "I",       "k_min",         "k_max",
      "lambda", "closure_defect",    "r_in",    "r_out",         "dA_dt_formula",
      "dL_dt_formula",    "Q_max",   "Psi_max", "Phi_max",       "entropy"};
  return names;
}

std::vector<double> sample_field_values(const SampleRecord& r) {
  return {r.t,      r.L,      r.A,       r.I,       r.k_min,         r.k_max,
          r.lambda, r.closure_defect,    r.r_in,    r.r_out,         r.dA_dt_formula,
          r.dL_dt_formula,    r.Q_max,   r.Psi_max, r.Phi_max,       r.entropy};
}

void DiagnosticsSeries::append(SampleRecord r) {
  if (!samples_.empty()) {
    if (!(r.t > samples_.back().t)) {
      throw DomainError("diagnostics samples must have strictly increasing t");
    }
    const auto& prev = samples_.back().margins;
    bool same = prev.size() == r.margins.size();
    for (std::size_t i = 0; same && i < prev.size(); ++i) same = prev[i].name == r.margins[i].name;
    if (!same) throw DomainError("diagnostics sample margin set changed mid-series");
  }
  samples_.push_back(std::move(r));
}

std::vector<std::string> DiagnosticsSeries::margin_names() const {
  std::vector<std::string> out;
  if (samples_.empty()) return out;
  for (const auto& m : samples_.front().margins) out.push_back(m.name);
  return out;
}

Sampler::Sampler(FlowLaw law, const CurvatureProfile& kp0, DiagnosticsConfig config)
    : law_(law), config_(std::move(config)), tso_(TsoContext::from_initial(kp0, law.alpha())) {}

SampleRecord Sampler::sample(const CurvatureProfile& kp, double t,
                             std::optional<double> accumulated) {
  SampleRecord r;
  r.t = t;
  const SupportRepresentation sup = support_about_centroid(kp);
  r.L = length(kp);
  r.A = area(kp);
  r.I = isoperimetric_ratio(r.L, r.A);
  const Extrema ext = refined_extrema(kp.k());
  r.k_min = ext.min.value;
  r.k_max = ext.max.value;
  r.lambda = lambda(law_, kp);
  r.closure_defect = closure_defect(kp);
  const RateFormulas rates = rate_formulas(law_, kp);
  r.dA_dt_formula = rates.dA_dt;
  r.dL_dt_formula = rates.dL_dt;

  r.r_in = r.r_out = kNaN;
  if (config_.radii) {
    const Radii radii = inradius_outradius(sup, guess_);
    r.r_in = radii.r_in;
    r.r_out = radii.r_out;
    // Optimal centers drift slowly relative to the centroid between samples.
    guess_ = RadiiGuess{radii.in_center, radii.out_center};
  }
  r.Q_max = kNaN;
  if (config_.tso) {
    const TsoQuantity q = tso_quantity(kp, sup, tso_);
    r.Q_max = q.Q_max;
    r.tso_precondition_ok = q.precondition_ok;
  }
  r.Psi_max = config_.gradient ? gradient_functional(kp, law_.alpha()) : kNaN;
  r.Phi_max = kNaN;
  if (config_.lower_bound) r.Phi_max = lower_bound_functional(kp, accumulated).value_or(kNaN);
  r.entropy = config_.entropy ? entropy(law_, kp).value : kNaN;
  if (config_.inequalities) r.margins = inequality_audit(kp, config_.audit);
  return r;
}

namespace {

void fail(std::vector<AuditFailure>& out, std::string check, double t, double value,
          double bound) {
  out.push_back({std::move(check), t, value, bound});
}

}  // namespace

std::vector<AuditFailure> audit_series(const FlowLaw& law, const DiagnosticsSeries& series,
                                       const TsoContext& ctx, const AuditThresholds& th) {
  std::vector<AuditFailure> out;
  if (series.empty()) return out;
  const auto& s = series.samples();
  const SampleRecord& s0 = s.front();
  const bool nonlocal = law.is_nonlocal();
  const bool gage_law = law.kind() == LawKind::G1 || law.kind() == LawKind::G2;
  const bool lp_ap = law.kind() == LawKind::LP || law.kind() == LawKind::AP;
  const Monotonicity ent_dir = entropy_direction(law);
  const double phi_scale = s0.L / (2.0 * kPi);

  double psi_run = s0.Psi_max;
  double v2_run = std::pow(s0.k_max, 2.0 * law.alpha());

  for (std::size_t i = 0; i < s.size(); ++i) {
    const SampleRecord& r = s[i];
    if (r.closure_defect > th.closure_rel * s0.L) {
      fail(out, "closure", r.t, r.closure_defect, th.closure_rel * s0.L);
    }
    if (law.kind() == LawKind::LP && std::abs(r.L - s0.L) > th.conservation_rel * s0.L) {
      fail(out, "length_conservation", r.t, r.L, s0.L);
    }
    if (law.kind() == LawKind::AP && std::abs(r.A - s0.A) > th.conservation_rel * s0.A) {
      fail(out, "area_conservation", r.t, r.A, s0.A);
    }
    for (const auto& m : r.margins) {
      if (!m.holds(th.margin_rel)) fail(out, "margin:" + m.name, r.t, m.value, -th.margin_rel * m.scale);
    }
    if (!std::isnan(r.r_in)) {
      const BonnesenWindow w = bonnesen_window(r.L, r.A);
      if (r.r_in < w.lower - th.bonnesen_abs) fail(out, "bonnesen.r_in", r.t, r.r_in, w.lower);
      if (r.r_out > w.upper + th.bonnesen_abs) fail(out, "bonnesen.r_out", r.t, r.r_out, w.upper);
      if (r.r_in > r.r_out + th.bonnesen_abs) fail(out, "bonnesen.order", r.t, r.r_in, r.r_out);
      const double sig = bonnesen_sigma(std::max(r.I, 1.0));
      if (r.r_out / r.r_in > sig + th.bonnesen_ratio_abs) {
        fail(out, "bonnesen.ratio", r.t, r.r_out / r.r_in, sig);
      }
    }
    if (!std::isnan(r.Q_max) && r.tso_precondition_ok && r.t > 0.0 && r.t <= ctx.T1) {
      const double b = ctx.bound(r.t) * (1.0 + th.comparison_rel);
      if (r.Q_max > b) fail(out, "tso_bound", r.t, r.Q_max, b);
    }
    if (lp_ap && !std::isnan(r.Psi_max)) {
      psi_run = std::max(psi_run, r.Psi_max);
      v2_run = std::max(v2_run, std::pow(r.k_max, 2.0 * law.alpha()));
      const double b = std::max(v2_run, s0.Psi_max) * (1.0 + th.comparison_rel);
      if (psi_run > b) fail(out, "gradient_bound", r.t, psi_run, b);
    }
    if (i == 0) continue;
    const SampleRecord& p = s[i - 1];
    const double rel = th.monotone_rel;
    if (nonlocal && r.I > p.I * (1.0 + rel)) fail(out, "isoperimetric_monotone", r.t, r.I, p.I);
    if (gage_law) {
      if (r.L > p.L * (1.0 + rel)) fail(out, "length_monotone", r.t, r.L, p.L);
      if (r.A < p.A * (1.0 - rel)) fail(out, "area_monotone", r.t, r.A, p.A);
    }
    if (!std::isnan(r.entropy) && !std::isnan(p.entropy)) {
      const double tol = rel * std::abs(p.entropy);
      if (ent_dir == Monotonicity::Increasing && r.entropy < p.entropy - tol) {
        fail(out, "entropy_monotone", r.t, r.entropy, p.entropy);
      }
      if (ent_dir == Monotonicity::Decreasing && r.entropy > p.entropy + tol) {
        fail(out, "entropy_monotone", r.t, r.entropy, p.entropy);
      }
      if (ent_dir == Monotonicity::Constant && std::abs(r.entropy - p.entropy) > tol) {
        fail(out, "entropy_constant", r.t, r.entropy, p.entropy);
      }
    }
    if (!std::isnan(r.Phi_max) && !std::isnan(p.Phi_max) &&
        r.Phi_max > p.Phi_max + rel * phi_scale) {
      fail(out, "lower_bound_monotone", r.t, r.Phi_max, p.Phi_max);
    }
  }
  return out;
}

}  // namespace kflow
