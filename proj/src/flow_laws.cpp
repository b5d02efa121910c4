#include "kflow/flow_laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kflow {

std::string_view to_string(LawKind kind) {
  switch (kind) {
    case LawKind::LP: return "LP";
    case LawKind::AP: return "AP";
    case LawKind::G1: return "G1";
    case LawKind::G2: return "G2";
    case LawKind::Contraction: return "Contraction";
  }
  return "?";
}

LawKind law_kind_from_string(std::string_view name) {
  for (LawKind k : {LawKind::LP, LawKind::AP, LawKind::G1, LawKind::G2, LawKind::Contraction}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown flow law kind '" + std::string(name) +
                    "' (expected LP, AP, G1, G2 or Contraction)");
}

FlowLaw::FlowLaw(LawKind kind, double alpha) : kind_(kind), alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("alpha must be > 0, got " + std::to_string(alpha));
  }
  if ((kind == LawKind::G1 || kind == LawKind::G2) && alpha < 1.0) {
    throw ConfigError("alpha must be ≥ 1 for G1/G2, got " + std::to_string(alpha));
  }
}

PeriodicField curvature_power(const CurvatureProfile& kp, double p) {
  return kp.k().map([p](double k) { return std::exp(p * std::log(k)); });
}

double lambda(const FlowLaw& law, const CurvatureProfile& kp) {
  const double a = law.alpha();
  switch (law.kind()) {
    case LawKind::LP:
      return integrate(curvature_power(kp, a)) / (2.0 * std::numbers::pi);
    case LawKind::AP:
      return integrate(curvature_power(kp, a - 1.0)) / length(kp);
    case LawKind::G1: {
      const double L = length(kp);
      return 2.0 * area(kp) / (L * L) * integrate(curvature_power(kp, a));
    }
    case LawKind::G2: {
      const double L = length(kp);
      return L / (4.0 * std::numbers::pi * area(kp)) * integrate(curvature_power(kp, a - 1.0));
    }
    case LawKind::Contraction:
      return 0.0;
  }
  return 0.0;
}

PeriodicField normal_speed(const FlowLaw& law, const CurvatureProfile& kp) {
  const double lam = lambda(law, kp);
  return curvature_power(kp, law.alpha()).map([lam](double v) { return v - lam; });
}

namespace {

[[noreturn]] void blow_up(const CurvatureProfile& kp) {
  const auto vals = kp.values();
  throw BlowUpError(*std::max_element(vals.begin(), vals.end()));
}

}  // namespace

PeriodicField curvature_rhs(const FlowLaw& law, const CurvatureProfile& kp, double lam) {
  const double a = law.alpha();
  std::vector<double> v(kp.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = std::exp(a * std::log(kp[j]));
    if (!std::isfinite(v[j])) blow_up(kp);
  }
  const PeriodicField vf(kp.grid(), std::move(v));
  const PeriodicField vpp = deriv(vf, 2);
  std::vector<double> out(kp.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = kp[j] * kp[j] * (vpp[j] + vf[j] - lam);
    if (!std::isfinite(out[j])) blow_up(kp);
  }
  return PeriodicField(kp.grid(), std::move(out));
}

PeriodicField curvature_rhs(const FlowLaw& law, const CurvatureProfile& kp) {
  return curvature_rhs(law, kp, lambda(law, kp));
}

}  // namespace kflow
