#pragma once

#include <string>
#include <string_view>

#include "kflow/curve_model.hpp"

namespace kflow {

enum class LawKind { LP, AP, G1, G2, Contraction };

std::string_view to_string(LawKind kind);
/// Throws ConfigError on unknown names.
LawKind law_kind_from_string(std::string_view name);

/// Speed law k^alpha - lambda(t) with one of five nonlocal terms.
///   LP: (1/2pi) int k^alpha dtheta
///   AP: (int k^-1 dtheta)^-1 int k^(alpha-1) dtheta
///   G1: 2A/L^2 int k^alpha dtheta
///   G2: L/(4 pi A) int k^(alpha-1) dtheta
///   Contraction: 0
class FlowLaw {
 public:
  /// alpha > 0 for every law, alpha >= 1 for G1/G2; ConfigError otherwise.
  FlowLaw(LawKind kind, double alpha);

  LawKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  /// True for the four laws whose lambda keeps circles stationary.
  bool is_nonlocal() const { return kind_ != LawKind::Contraction; }

  bool operator==(const FlowLaw&) const = default;

 private:
  LawKind kind_;
  double alpha_;
};

/// k^p evaluated as exp(p log k).
PeriodicField curvature_power(const CurvatureProfile& kp, double p);

double lambda(const FlowLaw& law, const CurvatureProfile& kp);

/// Inward normal speed k^alpha - lambda.
PeriodicField normal_speed(const FlowLaw& law, const CurvatureProfile& kp);

/// k_t = k^2 [(k^alpha)_thth + k^alpha - lambda]. Throws BlowUpError when the
/// result overflows.
PeriodicField curvature_rhs(const FlowLaw& law, const CurvatureProfile& kp);

/// Same, with lambda supplied by the caller.
PeriodicField curvature_rhs(const FlowLaw& law, const CurvatureProfile& kp, double lam);

}  // namespace kflow
