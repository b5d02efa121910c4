#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kflow/curve_model.hpp"
#include "kflow/flow_laws.hpp"

namespace kflow {

struct RateFormulas {
  double dA_dt;
  double dL_dt;
};

/// Instantaneous dA/dt and dL/dt. LP reports dL/dt = 0 and AP reports
/// dA/dt = 0 identically; G1, G2 and Contraction use
/// dL/dt = 2 pi lambda - int k^alpha, dA/dt = lambda L - int k^(alpha-1).
RateFormulas rate_formulas(const FlowLaw& law, const CurvatureProfile& kp);

/// Constants of the curvature upper-bound argument, fixed by the initial curve.
struct TsoContext {
  double alpha = 1.0;
  double beta = 0.0;   ///< (1/2)^((2+a)/(1+a)) sigma^-1 sqrt(A0/pi)
  double sigma = 1.0;  ///< (sqrt(I0) + sqrt(I0 - 1))^2
  double T1 = 0.0;     ///< (1/(2+2a)) (sigma^-1 sqrt(A0/pi))^(1+a)
  double Q0 = 0.0;     ///< [2(a+1) / (a beta^(1+1/a))]^a

  static TsoContext from_initial(const CurvatureProfile& kp0, double alpha);
  /// max{Q0, 1/((alpha+1) t)}.
  double bound(double t) const;
};

struct TsoQuantity {
  double Q_max;          ///< NaN when u <= beta somewhere
  bool precondition_ok;  ///< min u >= 2 beta
  double u_min;
};

/// Q = k^alpha / (u - beta), u taken about the area centroid.
TsoQuantity tso_quantity(const CurvatureProfile& kp, const SupportRepresentation& support,
                         const TsoContext& ctx);
TsoQuantity tso_quantity(const CurvatureProfile& kp, const TsoContext& ctx);

/// max over theta of v^2 + v_theta^2, v = k^alpha.
double gradient_functional(const CurvatureProfile& kp, double alpha);

/// max over theta of 1/k - L/2pi - J/2pi, where J is the running time
/// integral of int k^alpha dtheta. Without an accumulator there is nothing to
/// evaluate and the result is empty.
std::optional<double> lower_bound_functional(const CurvatureProfile& kp,
                                             std::optional<double> accumulated);

enum class Monotonicity { Increasing, Decreasing, Constant, Unspecified };

std::string_view to_string(Monotonicity m);

struct EntropyValue {
  double value;  ///< NaN for laws without an entropy estimate
  Monotonicity direction;
};

/// Direction of the law's entropy estimate; Unspecified for G1, G2 and
/// Contraction.
Monotonicity entropy_direction(const FlowLaw& law);

/// LP: int k^(alpha-1). AP: L^(alpha-1) int k^(alpha-1), or int log(kL) at
/// alpha = 1. Increasing iff alpha < 1, except the two alpha = 1 cases.
EntropyValue entropy(const FlowLaw& law, const CurvatureProfile& kp);

/// An audited inequality arranged as (large side) - (small side).
struct Margin {
  std::string name;
  double value;
  double scale;  ///< magnitude of the dominant term

  bool holds(double rel_slack = 1e-9) const { return value >= -rel_slack * scale; }
};

/// User-supplied C^2 test function for the Minkowski inequalities.
struct TestFunction {
  std::string name;
  std::function<double(double)> phi;
};

struct AuditOptions {
  std::vector<double> exponents{0.0, 0.5, 1.0, 2.0, 3.0};
  /// Curvature powers for the Hoelder, Minkowski and Andrews instances; the
  /// G1/G2 sandwich inequalities use the entries >= 1.
  std::vector<double> alphas{0.5, 1.0, 2.0, 3.0};
  std::vector<TestFunction> test_functions;
};

std::vector<Margin> inequality_audit(const CurvatureProfile& kp, const AuditOptions& opts = {});

/// Which optional diagnostics a run computes.
struct DiagnosticsConfig {
  bool radii = true;
  bool tso = true;
  bool gradient = true;
  bool lower_bound = true;
  bool entropy = true;
  bool inequalities = true;
  AuditOptions audit;

  static const std::vector<std::string>& all_names();
  /// Throws ConfigError on unknown names.
  static DiagnosticsConfig from_names(const std::vector<std::string>& names);
  std::vector<std::string> enabled_names() const;
};

struct SampleRecord {
  double t = 0.0;
  double L = 0.0;
  double A = 0.0;
  double I = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
  double lambda = 0.0;
  double closure_defect = 0.0;
  double r_in = 0.0;
  double r_out = 0.0;
  double dA_dt_formula = 0.0;
  double dL_dt_formula = 0.0;
  double Q_max = 0.0;
  double Psi_max = 0.0;
  double Phi_max = 0.0;
  double entropy = 0.0;
  bool tso_precondition_ok = false;
  std::vector<Margin> margins;
};

/// Column names of SampleRecord's scalar fields, in CSV order.
const std::vector<std::string>& sample_field_names();
/// Scalar fields of a record in sample_field_names() order.
std::vector<double> sample_field_values(const SampleRecord& r);

class DiagnosticsSeries {
 public:
  /// Throws DomainError unless t strictly increases and the margin names
  /// match the earlier samples.
  void append(SampleRecord r);

  const std::vector<SampleRecord>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  const SampleRecord& front() const { return samples_.front(); }
  const SampleRecord& back() const { return samples_.back(); }
  std::vector<std::string> margin_names() const;

  void add_note(std::string note) { notes_.push_back(std::move(note)); }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<SampleRecord> samples_;
  std::vector<std::string> notes_;
};

/// Computes SampleRecords along one run; keeps the previous radii centers to
/// warm-start the next descent.
class Sampler {
 public:
  Sampler(FlowLaw law, const CurvatureProfile& kp0, DiagnosticsConfig config);

  SampleRecord sample(const CurvatureProfile& kp, double t, std::optional<double> accumulated);

  const TsoContext& tso_context() const { return tso_; }
  const DiagnosticsConfig& config() const { return config_; }

 private:
  FlowLaw law_;
  DiagnosticsConfig config_;
  TsoContext tso_;
  std::optional<RadiiGuess> guess_;
};

struct AuditFailure {
  std::string check;
  double t;
  double value;
  double bound;
};

/// Tolerances of the per-sample audits.
struct AuditThresholds {
  double monotone_rel = 1e-9;
  double conservation_rel = 1e-6;
  double closure_rel = 1e-6;  ///< times L(0)
  double margin_rel = 1e-9;
  double bonnesen_abs = 1e-8;
  double bonnesen_ratio_abs = 1e-6;
  double comparison_rel = 1e-6;  ///< Tso and gradient max-comparisons
};

/// Checks a recorded series against every monotone, conserved and bounded
/// quantity that applies to the law.
std::vector<AuditFailure> audit_series(const FlowLaw& law, const DiagnosticsSeries& series,
                                       const TsoContext& ctx, const AuditThresholds& th = {});

}  // namespace kflow
