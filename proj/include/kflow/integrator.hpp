#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kflow/diagnostics.hpp"

namespace kflow {

struct StepControl {
  double safety = 0.25;
  double dt_min = 1e-14;
  double dt_max = 1e-2;
  std::int64_t max_steps = 5'000'000;
  double convergence_tol = 1e-3;  ///< on (k_max - k_min) / k_mean
  double blowup_k = 1e6;

  /// Throws ConfigError unless 0 < safety <= 1, 0 < dt_min <= dt_max and the
  /// remaining fields are positive.
  void validate() const;
  bool operator==(const StepControl&) const = default;
};

/// clamp(safety dtheta^2 / (alpha max k^(alpha+1)), dt_min, dt_max). Throws
/// ConfigError when the stability bound lies below dt_min.
double stable_dt(const FlowLaw& law, const CurvatureProfile& kp, const StepControl& ctl);

/// Unclamped stability bound safety dtheta^2 / (alpha max k^(alpha+1)).
double stability_bound(const FlowLaw& law, const CurvatureProfile& kp, double safety);

struct StepResult {
  CurvatureProfile k;
  /// dt-weighted quadrature of int k^alpha dtheta over the step, using the
  /// stage weights of the update.
  double accumulated;
};

/// One classical four-stage update with lambda recomputed at every stage.
/// Throws ConvexityError if any stage leaves k non-positive and BlowUpError
/// on overflow.
StepResult advance(const FlowLaw& law, const CurvatureProfile& kp, double dt);

CurvatureProfile step(const FlowLaw& law, const CurvatureProfile& kp, double dt);

enum class RunStatus { Converged, TimeLimit, StepLimit, BlowUp, ConvexityLost };

std::string_view to_string(RunStatus s);
RunStatus run_status_from_string(std::string_view name);

/// (k_max - k_min) / k_mean with k_mean = (1/2pi) int k and extrema of the
/// trigonometric interpolant.
double relative_oscillation(const CurvatureProfile& kp);

struct CurveSnapshot {
  std::size_t index = 0;
  double t = 0.0;
  CurvatureProfile k;
};

struct RunOptions {
  StepControl control;
  DiagnosticsConfig diagnostics;
  std::int64_t sample_every = 10;  ///< steps between samples
  std::int64_t snapshot_every = 0;  ///< samples between snapshots; 0 disables
  bool projection = false;          ///< re-project closure after every step
  /// Times at which a sample is taken exactly; the step is shortened to hit them.
  std::vector<double> record_times;
};

struct RunResult {
  RunStatus status = RunStatus::TimeLimit;
  CurvatureProfile final;
  DiagnosticsSeries series;
  double t_final = 0.0;
  std::int64_t steps = 0;
  std::string message;
  std::vector<CurveSnapshot> snapshots;
};

/// Advances kp0 to t_end unless it converges (nonlocal laws only), a guard
/// trips, or the step cap is reached. Samples at t = 0, every sample_every
/// steps, at each record time and at the final time. On a guard trip `final`
/// is the last good state.
RunResult run(const FlowLaw& law, const CurvatureProfile& kp0, double t_end,
              const RunOptions& opts = {});

struct DecayFit {
  double rate = 0.0;  ///< slope of log(k_max - k_min) against t
  std::size_t points = 0;
};

/// Least-squares rate over the trailing samples whose oscillation is within a
/// factor ten of the last one. Rate is NaN with fewer than three usable points.
DecayFit fit_decay_rate(const DiagnosticsSeries& series);

}  // namespace kflow
