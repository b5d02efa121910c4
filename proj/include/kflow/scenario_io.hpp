#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kflow/initial_curves.hpp"
#include "kflow/integrator.hpp"

namespace kflow {

struct Scenario {
  FlowLaw law{LawKind::LP, 1.0};
  CurveSpec curve;
  StepControl control;
  double t_end = 1.0;
  std::int64_t sample_every = 10;
  std::int64_t snapshot_every = 0;
  std::string output_dir = "out";
  std::vector<std::string> audits = DiagnosticsConfig::all_names();
  bool projection = false;
  std::vector<double> record_times;

  RunOptions run_options() const;
  bool operator==(const Scenario&) const = default;
};

/// Parses a scenario document. Unknown keys at any level are rejected by
/// name; missing required keys (law.kind, law.alpha, curve, t_end) are all
/// listed in one ConfigError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Full echo with every default spelled out; parse_scenario reads it back
/// to an equal Scenario.
std::string scenario_to_json(const Scenario& s);

/// Curve object as it appears under "curve" in a scenario.
CurveSpec parse_curve_spec(std::string_view text);
std::string curve_spec_to_json(const CurveSpec& spec);

struct Manifest {
  std::vector<std::string> files;
  RunStatus status = RunStatus::TimeLimit;
  double t_final = 0.0;
};

/// Writes series.csv, scenario.json, curve_{i}.json and curve_{i}.svg for
/// every snapshot, and manifest.json into `dir`. Content depends only on the
/// inputs. Throws IoError naming the path on failure.
Manifest emit(const Scenario& scenario, const RunResult& result, const std::filesystem::path& dir);

/// Header and rows of series.csv.
std::string series_csv(const DiagnosticsSeries& series);

/// Radius of the circle a run is expected to approach: L(0)/2pi for LP,
/// sqrt(A(0)/pi) for AP, sqrt(A/pi) of the current curve otherwise.
double limit_radius(const FlowLaw& law, double L0, double A0, const CurvatureProfile& kp);

/// Standalone SVG of the snapshot curve and the limit circle about its
/// centroid. Written through a temporary file; on failure nothing is left at
/// or next to `path`.
void render_snapshot(const CurveSnapshot& snap, double limit_radius,
                     const std::filesystem::path& path);

struct SweepEntry {
  double alpha = 0.0;
  RunStatus status = RunStatus::TimeLimit;
  double t_converge = 0.0;  ///< NaN unless Converged
  double final_oscillation = 0.0;
  double decay_rate = 0.0;
  std::string subdir;
  std::string error;  ///< set when the run could not start
};

/// One run per alpha on `threads` workers, each emitted into its own
/// subdirectory of `dir`, plus summary.csv. Entries follow `alphas` order.
std::vector<SweepEntry> run_sweep(const Scenario& base, const std::vector<double>& alphas,
                                  const std::filesystem::path& dir, unsigned threads = 0);

}  // namespace kflow
