#include "kflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double max_value(const CurvatureProfile& kp) {
  const auto v = kp.values();
  return *std::max_element(v.begin(), v.end());
}

CurvatureProfile axpy(const CurvatureProfile& kp, double h, const PeriodicField& d) {
  std::vector<double> out(kp.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = kp[j] + h * d[j];
  for (double x : out) {
    if (!std::isfinite(x)) throw BlowUpError(max_value(kp));
  }
  return CurvatureProfile(kp.grid(), std::move(out));
}

struct Stage {
  PeriodicField rhs;
  double power_integral;
};

Stage stage(const FlowLaw& law, const CurvatureProfile& kp) {
  return {curvature_rhs(law, kp), integrate(curvature_power(kp, law.alpha()))};
}

}  // namespace

void StepControl::validate() const {
  if (!(safety > 0.0 && safety <= 1.0)) {
    throw ConfigError("safety must lie in (0, 1], got " + std::to_string(safety));
  }
  if (!(dt_min > 0.0) || !(dt_min <= dt_max)) {
    throw ConfigError("step bounds require 0 < dt_min <= dt_max");
  }
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (!(convergence_tol > 0.0)) throw ConfigError("convergence_tol must be > 0");
  if (!(blowup_k > 0.0)) throw ConfigError("blowup_k must be > 0");
}

double stability_bound(const FlowLaw& law, const CurvatureProfile& kp, double safety) {
  const double h = kp.grid().spacing();
  const double a = law.alpha();
  return safety * h * h / (a * std::pow(max_value(kp), a + 1.0));
}

double stable_dt(const FlowLaw& law, const CurvatureProfile& kp, const StepControl& ctl) {
  const double bound = stability_bound(law, kp, ctl.safety);
  if (bound < ctl.dt_min) {
    throw ConfigError("stability bound " + std::to_string(bound) + " lies below dt_min " +
                      std::to_string(ctl.dt_min));
  }
  return std::min(bound, ctl.dt_max);
}

StepResult advance(const FlowLaw& law, const CurvatureProfile& kp, double dt) {
  const Stage s1 = stage(law, kp);
  const Stage s2 = stage(law, axpy(kp, 0.5 * dt, s1.rhs));
  const Stage s3 = stage(law, axpy(kp, 0.5 * dt, s2.rhs));
  const Stage s4 = stage(law, axpy(kp, dt, s3.rhs));
  std::vector<double> out(kp.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = kp[j] + dt / 6.0 * (s1.rhs[j] + 2.0 * s2.rhs[j] + 2.0 * s3.rhs[j] + s4.rhs[j]);
    if (!std::isfinite(out[j])) throw BlowUpError(max_value(kp));
  }
  const double acc = dt / 6.0 *
                     (s1.power_integral + 2.0 * s2.power_integral + 2.0 * s3.power_integral +
                      s4.power_integral);
  return {CurvatureProfile(kp.grid(), std::move(out)), acc};
}

CurvatureProfile step(const FlowLaw& law, const CurvatureProfile& kp, double dt) {
  return advance(law, kp, dt).k;
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::TimeLimit: return "TimeLimit";
    case RunStatus::StepLimit: return "StepLimit";
    case RunStatus::BlowUp: return "BlowUp";
    case RunStatus::ConvexityLost: return "ConvexityLost";
  }
  return "?";
}

RunStatus run_status_from_string(std::string_view name) {
  for (RunStatus s : {RunStatus::Converged, RunStatus::TimeLimit, RunStatus::StepLimit,
                      RunStatus::BlowUp, RunStatus::ConvexityLost}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown run status '" + std::string(name) + "'");
}

double relative_oscillation(const CurvatureProfile& kp) {
  const Extrema e = refined_extrema(kp.k());
  const double mean = integrate(kp.k()) / (2.0 * std::numbers::pi);
  return (e.max.value - e.min.value) / mean;
}

namespace {

double grid_oscillation(const CurvatureProfile& kp) {
  const auto v = kp.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  return (*hi - *lo) / (sum / static_cast<double>(v.size()));
}

bool converged(const CurvatureProfile& kp, double tol) {
  // The grid oscillation never exceeds the interpolant's, so it screens cheaply.
  return grid_oscillation(kp) <= tol && relative_oscillation(kp) <= tol;
}

class Recorder {
 public:
  Recorder(const FlowLaw& law, const CurvatureProfile& kp0, const RunOptions& opts,
           RunResult& result)
      : sampler_(law, kp0, opts.diagnostics), opts_(opts), result_(result) {}

  void sample(const CurvatureProfile& kp, double t, double accumulated) {
    if (taken_ && t <= last_t_) return;
    result_.series.append(sampler_.sample(kp, t, accumulated));
    if (opts_.snapshot_every > 0 && count_ % opts_.snapshot_every == 0) {
      result_.snapshots.push_back({result_.snapshots.size(), t, kp});
    }
    ++count_;
    taken_ = true;
    last_t_ = t;
  }

 private:
  Sampler sampler_;
  const RunOptions& opts_;
  RunResult& result_;
  std::int64_t count_ = 0;
  bool taken_ = false;
  double last_t_ = 0.0;
};

}  // namespace

RunResult run(const FlowLaw& law, const CurvatureProfile& kp0, double t_end,
              const RunOptions& opts) {
  opts.control.validate();
  if (!(t_end > 0.0)) throw ConfigError("t_end must be > 0");
  if (opts.sample_every < 1) throw ConfigError("sample_every must be >= 1");
  if (opts.snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
  const StepControl& ctl = opts.control;
  stable_dt(law, kp0, ctl);

  std::vector<double> records;
  for (double r : opts.record_times) {
    if (r > 0.0 && r < t_end) records.push_back(r);
  }
  std::sort(records.begin(), records.end());
  records.erase(std::unique(records.begin(), records.end()), records.end());
  std::size_t next_record = 0;

  RunResult result{RunStatus::TimeLimit, kp0, {}, 0.0, 0, {}, {}};
  Recorder rec(law, kp0, opts, result);
  CurvatureProfile kp = kp0;
  double t = 0.0;
  double acc = 0.0;
  rec.sample(kp, t, acc);

  auto finish = [&](RunStatus status, std::string message) {
    result.status = status;
    result.message = std::move(message);
    result.final = kp;
    result.t_final = t;
    rec.sample(kp, t, acc);
    return result;
  };

  if (law.is_nonlocal() && converged(kp, ctl.convergence_tol)) {
    return finish(RunStatus::Converged, "initial curvature already within tolerance");
  }

  std::int64_t steps = 0;
  while (t < t_end) {
    if (steps >= ctl.max_steps) {
      result.steps = steps;
      return finish(RunStatus::StepLimit, "step cap reached");
    }
    const double bound = stability_bound(law, kp, ctl.safety);
    if (bound < ctl.dt_min) {
      result.steps = steps;
      return finish(RunStatus::BlowUp, "stability bound " + std::to_string(bound) +
                                           " fell below dt_min; curvature is blowing up");
    }
    double target = t_end;
    bool at_record = false;
    if (next_record < records.size() && records[next_record] < target) {
      target = records[next_record];
      at_record = true;
    }
    double dt = std::min(bound, ctl.dt_max);
    bool clipped = false;
    if (t + dt >= target) {
      dt = target - t;
      clipped = true;
    }

    StepResult sr{kp, 0.0};
    try {
      sr = advance(law, kp, dt);
      if (opts.projection) sr.k = project_closure(sr.k);
    } catch (const ConvexityError& e) {
      result.steps = steps;
      return finish(RunStatus::ConvexityLost, e.what());
    } catch (const BlowUpError& e) {
      result.steps = steps;
      return finish(RunStatus::BlowUp, e.what());
    } catch (const NonFiniteError& e) {
      result.steps = steps;
      return finish(RunStatus::BlowUp, e.what());
    }
    if (max_value(sr.k) > ctl.blowup_k) {
      result.steps = steps + 1;
      return finish(RunStatus::BlowUp, "curvature exceeded blowup_k");
    }

    kp = std::move(sr.k);
    acc += sr.accumulated;
    t = clipped ? target : t + dt;
    ++steps;
    result.steps = steps;
    if (clipped && at_record) ++next_record;

    if (law.is_nonlocal() && converged(kp, ctl.convergence_tol)) {
      return finish(RunStatus::Converged, "curvature oscillation within tolerance");
    }
    if (steps % opts.sample_every == 0 || (clipped && at_record)) rec.sample(kp, t, acc);
  }
  return finish(RunStatus::TimeLimit, "reached t_end");
}

DecayFit fit_decay_rate(const DiagnosticsSeries& series) {
  DecayFit fit{kNaN, 0};
  if (series.empty()) return fit;
  const double last = series.back().k_max - series.back().k_min;
  if (!(last > 0.0) || !std::isfinite(last)) return fit;
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  const auto& s = series.samples();
  for (auto it = s.rbegin(); it != s.rend(); ++it) {
    const SampleRecord& r = *it;
    const double osc = r.k_max - r.k_min;
    if (!(osc > 0.0) || osc > 10.0 * last) break;
    const double y = std::log(osc);
    n += 1;
    st += r.t;
    sy += y;
    stt += r.t * r.t;
    sty += r.t * y;
  }
  fit.points = static_cast<std::size_t>(n);
  const double den = n * stt - st * st;
  if (n < 3 || !(den > 0.0)) return fit;
  fit.rate = (n * sty - st * sy) / den;
  return fit;
}

}  // namespace kflow
