// Acceptance suite: one PASS/FAIL line per criterion. Optional numeric
// arguments pick a subset of criteria. The exit code reflects gating failures
// only with --strict; otherwise it is nonzero only if the suite cannot run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "kflow/initial_curves.hpp"
#include "kflow/integrator.hpp"
#include "reference/reference.hpp"

using namespace kflow;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlphas[] = {0.5, 1.0, 2.0, 3.0};

struct Case {
  std::string name;
  FlowLaw law;
  CurvatureProfile kp0;
  RunResult result;
  double seconds = 0.0;
};

std::string label(const FlowLaw& law, const std::string& extra = "") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s[alpha=%g]%s", std::string(to_string(law.kind())).c_str(),
                law.alpha(), extra.c_str());
  return buf;
}

Case run_case(std::string name, const FlowLaw& law, const CurveSpec& spec, double t_end,
              const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const CurvatureProfile kp0 = generate(spec);
  Case c{std::move(name), law, kp0, run(law, kp0, t_end, opts)};
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "  ran %-28s %-10s t=%-10.5g steps=%-8lld samples=%-6zu %.1fs\n",
               c.name.c_str(), std::string(to_string(c.result.status)).c_str(),
               c.result.t_final, static_cast<long long>(c.result.steps), c.result.series.size(),
               c.seconds);
  return c;
}

CurveSpec ellipse(std::size_t n) { return CurveSpec{Ellipse{2.0, 1.0}, n}; }

// Shared time grid for comparing runs at different resolutions.
std::vector<double> matched_grid(double t_end) {
  std::vector<double> ts;
  for (int i = 1; 0.25 * i < t_end; ++i) ts.push_back(0.25 * i);
  return ts;
}

constexpr double kFlowEnd = 60.0;

struct Report {
  int gating_failures = 0;

  void line(bool pass, int id, const std::string& title, const std::string& detail,
            bool gating = true) {
    std::printf("%s %2d %-34s %s%s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(),
                gating ? "" : " (informational)");
    std::fflush(stdout);
    if (!pass && gating) ++gating_failures;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Lazily built runs shared across criteria.
class Runs {
 public:
  const std::vector<Case>& contraction() {
    if (contraction_.empty()) {
      for (double a : {0.5, 1.0, 2.0}) {
        RunOptions o;
        o.diagnostics = DiagnosticsConfig::from_names({});
        o.sample_every = 50;
        const double t = 0.9 * reference::extinction_time(1.0, a);
        contraction_.push_back(run_case(label(FlowLaw(LawKind::Contraction, a)),
                                        FlowLaw(LawKind::Contraction, a),
                                        CurveSpec{Circle{1.0}, 256}, t, o));
      }
    }
    return contraction_;
  }

  // LP and AP from the ellipse, n = 256, full diagnostics.
  const std::vector<Case>& base() {
    if (base_.empty()) {
      for (LawKind kind : {LawKind::LP, LawKind::AP}) {
        for (double a : kAlphas) {
          RunOptions o;
          o.sample_every = 10;
          o.record_times = matched_grid(kFlowEnd);
          base_.push_back(run_case(label(FlowLaw(kind, a)), FlowLaw(kind, a), ellipse(256),
                                   kFlowEnd, o));
        }
      }
    }
    return base_;
  }

  // The base runs repeated at n = 512 with half the safety factor; samples
  // every 80 steps keep the sample spacing in time equal to the base runs.
  const std::vector<Case>& fine() {
    if (fine_.empty()) {
      for (LawKind kind : {LawKind::LP, LawKind::AP}) {
        for (double a : kAlphas) {
          RunOptions o;
          o.sample_every = 80;
          o.control.safety = 0.125;
          o.record_times = matched_grid(kFlowEnd);
          fine_.push_back(run_case(label(FlowLaw(kind, a), "/n512"), FlowLaw(kind, a),
                                   ellipse(512), kFlowEnd, o));
        }
      }
    }
    return fine_;
  }

  const std::vector<Case>& gage() {
    if (gage_.empty()) {
      for (LawKind kind : {LawKind::G1, LawKind::G2}) {
        for (double a : {1.0, 2.0}) {
          RunOptions o;
          o.sample_every = 10;
          gage_.push_back(run_case(label(FlowLaw(kind, a)), FlowLaw(kind, a), ellipse(256),
                                   kFlowEnd, o));
        }
      }
    }
    return gage_;
  }

  const Case& tso() {
    if (tso_.empty()) {
      const FlowLaw law(LawKind::LP, 1.0);
      const TsoContext ctx = TsoContext::from_initial(generate(ellipse(256)), 1.0);
      RunOptions o;
      o.diagnostics = DiagnosticsConfig::from_names({"tso", "lower_bound"});
      o.sample_every = 1;
      tso_.push_back(run_case(label(law, "/tso"), law, ellipse(256), ctx.T1, o));
    }
    return tso_.front();
  }

  std::vector<const Case*> all_built() const {
    std::vector<const Case*> out;
    for (const auto* v : {&contraction_, &base_, &fine_, &gage_, &tso_}) {
      for (const auto& c : *v) out.push_back(&c);
    }
    return out;
  }

 private:
  std::vector<Case> contraction_, base_, fine_, gage_, tso_;
};

void criterion1(Runs& runs, Report& rep) {
  double worst = 0.0;
  bool ok = true;
  for (const Case& c : runs.contraction()) {
    ok = ok && c.result.status == RunStatus::TimeLimit;
    const double a = c.law.alpha();
    for (const auto& s : c.result.series.samples()) {
      const double exact = 1.0 / reference::contraction_radius(1.0, a, s.t);
      worst = std::max({worst, std::abs(s.k_max - exact) / exact, std::abs(s.k_min - exact) / exact});
    }
    const double exact = 1.0 / reference::contraction_radius(1.0, a, c.result.t_final);
    for (double k : c.result.final.values()) worst = std::max(worst, std::abs(k - exact) / exact);
  }
  rep.line(ok && worst <= 1e-6, 1, "contraction exact solution",
           fmt("max rel err %.3g (tol 1e-6) over alpha 0.5,1,2 to 0.9 extinction", worst));
}

void criterion2(Runs& runs, Report& rep) {
  double worst_l = 0.0, worst_a = 0.0;
  for (const Case& c : runs.base()) {
    const auto& s = c.result.series;
    for (const auto& r : s.samples()) {
      if (c.law.kind() == LawKind::LP) {
        worst_l = std::max(worst_l, std::abs(r.L - s.front().L) / s.front().L);
      } else {
        worst_a = std::max(worst_a, std::abs(r.A - s.front().A) / s.front().A);
      }
    }
  }
  rep.line(worst_l <= 1e-6 && worst_a <= 1e-6, 2, "LP length / AP area conservation",
           fmt("max drift L %.3g, A %.3g (tol 1e-6)", worst_l, worst_a));
}

void criterion3(Runs& runs, Report& rep) {
  double worst = 0.0;
  int converged = 0, total = 0;
  for (const Case& c : runs.base()) {
    ++total;
    converged += c.result.status == RunStatus::Converged;
    const double target = c.law.kind() == LawKind::LP
                              ? 2.0 * kPi / c.result.series.front().L
                              : std::sqrt(kPi / c.result.series.front().A);
    const Extrema e = refined_extrema(c.result.final.k());
    worst = std::max({worst, std::abs(e.max.value - target) / target,
                      std::abs(e.min.value - target) / target});
  }
  rep.line(converged == total && worst <= 1e-3, 3, "convergence to the limit circle",
           fmt("%g/%g Converged, max rel deviation %.3g (tol 1e-3)", converged, total, worst));
}

bool is_monotonicity_check(const std::string& check) {
  static const std::set<std::string> names{
      "isoperimetric_monotone", "length_monotone",      "area_monotone", "entropy_monotone",
      "entropy_constant",       "lower_bound_monotone", "gradient_bound"};
  return names.count(check) > 0;
}

void criterion4(Runs& runs, Report& rep) {
  int failures = 0;
  std::size_t samples = 0;
  std::string first;
  std::vector<const Case*> cases;
  for (const Case& c : runs.base()) cases.push_back(&c);
  for (const Case& c : runs.gage()) cases.push_back(&c);
  for (const Case* c : cases) {
    samples += c->result.series.size();
    const auto ctx = TsoContext::from_initial(c->kp0, c->law.alpha());
    for (const auto& f : audit_series(c->law, c->result.series, ctx)) {
      if (!is_monotonicity_check(f.check)) continue;
      if (failures++ == 0) first = " first: " + c->name + " " + f.check + fmt(" t=%.6g", f.t);
    }
  }
  rep.line(failures == 0, 4, "monotonicity suite",
           fmt("%g violations over %g samples of LP/AP/G1/G2 runs", failures,
               static_cast<double>(samples)) +
               first);
}

void criterion5(Runs& runs, Report& rep) {
  const Case& c = runs.tso();
  const TsoContext ctx = TsoContext::from_initial(c.kp0, 1.0);
  int checked = 0, violations = 0;
  double worst = -1e300;
  for (const auto& r : c.result.series.samples()) {
    if (!(r.t > 0.0 && r.t <= ctx.T1) || !r.tso_precondition_ok) continue;
    ++checked;
    const double b = ctx.bound(r.t);
    worst = std::max(worst, r.Q_max / b);
    if (r.Q_max > b * (1.0 + 1e-6)) ++violations;
  }
  rep.line(checked > 0 && violations == 0, 5, "curvature upper bound on (0, T1]",
           fmt("%g samples, max Q/bound %.6g, T1 %.6g", checked, worst, ctx.T1));
}

void criterion6(Report& rep) {
  const auto start = std::chrono::steady_clock::now();
  int violations = 0;
  std::size_t margins = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const RandomConvex rc{seed};
    const auto kp = random_convex(seed, rc.r0, rc.max_mode, 0.8);
    for (const auto& m : inequality_audit(kp)) {
      ++margins;
      if (!m.holds(1e-9) && violations++ == 0) {
        first = fmt(" first: seed %g ", static_cast<double>(seed)) + m.name;
      }
    }
  }
  double circle_worst = 0.0;
  for (double r : {0.5, 1.0, 2.0}) {
    for (const auto& m : inequality_audit(generate(CurveSpec{Circle{r}, 256}))) {
      circle_worst = std::max(circle_worst, std::abs(m.value) / m.scale);
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.line(violations == 0 && circle_worst <= 1e-10 && secs <= 120.0, 6, "inequality fuzz",
           fmt("%g/%g margins violated, circle equality %.3g (tol 1e-10), ", violations,
               static_cast<double>(margins), circle_worst) +
               fmt("%.1fs", secs) + first);
}

// Centered differences of L and A on the recorded (nonuniform) times.
struct FdCheck {
  double worst_ratio = 0.0;  ///< max |fd - formula| / tol
  std::string where;
  std::size_t stencils = 0;
  std::size_t skipped = 0;
};

void fd_check(const Case& c, FdCheck& out) {
  const auto& s = c.result.series.samples();
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h1 = s[i].t - s[i - 1].t, h2 = s[i + 1].t - s[i].t;
    // A record time can land just after a regular sample; such a lopsided
    // stencil is not a centered difference.
    if (std::max(h1, h2) > 2.0 * std::min(h1, h2)) {
      ++out.skipped;
      continue;
    }
    ++out.stencils;
    auto d = [&](double fm, double f0, double fp) {
      return (h1 * h1 * fp - h2 * h2 * fm + (h2 * h2 - h1 * h1) * f0) / (h1 * h2 * (h1 + h2));
    };
    const double dl = d(s[i - 1].L, s[i].L, s[i + 1].L);
    const double da = d(s[i - 1].A, s[i].A, s[i + 1].A);
    const double rl = std::abs(dl - s[i].dL_dt_formula) /
                      std::max(1e-4 * std::abs(s[i].dL_dt_formula), 1e-10);
    const double ra = std::abs(da - s[i].dA_dt_formula) /
                      std::max(1e-4 * std::abs(s[i].dA_dt_formula), 1e-10);
    if (std::max(rl, ra) > out.worst_ratio) {
      out.worst_ratio = std::max(rl, ra);
      out.where = c.name + fmt(" t=%.6g ", s[i].t) + (rl > ra ? "L" : "A");
    }
  }
}

void criterion7(const Runs& runs, Report& rep) {
  FdCheck fd;
  const auto cases = runs.all_built();
  for (const Case* c : cases) fd_check(*c, fd);
  rep.line(!cases.empty() && fd.worst_ratio <= 1.0, 7, "rate formulas vs finite differences",
           fmt("%g runs, %g stencils (%g lopsided skipped), ", static_cast<double>(cases.size()),
               static_cast<double>(fd.stencils), static_cast<double>(fd.skipped)) +
               fmt("worst error/tol %.3g at ", fd.worst_ratio) + fd.where);
}

void criterion8(Runs& runs, Report& rep) {
  const auto& base = runs.base();
  const auto& fine = runs.fine();
  const auto& names = sample_field_names();
  double worst = 0.0;
  std::string where;
  std::size_t matched = 0;
  std::string over;
  for (std::size_t i = 0; i < base.size(); ++i) {
    double run_worst = 0.0;
    std::map<double, const SampleRecord*> by_t;
    for (const auto& r : fine[i].result.series.samples()) by_t[r.t] = &r;
    const bool lp = base[i].law.kind() == LawKind::LP;
    std::vector<double> grid = matched_grid(kFlowEnd);
    grid.insert(grid.begin(), 0.0);
    for (const auto& r : base[i].result.series.samples()) {
      if (!std::binary_search(grid.begin(), grid.end(), r.t)) continue;
      const auto it = by_t.find(r.t);
      if (it == by_t.end()) continue;
      ++matched;
      const auto a = sample_field_values(r);
      const auto b = sample_field_values(*it->second);
      for (std::size_t f = 1; f < a.size(); ++f) {
        const std::string& n = names[f];
        // Identically zero in exact arithmetic; compare absolutely.
        const bool zero = n == "closure_defect" || (lp && n == "dL_dt_formula") ||
                          (!lp && n == "dA_dt_formula");
        const double err = zero ? std::abs(a[f] - b[f]) / 1e-10
                                : std::abs(a[f] - b[f]) / (1e-7 * std::abs(a[f]));
        run_worst = std::max(run_worst, err);
        if (err > worst) {
          worst = err;
          where = base[i].name + " " + n + fmt(" t=%.6g", r.t);
        }
      }
    }
    if (!(run_worst < 1.0)) over += " " + base[i].name + fmt("=%.3g", run_worst);
  }
  rep.line(matched > 0 && worst < 1.0, 8, "resolution robustness n=512",
           fmt("%g matched samples, worst diff/tol %.3g at ", static_cast<double>(matched),
               worst) +
               where + (over.empty() ? "" : "; runs over tol:" + over));
}

void criterion9(const Runs& runs, Report& rep) {
  double worst = 0.0;
  std::string where;
  const auto cases = runs.all_built();
  for (const Case* c : cases) {
    const double L0 = c->result.series.front().L;
    for (const auto& r : c->result.series.samples()) {
      if (r.closure_defect / L0 > worst) {
        worst = r.closure_defect / L0;
        where = c->name;
      }
    }
  }
  rep.line(!cases.empty() && worst <= 1e-6, 9, "closure preservation",
           fmt("%g runs, max defect/L0 %.3g (tol 1e-6) ", static_cast<double>(cases.size()),
               worst) +
               where);
}

void criterion10(Runs& runs, Report& rep) {
  bool ok = true;
  std::string rates;
  for (const Case& c : runs.base()) {
    const DecayFit fit = fit_decay_rate(c.result.series);
    ok = ok && std::isfinite(fit.rate) && fit.rate < 0.0;
    rates += " " + c.name + fmt("=%.4g", fit.rate);
  }
  rep.line(ok, 10, "oscillation decay rate", "rates" + rates, false);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--strict") {
      strict = true;
    } else {
      only.insert(std::atoi(argv[i]));
    }
  }
  auto want = [&](int id) { return only.empty() || only.count(id) > 0; };

  Runs runs;
  Report rep;
  if (want(1)) criterion1(runs, rep);
  if (want(2)) criterion2(runs, rep);
  if (want(3)) criterion3(runs, rep);
  if (want(4)) criterion4(runs, rep);
  if (want(5)) criterion5(runs, rep);
  if (want(6)) criterion6(rep);
  if (want(8)) criterion8(runs, rep);
  // 7 and 9 cover every run built above.
  if (want(7)) criterion7(runs, rep);
  if (want(9)) criterion9(runs, rep);
  if (want(10)) criterion10(runs, rep);
  std::printf("%s: %d gating failure(s)\n", rep.gating_failures ? "FAILED" : "OK",
              rep.gating_failures);
  return strict && rep.gating_failures ? 1 : 0;
}
