#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kflow/scenario_io.hpp"
#include "reference/reference.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kGuard = 2, kAuditFailed = 3 };

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kflow::IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_failures(const std::vector<kflow::AuditFailure>& failures) {
  for (const auto& f : failures) {
    std::printf("FAIL %-28s t=%-12.6g value=%.17g bound=%.17g\n", f.check.c_str(), f.t, f.value,
                f.bound);
  }
}

int cmd_run(const std::string& path, const std::string& out_override) {
  kflow::Scenario s = kflow::load_scenario(path);
  if (!out_override.empty()) s.output_dir = out_override;
  const kflow::CurvatureProfile kp0 = kflow::generate(s.curve);
  const kflow::RunResult r = kflow::run(s.law, kp0, s.t_end, s.run_options());
  kflow::emit(s, r, s.output_dir);
  const auto failures =
      kflow::audit_series(s.law, r.series, kflow::TsoContext::from_initial(kp0, s.law.alpha()));
  std::printf("status %s at t=%.9g after %lld steps, %zu samples (%s)\n",
              std::string(kflow::to_string(r.status)).c_str(), r.t_final,
              static_cast<long long>(r.steps), r.series.size(), r.message.c_str());
  std::printf("output %s\n", s.output_dir.c_str());
  print_failures(failures);
  if (r.status != kflow::RunStatus::Converged && r.status != kflow::RunStatus::TimeLimit) {
    return kGuard;
  }
  return failures.empty() ? kOk : kAuditFailed;
}

int cmd_audit(const std::string& path) {
  const std::string text = slurp(path);
  kflow::CurveSpec spec;
  // A scenario carries a "law" object; anything else is a bare curve.
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_object() && doc.contains("law")) {
    spec = kflow::parse_scenario(text).curve;
  } else {
    spec = kflow::parse_curve_spec(text);
  }
  const auto margins = kflow::inequality_audit(kflow::generate(spec));
  int failed = 0;
  std::printf("%-28s %24s %24s  %s\n", "inequality", "margin", "scale", "ok");
  for (const auto& m : margins) {
    const bool ok = m.holds();
    failed += !ok;
    std::printf("%-28s %24.17g %24.17g  %s\n", m.name.c_str(), m.value, m.scale, ok ? "yes" : "NO");
  }
  std::printf("%zu margins, %d failed\n", margins.size(), failed);
  return failed ? kAuditFailed : kOk;
}

int cmd_sweep(const std::string& path, const std::vector<double>& alphas,
              const std::string& out_override, unsigned threads) {
  kflow::Scenario s = kflow::load_scenario(path);
  if (!out_override.empty()) s.output_dir = out_override;
  const auto entries = kflow::run_sweep(s, alphas, s.output_dir, threads);
  int code = kOk;
  for (const auto& e : entries) {
    if (!e.error.empty()) {
      std::printf("alpha %-8g error: %s\n", e.alpha, e.error.c_str());
      code = kGuard;
      continue;
    }
    std::printf("alpha %-8g %-13s t_converge=%-12.6g oscillation=%-12.6g rate=%.6g\n", e.alpha,
                std::string(kflow::to_string(e.status)).c_str(), e.t_converge,
                e.final_oscillation, e.decay_rate);
    if (e.status != kflow::RunStatus::Converged && e.status != kflow::RunStatus::TimeLimit) {
      code = kGuard;
    }
  }
  std::printf("summary %s\n", (std::filesystem::path(s.output_dir) / "summary.csv").c_str());
  return code;
}

int cmd_oracle() {
  for (const auto& v : kflow::reference::all_values()) {
    std::printf("%-52s %.17g\n", v.name.c_str(), v.value);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal curvature flows of convex plane curves"};
  app.require_subcommand(1);

  std::string scenario, out_dir;
  auto* run = app.add_subcommand("run", "Integrate a scenario and write its outputs");
  run->add_option("scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", out_dir, "Override the scenario's output_dir");

  std::string audit_path;
  auto* audit = app.add_subcommand("audit", "Inequality margins of an initial curve");
  audit->add_option("input", audit_path, "Scenario or curve JSON file")
      ->required()
      ->check(CLI::ExistingFile);

  std::vector<double> alphas;
  unsigned threads = 0;
  std::string sweep_path, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "One run per alpha with a combined summary");
  sweep->add_option("scenario", sweep_path, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--alpha", alphas, "Exponents to run")->required()->delimiter(',');
  sweep->add_option("-j,--threads", threads, "Worker threads (default: hardware)");
  sweep->add_option("-o,--output-dir", sweep_out, "Override the scenario's output_dir");

  app.add_subcommand("oracle", "Print the independently computed reference values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; every other parse problem is a usage error.
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  try {
    if (*run) return cmd_run(scenario, out_dir);
    if (*audit) return cmd_audit(audit_path);
    if (*sweep) return cmd_sweep(sweep_path, alphas, sweep_out, threads);
    return cmd_oracle();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
}
