#include "kflow/scenario_io.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace kflow {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Reads one JSON object and rejects whatever keys were never asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) {
      throw ConfigError((path_.empty() ? std::string("document") : "'" + path_ + "'") +
                        " must be a JSON object");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw type_error(key, "a number");
    return v.get<double>();
  }
  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::int64_t integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) throw type_error(key, "an integer");
    return v.get<std::int64_t>();
  }
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) {
    return has(key) ? integer(key) : fallback;
  }

  std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_unsigned()) throw type_error(key, "a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw type_error(key, "a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw type_error(key, "a string");
    return v.get<std::string>();
  }
  std::string string_or(const std::string& key, std::string fallback) {
    return has(key) ? string(key) : fallback;
  }

  const json& array(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) throw type_error(key, "an array");
    return v;
  }

  std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const json& x : array(key)) {
      if (!x.is_number()) throw type_error(key, "an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::string path(const std::string& key) const { return join_path(path_, key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + join_path(path_, key) + "'");
    }
  }

 private:
  ConfigError type_error(const std::string& key, const char* what) const {
    return ConfigError("'" + join_path(path_, key) + "' must be " + what);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

int to_int(std::int64_t v, const std::string& path) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError("'" + path + "' is out of range");
  }
  return static_cast<int>(v);
}

CurveKind parse_curve_kind(ObjectReader& r, const std::string& kind) {
  if (kind == "Circle") return Circle{r.number_or("r", 1.0)};
  if (kind == "Ellipse") return Ellipse{r.number("a"), r.number("b")};
  if (kind == "PerturbedCircle") {
    PerturbedCircle p{r.number_or("r0", 1.0), {}};
    if (r.has("modes")) {
      const json& modes = r.array("modes");
      for (std::size_t i = 0; i < modes.size(); ++i) {
        ObjectReader m(modes[i], r.path("modes") + "[" + std::to_string(i) + "]");
        p.modes.push_back({to_int(m.integer("n"), m.path("n")), m.number("amplitude"),
                           m.number_or("phase", 0.0)});
        m.finish();
      }
    }
    return p;
  }
  if (kind == "ExplicitSupport") {
    ExplicitSupport x{r.number_or("c0", 1.0), {}};
    if (r.has("terms")) {
      const json& terms = r.array("terms");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        ObjectReader m(terms[i], r.path("terms") + "[" + std::to_string(i) + "]");
        x.terms.push_back(
            {to_int(m.integer("m"), m.path("m")), m.number_or("a", 0.0), m.number_or("b", 0.0)});
        m.finish();
      }
    }
    return x;
  }
  if (kind == "RandomConvex") {
    const RandomConvex d;
    return RandomConvex{r.unsigned_or("seed", d.seed), r.number_or("r0", d.r0),
                        to_int(r.integer_or("max_mode", d.max_mode), r.path("max_mode")),
                        r.number_or("budget", d.budget)};
  }
  throw ConfigError("unknown curve kind '" + kind +
                    "' (expected Circle, Ellipse, PerturbedCircle, ExplicitSupport or "
                    "RandomConvex)");
}

CurveSpec curve_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  if (!r.has("kind")) throw ConfigError("missing required key '" + r.path("kind") + "'");
  CurveSpec spec;
  spec.kind = parse_curve_kind(r, r.string("kind"));
  const std::int64_t n = r.integer_or("n", 256);
  if (n < 0) throw ConfigError("'" + r.path("n") + "' must be positive");
  spec.grid_n = static_cast<std::size_t>(n);
  r.finish();
  try {
    generate(spec);
  } catch (const Error& e) {
    throw ConfigError("invalid curve: " + std::string(e.what()));
  }
  return spec;
}

json curve_to_json(const CurveSpec& spec) {
  json j = std::visit(
      Overloaded{
          [](const Circle& c) { return json{{"kind", "Circle"}, {"r", c.r}}; },
          [](const Ellipse& e) { return json{{"kind", "Ellipse"}, {"a", e.a}, {"b", e.b}}; },
          [](const PerturbedCircle& p) {
            json modes = json::array();
            for (const auto& m : p.modes) {
              modes.push_back({{"n", m.n}, {"amplitude", m.amplitude}, {"phase", m.phase}});
            }
            return json{{"kind", "PerturbedCircle"}, {"r0", p.r0}, {"modes", modes}};
          },
          [](const ExplicitSupport& x) {
            json terms = json::array();
            for (const auto& t : x.terms) terms.push_back({{"m", t.m}, {"a", t.a}, {"b", t.b}});
            return json{{"kind", "ExplicitSupport"}, {"c0", x.c0}, {"terms", terms}};
          },
          [](const RandomConvex& r) {
            return json{{"kind", "RandomConvex"}, {"seed", r.seed},     {"r0", r.r0},
                        {"max_mode", r.max_mode}, {"budget", r.budget}};
          },
      },
      spec.kind);
  j["n"] = spec.grid_n;
  return j;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunOptions Scenario::run_options() const {
  RunOptions o;
  o.control = control;
  o.diagnostics = DiagnosticsConfig::from_names(audits);
  o.sample_every = sample_every;
  o.snapshot_every = snapshot_every;
  o.projection = projection;
  o.record_times = record_times;
  return o;
}

Scenario parse_scenario(std::string_view text) {
  const json doc = parse_document(text);
  ObjectReader r(doc, "");

  if (r.has("law") && !doc.at("law").is_object()) throw ConfigError("'law' must be a JSON object");
  std::vector<std::string> missing;
  const bool has_law = r.has("law");
  if (!has_law || !doc.at("law").contains("kind")) missing.push_back("law.kind");
  if (!has_law || !doc.at("law").contains("alpha")) missing.push_back("law.alpha");
  if (!r.has("curve")) missing.push_back("curve");
  if (!r.has("t_end")) missing.push_back("t_end");
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }

  Scenario s;
  {
    ObjectReader law(r.at("law"), "law");
    const LawKind kind = law_kind_from_string(law.string("kind"));
    const double alpha = law.number("alpha");
    law.finish();
    s.law = FlowLaw(kind, alpha);
  }
  s.curve = curve_from_json(r.at("curve"), "curve");
  s.t_end = r.number("t_end");
  if (!(s.t_end > 0.0)) throw ConfigError("'t_end' must be > 0");

  if (r.has("control")) {
    ObjectReader c(r.at("control"), "control");
    StepControl& ctl = s.control;
    ctl.safety = c.number_or("safety", ctl.safety);
    ctl.dt_min = c.number_or("dt_min", ctl.dt_min);
    ctl.dt_max = c.number_or("dt_max", ctl.dt_max);
    ctl.max_steps = c.integer_or("max_steps", ctl.max_steps);
    ctl.convergence_tol = c.number_or("convergence_tol", ctl.convergence_tol);
    ctl.blowup_k = c.number_or("blowup_k", ctl.blowup_k);
    c.finish();
  }
  s.control.validate();

  s.sample_every = r.integer_or("sample_every", s.sample_every);
  if (s.sample_every < 1) throw ConfigError("'sample_every' must be >= 1");
  s.snapshot_every = r.integer_or("snapshot_every", s.snapshot_every);
  if (s.snapshot_every < 0) throw ConfigError("'snapshot_every' must be >= 0");
  s.output_dir = r.string_or("output_dir", s.output_dir);
  if (r.has("audits")) {
    s.audits.clear();
    for (const json& a : r.array("audits")) {
      if (!a.is_string()) throw ConfigError("'audits' must be an array of strings");
      s.audits.push_back(a.get<std::string>());
    }
    DiagnosticsConfig::from_names(s.audits);
  }
  s.projection = r.boolean_or("projection", s.projection);
  s.record_times = r.numbers_or("record_times", {});
  r.finish();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path));
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["law"] = {{"kind", std::string(to_string(s.law.kind()))}, {"alpha", s.law.alpha()}};
  j["curve"] = curve_to_json(s.curve);
  j["control"] = {{"safety", s.control.safety},
                  {"dt_min", s.control.dt_min},
                  {"dt_max", s.control.dt_max},
                  {"max_steps", s.control.max_steps},
                  {"convergence_tol", s.control.convergence_tol},
                  {"blowup_k", s.control.blowup_k}};
  j["t_end"] = s.t_end;
  j["sample_every"] = s.sample_every;
  j["snapshot_every"] = s.snapshot_every;
  j["output_dir"] = s.output_dir;
  j["audits"] = s.audits;
  j["projection"] = s.projection;
  j["record_times"] = s.record_times;
  return j.dump(2) + "\n";
}

CurveSpec parse_curve_spec(std::string_view text) {
  return curve_from_json(parse_document(text), "curve");
}

std::string curve_spec_to_json(const CurveSpec& spec) { return curve_to_json(spec).dump(2) + "\n"; }

std::string series_csv(const DiagnosticsSeries& series) {
  std::string out;
  const auto& names = sample_field_names();
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  for (const auto& m : series.margin_names()) out += "," + m;
  out += "\n";
  for (const auto& r : series.samples()) {
    const auto vals = sample_field_values(r);
    for (std::size_t i = 0; i < vals.size(); ++i) out += (i ? "," : "") + format_double(vals[i]);
    for (const auto& m : r.margins) out += "," + format_double(m.value);
    out += "\n";
  }
  return out;
}

double limit_radius(const FlowLaw& law, double L0, double A0, const CurvatureProfile& kp) {
  switch (law.kind()) {
    case LawKind::LP: return L0 / (2.0 * std::numbers::pi);
    case LawKind::AP: return std::sqrt(A0 / std::numbers::pi);
    default: return std::sqrt(area(kp) / std::numbers::pi);
  }
}

namespace {

std::string svg_document(const CurveSnapshot& snap, double radius) {
  const std::vector<Vec2> pts = reconstruct_points(snap.k, {0.0, 0.0});
  const Vec2 c = area_centroid(snap.k);
  const AngularGrid& grid = snap.k.grid();
  std::vector<Vec2> circle(grid.size());
  for (std::size_t j = 0; j < circle.size(); ++j) {
    const double th = grid.theta(j);
    circle[j] = c + radius * Vec2{std::cos(th), std::sin(th)};
  }

  double x0 = c.x - radius, x1 = c.x + radius, y0 = c.y - radius, y1 = c.y + radius;
  for (const Vec2& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double pad = 0.05 * std::max(x1 - x0, y1 - y0);
  x0 -= pad;
  x1 += pad;
  y0 -= pad;
  y1 += pad;

  auto path = [](const std::vector<Vec2>& p) {
    std::string d;
    char buf[64];
    for (std::size_t j = 0; j < p.size(); ++j) {
      // SVG y grows downward; flip so the curve appears in math orientation.
      std::snprintf(buf, sizeof buf, "%s%.9g %.9g", j ? " L" : "M", p[j].x, -p[j].y);
      d += buf;
    }
    return d + " Z";
  };

  char head[512];
  std::snprintf(head, sizeof head,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.9g %.9g %.9g %.9g\" "
                "width=\"600\" height=\"%.0f\">\n",
                x0, -y1, x1 - x0, y1 - y0, 600.0 * (y1 - y0) / (x1 - x0));
  const double stroke = 0.004 * std::max(x1 - x0, y1 - y0);
  char style[128];
  std::snprintf(style, sizeof style, "fill=\"none\" stroke-width=\"%.6g\"", stroke);
  char title[96];
  std::snprintf(title, sizeof title, "<title>snapshot %zu, t = %.9g</title>\n", snap.index,
                snap.t);

  std::string svg = head;
  svg += title;
  svg += "<path id=\"limit-circle\" stroke=\"#c33\" stroke-dasharray=\"4 3\" " +
         std::string(style) + " vector-effect=\"non-scaling-stroke\" d=\"" + path(circle) +
         "\"/>\n";
  svg += "<path id=\"curve\" stroke=\"#125\" " + std::string(style) + " d=\"" + path(pts) +
         "\"/>\n";
  svg += "</svg>\n";
  return svg;
}

json snapshot_json(const CurveSnapshot& snap) {
  const std::vector<Vec2> pts = reconstruct_points(snap.k, {0.0, 0.0});
  json x = json::array(), y = json::array();
  for (const Vec2& p : pts) {
    x.push_back(p.x);
    y.push_back(p.y);
  }
  const auto k = snap.k.values();
  return json{{"index", snap.index},
              {"t", snap.t},
              {"theta", snap.k.grid().thetas()},
              {"k", std::vector<double>(k.begin(), k.end())},
              {"x", x},
              {"y", y}};
}

}  // namespace

void render_snapshot(const CurveSnapshot& snap, double radius, const std::filesystem::path& path) {
  const std::string svg = svg_document(snap, radius);
  std::filesystem::path tmp = path;
  tmp += ".partial";
  try {
    write_file(tmp, svg);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move snapshot into place at '" + path.string() + "'");
  }
}

Manifest emit(const Scenario& scenario, const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  Manifest m;
  m.status = result.status;
  m.t_final = result.t_final;
  write_file(dir / "series.csv", series_csv(result.series));
  m.files.push_back("series.csv");
  write_file(dir / "scenario.json", scenario_to_json(scenario));
  m.files.push_back("scenario.json");

  const double L0 = result.series.empty() ? 0.0 : result.series.front().L;
  const double A0 = result.series.empty() ? 0.0 : result.series.front().A;
  for (const auto& snap : result.snapshots) {
    const std::string stem = "curve_" + std::to_string(snap.index);
    write_file(dir / (stem + ".json"), snapshot_json(snap).dump() + "\n");
    m.files.push_back(stem + ".json");
    render_snapshot(snap, limit_radius(scenario.law, L0, A0, snap.k), dir / (stem + ".svg"));
    m.files.push_back(stem + ".svg");
  }

  json notes = result.series.notes();
  const json manifest{{"files", m.files},
                      {"status", std::string(to_string(result.status))},
                      {"t_final", result.t_final},
                      {"steps", result.steps},
                      {"message", result.message},
                      {"samples", result.series.size()},
                      {"notes", notes},
                      {"scenario", "scenario.json"}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return m;
}

std::vector<SweepEntry> run_sweep(const Scenario& base, const std::vector<double>& alphas,
                                  const std::filesystem::path& dir, unsigned threads) {
  std::vector<SweepEntry> entries(alphas.size());
  std::set<std::string> names;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "alpha_%g", alphas[i]);
    entries[i].alpha = alphas[i];
    entries[i].subdir = buf;
    if (!names.insert(buf).second) throw ConfigError("duplicate alpha " + std::string(buf));
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      SweepEntry& e = entries[i];
      e.t_converge = e.final_oscillation = e.decay_rate = kNaN;
      try {
        Scenario s = base;
        s.law = FlowLaw(base.law.kind(), e.alpha);
        s.output_dir = (dir / e.subdir).string();
        const RunResult r = run(s.law, generate(s.curve), s.t_end, s.run_options());
        emit(s, r, dir / e.subdir);
        e.status = r.status;
        if (r.status == RunStatus::Converged) e.t_converge = r.t_final;
        e.final_oscillation = relative_oscillation(r.final);
        e.decay_rate = fit_decay_rate(r.series).rate;
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, entries.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string csv = "alpha,status,t_converge,final_oscillation,decay_rate,subdir\n";
  for (const auto& e : entries) {
    csv += format_double(e.alpha) + "," +
           (e.error.empty() ? std::string(to_string(e.status)) : std::string("Error")) + "," +
           format_double(e.t_converge) + "," + format_double(e.final_oscillation) + "," +
           format_double(e.decay_rate) + "," + e.subdir + "\n";
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  write_file(dir / "summary.csv", csv);
  return entries;
}

}  // namespace kflow
