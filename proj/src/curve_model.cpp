#include "kflow/curve_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace kflow {

namespace {

constexpr double kPi = std::numbers::pi;

PeriodicField validate_positive(PeriodicField k) {
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (!(k[j] > 0.0)) throw ConvexityError(j, k.grid().theta(j), k[j]);
  }
  return k;
}

// Periodic part of the antiderivative, normalized to vanish at theta = 0, and
// the mean of the integrand.
struct Antiderivative {
  std::vector<double> periodic;
  double mean;
};

Antiderivative antiderivative(const std::vector<double>& f) {
  const std::size_t n = f.size();
  auto c = forward_transform(f);
  const double mean = c[0].real() / static_cast<double>(n);
  c[0] = 0.0;
  for (std::size_t m = 1; m < n / 2; ++m) c[m] /= std::complex<double>(0.0, static_cast<double>(m));
  c[n / 2] = 0.0;
  auto p = inverse_transform(c, n);
  const double p0 = p[0];
  for (double& x : p) x -= p0;
  return {std::move(p), mean};
}

}  // namespace

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

CurvatureProfile::CurvatureProfile(PeriodicField k) : k_(validate_positive(std::move(k))) {}

CurvatureProfile::CurvatureProfile(const AngularGrid& grid, std::vector<double> k)
    : CurvatureProfile(PeriodicField(grid, std::move(k))) {}

PeriodicField CurvatureProfile::radius_of_curvature() const {
  return k_.map([](double k) { return 1.0 / k; });
}

double length(const CurvatureProfile& kp) { return integrate(kp.radius_of_curvature()); }

double closure_defect(const CurvatureProfile& kp) {
  const auto h = first_harmonics(kp.radius_of_curvature());
  return std::hypot(h.c1, h.s1);
}

std::vector<Vec2> reconstruct_points(const CurvatureProfile& kp, Vec2 anchor) {
  const AngularGrid& g = kp.grid();
  const std::size_t n = g.size();
  std::vector<double> fx(n), fy(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double th = g.theta(j);
    const double rho = 1.0 / kp[j];
    fx[j] = -std::sin(th) * rho;
    fy[j] = std::cos(th) * rho;
  }
  const auto ax = antiderivative(fx);
  const auto ay = antiderivative(fy);
  std::vector<Vec2> pts(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double th = g.theta(j);
    pts[j] = {anchor.x + ax.mean * th + ax.periodic[j], anchor.y + ay.mean * th + ay.periodic[j]};
  }
  return pts;
}

namespace {

struct AreaCentroid {
  double area;
  Vec2 centroid;
};

AreaCentroid area_and_centroid(const CurvatureProfile& kp, const std::vector<Vec2>& pts) {
  const AngularGrid& g = kp.grid();
  double a = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double th = g.theta(j);
    const double c = std::cos(th), s = std::sin(th);
    const double rho = 1.0 / kp[j];
    a += (pts[j].x * c + pts[j].y * s) * rho;
    mx += pts[j].x * pts[j].x * c * rho;
    my += pts[j].y * pts[j].y * s * rho;
  }
  const double h = g.spacing();
  const double area = 0.5 * h * a;
  return {area, {0.5 * h * mx / area, 0.5 * h * my / area}};
}

}  // namespace

Vec2 area_centroid(const CurvatureProfile& kp) {
  return area_and_centroid(kp, reconstruct_points(kp, {})).centroid;
}

SupportRepresentation support_about_centroid(const CurvatureProfile& kp) {
  const auto pts = reconstruct_points(kp, {});
  const auto ac = area_and_centroid(kp, pts);
  const AngularGrid& g = kp.grid();
  std::vector<double> u(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double th = g.theta(j);
    const Vec2 d = pts[j] - ac.centroid;
    u[j] = d.x * std::cos(th) + d.y * std::sin(th);
  }
  const double u_min = *std::min_element(u.begin(), u.end());
  if (!(u_min > 0.0)) {
    throw DomainError("area centroid is not interior to the curve (min support " +
                      std::to_string(u_min) + ")");
  }
  return {PeriodicField(g, std::move(u)), ac.centroid};
}

double area(const CurvatureProfile& kp) {
  // (1/2) int u rho by Parseval, with u = sum rho_m / (1 - m^2) e^{im theta}
  // off the first harmonic. Avoids the reconstruction round-off.
  // The mean term is taken from the compensated length, L^2 / 4pi.
  const PeriodicField rho = kp.radius_of_curvature();
  const auto c = forward_transform(rho.values());
  const double n = static_cast<double>(kp.size());
  const std::size_t nyquist = kp.size() / 2;
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t m = c.size(); m-- > 2;) {
    const double w = m == nyquist ? 1.0 : 2.0;
    const double md = static_cast<double>(m);
    const double term = w * std::norm(c[m] / n) / (1.0 - md * md);
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  const double mean = integrate(rho) / (2.0 * kPi);
  return kPi * (mean * mean + (sum + comp));
}

namespace {

using Objective = std::function<double(Vec2)>;

struct SimplexResult {
  Vec2 x;
  double f;
  bool converged;
};

// Reflect/expand/contract/shrink simplex descent in two dimensions.
SimplexResult simplex_minimize(const Objective& f, Vec2 start, double step, double xtol,
                               double ftol, int max_iter) {
  std::array<Vec2, 3> x{start, start + Vec2{step, 0.0}, start + Vec2{0.0, step}};
  std::array<double, 3> fx{f(x[0]), f(x[1]), f(x[2])};
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const int b = idx[0], m = idx[1], w = idx[2];
    const double size = std::max(norm(x[m] - x[b]), norm(x[w] - x[b]));
    if (size < xtol && std::abs(fx[w] - fx[b]) < ftol) return {x[b], fx[b], true};

    const Vec2 centroid = 0.5 * (x[b] + x[m]);
    const Vec2 xr = centroid + (centroid - x[w]);
    const double fr = f(xr);
    if (fr < fx[b]) {
      const Vec2 xe = centroid + 2.0 * (centroid - x[w]);
      const double fe = f(xe);
      if (fe < fr) {
        x[w] = xe, fx[w] = fe;
      } else {
        x[w] = xr, fx[w] = fr;
      }
      continue;
    }
    if (fr < fx[m]) {
      x[w] = xr, fx[w] = fr;
      continue;
    }
    const bool outside = fr < fx[w];
    const Vec2 xc = outside ? centroid + 0.5 * (xr - centroid) : centroid + 0.5 * (x[w] - centroid);
    const double fc = f(xc);
    if (fc < std::min(fr, fx[w])) {
      x[w] = xc, fx[w] = fc;
      continue;
    }
    for (int i : {m, w}) {
      x[i] = x[b] + 0.5 * (x[i] - x[b]);
      fx[i] = f(x[i]);
    }
  }
  const int best = static_cast<int>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  return {x[best], fx[best], false};
}

class SupportObjective {
 public:
  explicit SupportObjective(const SupportRepresentation& s)
      : base_interp_(s.u), work_(s.u), base_(s.u.values().begin(), s.u.values().end()) {
    const AngularGrid& g = s.u.grid();
    cos_.resize(g.size());
    sin_.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      cos_[j] = std::cos(g.theta(j));
      sin_[j] = std::sin(g.theta(j));
    }
    shifted_.resize(g.size());
    c1_ = work_.cos_coefficient(1);
    s1_ = work_.sin_coefficient(1);
  }

  // Extrema over theta of the support function about center c.
  double min(Vec2 c) { return refined_min(shift(c), shifted_).value; }
  double max(Vec2 c) { return refined_max(shift(c), shifted_).value; }

  struct Local {
    double g, d1, d2;
  };

  // g = u - c.N and its first two theta derivatives.
  Local local(Vec2 c, double th) const {
    const auto jet = base_interp_.evaluate(th);
    const double co = std::cos(th), si = std::sin(th);
    return {jet.value - c.x * co - c.y * si, jet.d1 + c.x * si - c.y * co,
            jet.d2 + c.x * co + c.y * si};
  }

  // All local minima (sign -1) or maxima (+1) of g about c, polished and
  // sorted from the most extreme.
  std::vector<Extremum> locals(Vec2 c, double sign) {
    shift(c);
    const std::size_t n = shifted_.size();
    const double h = work_.grid().spacing();
    std::vector<Extremum> out;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = shifted_[j];
      if (sign * (v - shifted_[(j + n - 1) % n]) < 0.0 || sign * (v - shifted_[(j + 1) % n]) < 0.0) {
        continue;
      }
      const double th0 = work_.grid().theta(j);
      double th = th0;
      Extremum best{v, th0};
      for (int it = 0; it < 30; ++it) {
        const Local l = local(c, th);
        if (it > 0 && sign * (l.g - best.value) > 0.0) best = {l.g, th};
        if (sign * l.d2 >= 0.0) break;
        const double step = -l.d1 / l.d2;
        if (std::abs(step) < 1e-14) break;
        th += step;
        if (std::abs(th - th0) > h) break;
      }
      out.push_back(best);
    }
    std::sort(out.begin(), out.end(),
              [sign](const Extremum& a, const Extremum& b) { return sign * (a.value - b.value) > 0.0; });
    return out;
  }

 private:
  const TrigInterpolant& shift(Vec2 c) {
    for (std::size_t j = 0; j < base_.size(); ++j) {
      shifted_[j] = base_[j] - c.x * cos_[j] - c.y * sin_[j];
    }
    work_.set_first_harmonic(c1_ - c.x, s1_ - c.y);
    return work_;
  }

  TrigInterpolant base_interp_;
  TrigInterpolant work_;
  std::vector<double> base_, cos_, sin_, shifted_;
  double c1_ = 0.0, s1_ = 0.0;
};

constexpr int kMaxSimplexIter = 4000;

SimplexResult descend(const Objective& f, Vec2 start, double scale, double step, double xtol,
                      double ftol) {
  SimplexResult r = simplex_minimize(f, start, step, xtol, ftol, kMaxSimplexIter);
  // Restart once from the optimum to guard against simplex collapse.
  if (r.converged) {
    SimplexResult again = simplex_minimize(f, r.x, 1e-4 * scale, xtol, ftol, kMaxSimplexIter);
    if (again.f <= r.f) r = again;
  }
  return r;
}

// Solves the square system a x = b in place by partial pivoting; false if singular.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    if (!(std::abs(a[piv * n + col]) > 1e-300)) return false;
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[i * n + k] * b[k];
    b[i] = acc / a[i * n + i];
  }
  return true;
}

struct Contact {
  double theta;
  std::size_t var;  // index of the angle unknown
  double offset;    // theta = angle unknown + offset
};

struct Certified {
  Vec2 center;
  double value;
};

// Newton on g(theta_i) = r, g'(theta_i) = 0 over the contact set, followed by a
// certificate: 0 in the convex hull of the contact normals makes the point
// optimal for the concave (inradius) or convex (outradius) center problem.
std::optional<Certified> polish_contacts(SupportObjective& obj, Vec2 c, double r,
                                         std::vector<Contact> contacts, std::size_t n_angles,
                                         double sign, double scale) {
  const std::size_t m = contacts.size();
  const std::size_t rows = 2 * m;
  const std::size_t cols = 3 + n_angles;
  std::vector<double> angles(n_angles);
  for (const auto& ct : contacts) angles[ct.var] = ct.theta - ct.offset;

  bool ok = false;
  for (int it = 0; it < 25; ++it) {
    std::vector<double> F(rows), J(rows * cols, 0.0);
    double res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double th = angles[contacts[i].var] + contacts[i].offset;
      const auto l = obj.local(c, th);
      const double co = std::cos(th), si = std::sin(th);
      F[2 * i] = l.g - r;
      F[2 * i + 1] = l.d1;
      double* row1 = &J[2 * i * cols];
      double* row2 = &J[(2 * i + 1) * cols];
      row1[0] = -co, row1[1] = -si, row1[2] = -1.0, row1[3 + contacts[i].var] += l.d1;
      row2[0] = si, row2[1] = -co, row2[3 + contacts[i].var] += l.d2;
      res = std::max({res, std::abs(F[2 * i]), std::abs(F[2 * i + 1])});
    }
    if (res < 1e-13 * scale) {
      ok = true;
      break;
    }
    // Minimum-norm step dx = -J^T (J J^T)^-1 F.
    std::vector<double> JJt(rows * rows, 0.0);
    for (std::size_t a = 0; a < rows; ++a) {
      for (std::size_t b = 0; b < rows; ++b) {
        double acc = 0.0;
        for (std::size_t k = 0; k < cols; ++k) acc += J[a * cols + k] * J[b * cols + k];
        JJt[a * rows + b] = acc;
      }
    }
    std::vector<double> y = F;
    if (!solve_dense(JJt, y, rows)) return std::nullopt;
    std::vector<double> dx(cols, 0.0);
    for (std::size_t k = 0; k < cols; ++k) {
      for (std::size_t a = 0; a < rows; ++a) dx[k] -= J[a * cols + k] * y[a];
    }
    c.x += dx[0];
    c.y += dx[1];
    r += dx[2];
    for (std::size_t v = 0; v < n_angles; ++v) angles[v] += dx[3 + v];
    if (!std::isfinite(r) || std::abs(dx[0]) + std::abs(dx[1]) > 0.1 * scale) return std::nullopt;
  }
  if (!ok) return std::nullopt;

  for (const auto& ct : contacts) {
    if (!(sign * obj.local(c, angles[ct.var] + ct.offset).d2 < 0.0)) return std::nullopt;
  }
  if (m == 3) {
    std::vector<double> a(9), lam{0.0, 0.0, 1.0};
    for (std::size_t i = 0; i < 3; ++i) {
      const double th = angles[contacts[i].var] + contacts[i].offset;
      a[0 * 3 + i] = std::cos(th);
      a[1 * 3 + i] = std::sin(th);
      a[2 * 3 + i] = 1.0;
    }
    if (!solve_dense(a, lam, 3)) return std::nullopt;
    for (double l : lam) {
      if (l < -1e-9) return std::nullopt;
    }
  }
  const double global = sign < 0.0 ? obj.min(c) : obj.max(c);
  if (std::abs(global - r) > 1e-12 * scale) return std::nullopt;
  return Certified{c, global};
}

std::optional<Certified> certify(SupportObjective& obj, Vec2 c, double sign, double scale) {
  std::vector<Extremum> loc = obj.locals(c, sign);
  if (loc.empty()) return std::nullopt;
  const double best = loc.front().value;
  while (!loc.empty() && std::abs(loc.back().value - best) > 1e-4 * scale) loc.pop_back();
  if (loc.size() > 4) loc.resize(4);
  const std::size_t k = loc.size();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      for (std::size_t d = b + 1; d < k; ++d) {
        auto got = polish_contacts(obj, c, best,
                                   {{loc[a].theta, 0, 0.0}, {loc[b].theta, 1, 0.0},
                                    {loc[d].theta, 2, 0.0}},
                                   3, sign, scale);
        if (got) return got;
      }
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double gap = std::remainder(loc[b].theta - loc[a].theta, 2.0 * kPi);
      if (std::abs(std::abs(gap) - kPi) > 0.1) continue;
      const double off = gap > 0.0 ? kPi : -kPi;
      auto got = polish_contacts(obj, c, best, {{loc[a].theta, 0, 0.0}, {loc[b].theta, 0, off}}, 1,
                                 sign, scale);
      if (got) return got;
    }
  }
  return std::nullopt;
}

// Maximizes (sign -1) or minimizes (sign +1) the extreme support value over
// the center: a coarse simplex, an active-set polish, and a fine simplex when
// the polish cannot be certified.
Certified optimize_center(SupportObjective& obj, double sign, Vec2 start, double scale, bool warm,
                          const char* what) {
  const Objective f = [&](Vec2 c) { return sign < 0.0 ? -obj.min(c) : obj.max(c); };
  const double step = (warm ? 1e-3 : 0.05) * scale;
  const SimplexResult coarse =
      simplex_minimize(f, start, step, 1e-5 * scale, 1e-7 * scale, kMaxSimplexIter);
  if (coarse.converged) {
    if (auto c = certify(obj, coarse.x, sign, scale)) return *c;
  }
  const SimplexResult fine = descend(f, coarse.x, scale, 1e-5 * scale, 1e-11 * scale, 1e-13 * scale);
  const double value = sign < 0.0 ? -fine.f : fine.f;
  if (!fine.converged) {
    throw OptimizerError(std::string(what) + " descent did not converge", fine.x, value);
  }
  return {fine.x, value};
}

}  // namespace

Radii inradius_outradius(const SupportRepresentation& support, std::optional<RadiiGuess> guess) {
  SupportObjective obj(support);
  const double scale = integrate(support.u) / (2.0 * kPi);
  const RadiiGuess start = guess.value_or(RadiiGuess{});
  const bool warm = guess.has_value();
  const Certified in = optimize_center(obj, -1.0, start.in_center, scale, warm, "inradius");
  const Certified out = optimize_center(obj, +1.0, start.out_center, scale, warm, "outradius");
  return {in.value, out.value, in.center, out.center};
}

Radii inradius_outradius(const CurvatureProfile& kp) {
  return inradius_outradius(support_about_centroid(kp));
}

double bonnesen_sigma(double I) {
  if (!(I >= 1.0 - 1e-12)) {
    throw DomainError("isoperimetric ratio must be >= 1, got " + std::to_string(I));
  }
  I = std::max(I, 1.0);
  const double s = std::sqrt(I) + std::sqrt(I - 1.0);
  return s * s;
}

BonnesenWindow bonnesen_window(double L, double A) {
  const double disc = std::sqrt(std::max(0.0, L * L - 4.0 * kPi * A));
  return {(L - disc) / (2.0 * kPi), (L + disc) / (2.0 * kPi)};
}

double isoperimetric_ratio(double L, double A) { return L * L / (4.0 * kPi * A); }

CurvatureProfile project_closure(const CurvatureProfile& kp) {
  const PeriodicField rho = kp.radius_of_curvature();
  const auto h = first_harmonics(rho);
  const AngularGrid& g = kp.grid();
  std::vector<double> k(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double th = g.theta(j);
    k[j] = 1.0 / (rho[j] - (h.c1 * std::cos(th) + h.s1 * std::sin(th)) / kPi);
  }
  return CurvatureProfile(g, std::move(k));
}

GeometrySnapshot geometry_snapshot(const CurvatureProfile& kp, double t, double lambda) {
  GeometrySnapshot s;
  s.t = t;
  s.L = length(kp);
  const auto sup = support_about_centroid(kp);
  s.A = area(kp);
  s.I = isoperimetric_ratio(s.L, s.A);
  const auto ext = refined_extrema(kp.k());
  s.k_min = ext.min.value;
  s.k_max = ext.max.value;
  s.lambda = lambda;
  s.closure_defect = closure_defect(kp);
  const Radii r = inradius_outradius(sup);
  s.r_in = r.r_in;
  s.r_out = r.r_out;
  return s;
}

}  // namespace kflow
