#include "reference.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace kflow::reference {

namespace {

constexpr double kPi = std::numbers::pi;

double simpson_step(const Fn& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const Fn& f, double a, double b, double tol) {
  // Split first so periodic integrands cannot fool the initial estimate.
  constexpr int kPieces = 16;
  double total = 0.0;
  const double h = (b - a) / kPieces;
  for (int i = 0; i < kPieces; ++i) {
    const double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
    const double f0 = f(x0), fm = f(xm), f1 = f(x1);
    total += simpson_step(f, x0, x1, f0, fm, f1, h / 6.0 * (f0 + 4.0 * fm + f1), tol / kPieces, 40);
  }
  return total;
}

double ellipse_perimeter(double a, double b) {
  return integrate(
      [a, b](double t) { return std::sqrt(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t)); },
      0.0, 2.0 * kPi, 1e-15);
}

double ellipse_curvature(double a, double b, double theta) {
  const double q = a * a * std::cos(theta) * std::cos(theta) + b * b * std::sin(theta) * std::sin(theta);
  return q * std::sqrt(q) / (a * a * b * b);
}

double second_derivative(const Fn& f, double x, double h) {
  auto d2 = [&](double s) { return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s); };
  // Two Richardson levels remove the h^2 and h^4 terms.
  const double d1 = d2(h), dh = d2(0.5 * h), dq = d2(0.25 * h);
  const double r1 = (4.0 * dh - d1) / 3.0;
  const double r2 = (4.0 * dq - dh) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

double extinction_time(double r0, double alpha) { return std::pow(r0, 1.0 + alpha) / (1.0 + alpha); }

double contraction_radius(double r0, double alpha, double t) {
  const double base = std::pow(r0, 1.0 + alpha) - (1.0 + alpha) * t;
  if (!(base > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::pow(base, 1.0 / (1.0 + alpha));
}

double contraction_curvature_rk4(double k0, double alpha, double t, int steps) {
  auto f = [alpha](double k) { return std::pow(k, 2.0 + alpha); };
  const double h = t / steps;
  double k = k0;
  for (int i = 0; i < steps; ++i) {
    const double s1 = f(k);
    const double s2 = f(k + 0.5 * h * s1);
    const double s3 = f(k + 0.5 * h * s2);
    const double s4 = f(k + h * s3);
    k += h / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
  }
  return k;
}

double step_doubling_ratio(double k0, double alpha, double t, int steps) {
  const double exact = 1.0 / contraction_radius(1.0 / k0, alpha, t);
  const double e1 = std::abs(contraction_curvature_rk4(k0, alpha, t, steps) - exact);
  const double e2 = std::abs(contraction_curvature_rk4(k0, alpha, t, 2 * steps) - exact);
  return e1 / e2;
}

CurveMeasures curve_measures(const Fn& k, int n) {
  const double h = 2.0 * kPi / n;
  double x = 0.0, y = 0.0, length = 0.0, twice_area = 0.0;
  auto tx = [&](double s) { return -std::sin(s) / k(s); };
  auto ty = [&](double s) { return std::cos(s) / k(s); };
  for (int i = 0; i < n; ++i) {
    const double th = i * h;
    // Trapezoid on the periodic outer integrands is spectrally accurate.
    length += h / k(th);
    twice_area += h * (x * std::cos(th) + y * std::sin(th)) / k(th);
    const double m = th + 0.5 * h, e = th + h;
    x += h / 6.0 * (tx(th) + 4.0 * tx(m) + tx(e));
    y += h / 6.0 * (ty(th) + 4.0 * ty(m) + ty(e));
  }
  return {length, 0.5 * twice_area};
}

double lambda(const LawTerms& law, const Fn& k) {
  const double a = law.alpha;
  auto power = [&](double p) {
    return integrate([&](double t) { return std::pow(k(t), p); }, 0.0, 2.0 * kPi);
  };
  if (law.kind == "Contraction") return 0.0;
  if (law.kind == "LP") return power(a) / (2.0 * kPi);
  const CurveMeasures m = curve_measures(k);
  if (law.kind == "AP") return power(a - 1.0) / m.length;
  if (law.kind == "G1") return 2.0 * m.area / (m.length * m.length) * power(a);
  if (law.kind == "G2") return m.length / (4.0 * kPi * m.area) * power(a - 1.0);
  throw std::invalid_argument("unknown law " + law.kind);
}

double curvature_rhs(const LawTerms& law, const Fn& k, double theta) {
  const Fn v = [&](double t) { return std::pow(k(t), law.alpha); };
  const double kk = k(theta);
  return kk * kk * (second_derivative(v, theta, 0.05) + v(theta) - lambda(law, k));
}

TsoConstants tso_constants(double L0, double A0, double alpha) {
  const double I = L0 * L0 / (4.0 * kPi * A0);
  const double s = std::sqrt(I) + std::sqrt(std::max(0.0, I - 1.0));
  TsoConstants c{};
  c.sigma = s * s;
  const double r = std::sqrt(A0 / kPi) / c.sigma;
  c.beta = std::pow(0.5, (2.0 + alpha) / (1.0 + alpha)) * r;
  c.T1 = std::pow(r, 1.0 + alpha) / (2.0 + 2.0 * alpha);
  c.Q0 = std::pow(2.0 * (alpha + 1.0) / (alpha * std::pow(c.beta, 1.0 + 1.0 / alpha)), alpha);
  return c;
}

std::vector<NamedValue> all_values() {
  std::vector<NamedValue> out;
  const double L = ellipse_perimeter(2.0, 1.0);
  out.push_back({"ellipse_2_1.perimeter", L});
  out.push_back({"ellipse_2_1.area", 2.0 * kPi});
  out.push_back({"ellipse_2_1.k_max", ellipse_curvature(2.0, 1.0, 0.0)});
  out.push_back({"ellipse_2_1.k_min", ellipse_curvature(2.0, 1.0, kPi / 2.0)});
  out.push_back({"ellipse_2_1.lp_limit_curvature", 2.0 * kPi / L});
  out.push_back({"ellipse_2_1.ap_limit_radius", std::sqrt(2.0)});
  out.push_back({"ellipse_2_1.stable_dt_factor_alpha2",
                 std::pow(ellipse_curvature(2.0, 1.0, 0.0), 3.0)});
  const TsoConstants tso = tso_constants(L, 2.0 * kPi, 1.0);
  out.push_back({"ellipse_2_1.alpha1.sigma", tso.sigma});
  out.push_back({"ellipse_2_1.alpha1.beta", tso.beta});
  out.push_back({"ellipse_2_1.alpha1.T1", tso.T1});
  out.push_back({"ellipse_2_1.alpha1.Q0", tso.Q0});
  out.push_back({"integral.inv_2_plus_sin",
                 integrate([](double t) { return 1.0 / (2.0 + std::sin(t)); }, 0.0, 2.0 * kPi)});
  out.push_back({"closure_defect.rho_1_plus_0.3cos",
                 integrate([](double t) { return (1.0 + 0.3 * std::cos(t)) * std::cos(t); }, 0.0,
                           2.0 * kPi)});
  const Fn k2 = [](double t) { return 1.0 + 0.1 * std::cos(2.0 * t); };
  out.push_back({"rhs.LP.alpha1.k_1_plus_0.1cos2.theta0", curvature_rhs({"LP", 1.0}, k2, 0.0)});
  out.push_back({"rhs.AP.alpha2.k_1_plus_0.1cos2.theta0", curvature_rhs({"AP", 2.0}, k2, 0.0)});
  out.push_back({"rhs.G1.alpha1.k_1_plus_0.1cos2.theta0.7", curvature_rhs({"G1", 1.0}, k2, 0.7)});
  out.push_back({"rhs.G2.alpha2.k_1_plus_0.1cos2.theta0.7", curvature_rhs({"G2", 2.0}, k2, 0.7)});
  const Fn es = [](double t) { return std::exp(std::sin(t)); };
  out.push_back({"d2.exp_sin.theta0.3", second_derivative(es, 0.3, 2.0 * kPi / 256.0 / 16.0)});
  out.push_back({"gradient.k_1_plus_0.2cos.alpha1", 1.2 * 1.2});
  for (double a : {0.5, 1.0, 2.0}) {
    const double t = 0.9 * extinction_time(1.0, a);
    char name[96];
    std::snprintf(name, sizeof name, "contraction.alpha%g.radius_at_0.9_extinction", a);
    out.push_back({name, contraction_radius(1.0, a, t)});
  }
  out.push_back({"contraction.alpha1.radius_t0.375", contraction_radius(1.0, 1.0, 0.375)});
  out.push_back({"contraction.alpha1.radius_t0.49", contraction_radius(1.0, 1.0, 0.49)});
  out.push_back({"step_doubling.alpha1.ratio_80_160", step_doubling_ratio(1.0, 1.0, 0.25, 80)});
  return out;
}

}  // namespace kflow::reference
