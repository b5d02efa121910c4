#pragma once

// Reference values from the standard library alone: adaptive quadrature,
// finite differences and scalar Runge-Kutta. Shares no code with kflow.

#include <functional>
#include <string>
#include <vector>

namespace kflow::reference {

using Fn = std::function<double(double)>;

/// Adaptive Simpson quadrature of f over [a, b].
double integrate(const Fn& f, double a, double b, double tol = 1e-13);

/// Perimeter of the ellipse with semi-axes a, b from the arc-length integral.
double ellipse_perimeter(double a, double b);

/// Curvature of the ellipse a, b at outward normal angle theta.
double ellipse_curvature(double a, double b, double theta);

/// Second derivative by a Richardson-extrapolated central difference.
double second_derivative(const Fn& f, double x, double h);

/// Radius at time t of a circle under k^alpha contraction; NaN past extinction.
double contraction_radius(double r0, double alpha, double t);

/// Extinction time r0^(1+alpha) / (1+alpha).
double extinction_time(double r0, double alpha);

/// Classical RK4 on y' = y^(2+alpha), the curvature of a contracting circle,
/// with `steps` equal steps to time t.
double contraction_curvature_rk4(double k0, double alpha, double t, int steps);

/// Global-error ratio e(N)/e(2N) of the scalar RK4 above against the closed form.
double step_doubling_ratio(double k0, double alpha, double t, int steps);

/// Length int 1/k and enclosed area of the curve with curvature k(theta),
/// by composite Simpson on `n` panels of the tangent integral.
struct CurveMeasures {
  double length;
  double area;
};
CurveMeasures curve_measures(const Fn& k, int n = 4096);

struct LawTerms {
  std::string kind;  ///< LP, AP, G1, G2 or Contraction
  double alpha;
};

/// lambda of the law for curvature k(theta).
double lambda(const LawTerms& law, const Fn& k);

/// Curvature evolution k^2 [(k^alpha)'' + k^alpha - lambda] at theta.
double curvature_rhs(const LawTerms& law, const Fn& k, double theta);

/// Constants of the curvature upper bound from initial length and area.
struct TsoConstants {
  double sigma, beta, T1, Q0;
};
TsoConstants tso_constants(double L0, double A0, double alpha);

struct NamedValue {
  std::string name;
  double value;
};

/// Every reference value the tests pin, in a fixed order.
std::vector<NamedValue> all_values();

}  // namespace kflow::reference
