#pragma once

#include <optional>
#include <vector>

#include "kflow/errors.hpp"
#include "kflow/spectral_ops.hpp"

namespace kflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  bool operator==(const Vec2&) const = default;
};

double norm(Vec2 v);

/// Curvature sampled against the outward normal angle; strictly positive.
class CurvatureProfile {
 public:
  /// Throws ConvexityError at the first non-positive sample.
  explicit CurvatureProfile(PeriodicField k);
  CurvatureProfile(const AngularGrid& grid, std::vector<double> k);

  const AngularGrid& grid() const { return k_.grid(); }
  const PeriodicField& k() const { return k_; }
  std::span<const double> values() const { return k_.values(); }
  std::size_t size() const { return k_.size(); }
  double operator[](std::size_t j) const { return k_[j]; }

  /// Radius of curvature 1/k.
  PeriodicField radius_of_curvature() const;

 private:
  PeriodicField k_;
};

/// Support function u about `center`: u(theta) = <X(theta) - center, N(theta)>.
struct SupportRepresentation {
  PeriodicField u;
  Vec2 center;
};

double length(const CurvatureProfile& kp);

/// Enclosed area 1/2 * integral of u/k, with u taken about the area centroid.
double area(const CurvatureProfile& kp);

/// Euclidean norm of the first harmonics of 1/k. Zero for a closed curve.
double closure_defect(const CurvatureProfile& kp);

/// Tangent integration X(theta) = anchor + int_0^theta (-sin, cos)/k; the
/// antiderivative is taken in Fourier space.
std::vector<Vec2> reconstruct_points(const CurvatureProfile& kp, Vec2 anchor);

/// Area centroid of the curve reconstructed with anchor (0, 0).
Vec2 area_centroid(const CurvatureProfile& kp);

/// Support function about the area centroid, in the frame where the curve is
/// reconstructed from anchor (0, 0).
SupportRepresentation support_about_centroid(const CurvatureProfile& kp);

struct Radii {
  double r_in;
  double r_out;
  Vec2 in_center;   ///< relative to the supplied support center frame
  Vec2 out_center;
};

/// Optimizer ran out of iterations; carries the best point found.
class OptimizerError : public Error {
 public:
  OptimizerError(const std::string& what, Vec2 best_center, double best_value)
      : Error(what), best_center_(best_center), best_value_(best_value) {}
  Vec2 best_center() const { return best_center_; }
  double best_value() const { return best_value_; }

 private:
  Vec2 best_center_;
  double best_value_;
};

struct RadiiGuess {
  Vec2 in_center;
  Vec2 out_center;
};

/// Inradius max_c min_theta u_c and outradius min_c max_theta u_c, each by a
/// 2-D simplex descent over the center. `guess` warm-starts the descent;
/// coordinates are relative to `support.center`.
Radii inradius_outradius(const SupportRepresentation& support,
                         std::optional<RadiiGuess> guess = std::nullopt);
Radii inradius_outradius(const CurvatureProfile& kp);

/// (sqrt(I) + sqrt(I - 1))^2. I below 1 by more than 1e-12 is a DomainError;
/// round-off below 1 is treated as 1.
double bonnesen_sigma(double isoperimetric_ratio);

struct BonnesenWindow {
  double lower;
  double upper;
};

/// [(L - sqrt(L^2 - 4 pi A)) / 2pi, (L + sqrt(L^2 - 4 pi A)) / 2pi].
BonnesenWindow bonnesen_window(double L, double A);

double isoperimetric_ratio(double L, double A);

/// Removes the first harmonic of 1/k so the curve closes exactly.
CurvatureProfile project_closure(const CurvatureProfile& kp);

struct GeometrySnapshot {
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
};

GeometrySnapshot geometry_snapshot(const CurvatureProfile& kp, double t, double lambda);

}  // namespace kflow
