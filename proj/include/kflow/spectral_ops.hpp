#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "kflow/errors.hpp"

namespace kflow {

/// Uniform periodic sampling theta_j = 2*pi*j/n of the normal angle.
class AngularGrid {
 public:
  static constexpr std::size_t kMinSize = 16;

  /// Throws DomainError unless n >= 16 and n is even.
  explicit AngularGrid(std::size_t n);

  std::size_t size() const { return n_; }
  double spacing() const { return spacing_; }
  double theta(std::size_t j) const;
  std::vector<double> thetas() const;

  bool operator==(const AngularGrid& other) const = default;

 private:
  std::size_t n_;
  double spacing_;
};

/// Real samples of a periodic function on an AngularGrid. All values finite.
class PeriodicField {
 public:
  /// Throws NonFiniteError naming the first offending index, or DomainError
  /// if the sample count does not match the grid.
  PeriodicField(AngularGrid grid, std::vector<double> values);

  /// Samples f(theta_j).
  template <class F>
  static PeriodicField sample(const AngularGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.theta(j));
    return PeriodicField(grid, std::move(v));
  }

  static PeriodicField constant(const AngularGrid& grid, double c) {
    return PeriodicField(grid, std::vector<double>(grid.size(), c));
  }

  const AngularGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

  /// Pointwise map; the result is validated like any other field.
  template <class F>
  PeriodicField map(F&& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(values_[j]);
    return PeriodicField(grid_, std::move(v));
  }

  /// Pointwise combination with another field on the same grid.
  template <class F>
  PeriodicField zip(const PeriodicField& other, F&& f) const {
    check_same_grid(other);
    std::vector<double> v(values_.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(values_[j], other.values_[j]);
    return PeriodicField(grid_, std::move(v));
  }

 private:
  void check_same_grid(const PeriodicField& other) const;

  AngularGrid grid_;
  std::vector<double> values_;
};

PeriodicField operator+(const PeriodicField& a, const PeriodicField& b);
PeriodicField operator-(const PeriodicField& a, const PeriodicField& b);
PeriodicField operator*(const PeriodicField& a, const PeriodicField& b);
PeriodicField operator*(double s, const PeriodicField& a);

/// Forward real transform, unnormalized: c_m = sum_j f_j exp(-i m theta_j),
/// m = 0..n/2.
std::vector<std::complex<double>> forward_transform(std::span<const double> samples);

/// Inverse of forward_transform (divides by n).
std::vector<double> inverse_transform(std::span<const std::complex<double>> coeffs,
                                      std::size_t n);

/// Fourier-space derivative of order 1 or 2. The Nyquist coefficient is
/// dropped for odd orders and scaled by -(n/2)^2 for even orders.
PeriodicField deriv(const PeriodicField& f, int order);

/// Trapezoid rule dtheta * sum f_j.
double integrate(const PeriodicField& f);

struct FirstHarmonics {
  double c1 = 0.0;  ///< integral of f cos(theta)
  double s1 = 0.0;  ///< integral of f sin(theta)
};

FirstHarmonics first_harmonics(const PeriodicField& f);

/// Trigonometric interpolant of a PeriodicField, evaluable at any angle.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const PeriodicField& f);

  struct Jet {
    double value;
    double d1;
    double d2;
  };

  Jet evaluate(double theta) const;
  double value(double theta) const { return evaluate(theta).value; }

  /// Adds c to the cos(theta) and s to the sin(theta) coefficient.
  void add_first_harmonic(double c, double s);
  void set_first_harmonic(double c, double s);
  double cos_coefficient(std::size_t m) const { return cos_coeffs_.at(m); }
  double sin_coefficient(std::size_t m) const { return sin_coeffs_.at(m); }

  const AngularGrid& grid() const { return grid_; }

 private:
  AngularGrid grid_;
  std::vector<double> cos_coeffs_;  // index m = 0..n/2
  std::vector<double> sin_coeffs_;
};

struct Extremum {
  double value;
  double theta;
};

struct Extrema {
  Extremum min;
  Extremum max;
};

/// Extrema of the trigonometric interpolant, located on the grid and then
/// polished by Newton iteration on the interpolant's derivative.
Extrema refined_extrema(const PeriodicField& f);

/// Same as above for a prepared interpolant whose grid samples are given.
Extrema refined_extrema(const TrigInterpolant& interp, std::span<const double> samples);
Extremum refined_min(const TrigInterpolant& interp, std::span<const double> samples);
Extremum refined_max(const TrigInterpolant& interp, std::span<const double> samples);

}  // namespace kflow
