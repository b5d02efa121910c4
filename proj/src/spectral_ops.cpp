#include "kflow/spectral_ops.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace kflow {

NonFiniteError::NonFiniteError(std::size_t index, double value)
    : Error("non-finite sample at index " + std::to_string(index) + " (value " +
            std::to_string(value) + ")"),
      index_(index) {}

ConvexityError::ConvexityError(std::size_t index, double theta, double value)
    : Error("convexity violation: curvature " + std::to_string(value) + " at index " +
            std::to_string(index) + " (theta = " + std::to_string(theta) + ")"),
      index_(index),
      theta_(theta),
      value_(value) {}

BlowUpError::BlowUpError(double k_max)
    : Error("curvature blow-up: k_max = " + std::to_string(k_max)), k_max_(k_max) {}

AngularGrid::AngularGrid(std::size_t n) : n_(n), spacing_(0.0) {
  if (n < kMinSize || n % 2 != 0) {
    throw DomainError("angular grid size must be even and >= 16, got " + std::to_string(n));
  }
  spacing_ = 2.0 * std::numbers::pi / static_cast<double>(n);
}

double AngularGrid::theta(std::size_t j) const {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_);
}

std::vector<double> AngularGrid::thetas() const {
  std::vector<double> t(n_);
  for (std::size_t j = 0; j < n_; ++j) t[j] = theta(j);
  return t;
}

PeriodicField::PeriodicField(AngularGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DomainError("field has " + std::to_string(values_.size()) +
                      " samples on a grid of size " + std::to_string(grid_.size()));
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j])) throw NonFiniteError(j, values_[j]);
  }
}

void PeriodicField::check_same_grid(const PeriodicField& other) const {
  if (!(grid_ == other.grid_)) throw DomainError("fields live on different grids");
}

PeriodicField operator+(const PeriodicField& a, const PeriodicField& b) {
  return a.zip(b, [](double x, double y) { return x + y; });
}
PeriodicField operator-(const PeriodicField& a, const PeriodicField& b) {
  return a.zip(b, [](double x, double y) { return x - y; });
}
PeriodicField operator*(const PeriodicField& a, const PeriodicField& b) {
  return a.zip(b, [](double x, double y) { return x * y; });
}
PeriodicField operator*(double s, const PeriodicField& a) {
  return a.map([s](double x) { return s * x; });
}

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> real(n);
    std::vector<std::complex<double>> spec(n / 2 + 1);
    auto* c = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), c, flags);
    p.backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real.data(), flags);
    plans_.emplace(n, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

}  // namespace

std::vector<std::complex<double>> forward_transform(std::span<const double> samples) {
  const std::size_t n = samples.size();
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  const PlanPair p = PlanCache::instance().get(n);
  fftw_execute_dft_r2c(p.forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse_transform(std::span<const std::complex<double>> coeffs,
                                      std::size_t n) {
  std::vector<std::complex<double>> in(coeffs.begin(), coeffs.end());
  std::vector<double> out(n);
  const PlanPair p = PlanCache::instance().get(n);
  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double inv = 1.0 / static_cast<double>(n);
  for (double& x : out) x *= inv;
  return out;
}

PeriodicField deriv(const PeriodicField& f, int order) {
  if (order != 1 && order != 2) {
    throw DomainError("derivative order must be 1 or 2, got " + std::to_string(order));
  }
  const std::size_t n = f.size();
  auto c = forward_transform(f.values());
  const std::size_t nyquist = n / 2;
  for (std::size_t m = 0; m <= nyquist; ++m) {
    const double wm = static_cast<double>(m);
    if (order == 1) {
      c[m] *= std::complex<double>(0.0, wm);
    } else {
      c[m] *= -wm * wm;
    }
  }
  if (order == 1) c[nyquist] = 0.0;
  return PeriodicField(f.grid(), inverse_transform(c, n));
}

double integrate(const PeriodicField& f) {
  // Neumaier summation: conserved integrals are differenced across samples
  // only a few steps apart, so plain summation noise would dominate.
  double sum = 0.0;
  double comp = 0.0;
  for (double x : f.values()) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return f.grid().spacing() * (sum + comp);
}

FirstHarmonics first_harmonics(const PeriodicField& f) {
  const AngularGrid& g = f.grid();
  double c = 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double th = g.theta(j);
    c += f[j] * std::cos(th);
    s += f[j] * std::sin(th);
  }
  return {g.spacing() * c, g.spacing() * s};
}

TrigInterpolant::TrigInterpolant(const PeriodicField& f) : grid_(f.grid()) {
  const std::size_t n = f.size();
  const std::size_t half = n / 2;
  const auto c = forward_transform(f.values());
  const double inv = 1.0 / static_cast<double>(n);
  cos_coeffs_.assign(half + 1, 0.0);
  sin_coeffs_.assign(half + 1, 0.0);
  cos_coeffs_[0] = c[0].real() * inv;
  for (std::size_t m = 1; m < half; ++m) {
    cos_coeffs_[m] = 2.0 * c[m].real() * inv;
    sin_coeffs_[m] = -2.0 * c[m].imag() * inv;
  }
  cos_coeffs_[half] = c[half].real() * inv;
}

void TrigInterpolant::add_first_harmonic(double c, double s) {
  cos_coeffs_[1] += c;
  sin_coeffs_[1] += s;
}

void TrigInterpolant::set_first_harmonic(double c, double s) {
  cos_coeffs_[1] = c;
  sin_coeffs_[1] = s;
}

TrigInterpolant::Jet TrigInterpolant::evaluate(double theta) const {
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  double cm = 1.0;
  double sm = 0.0;
  Jet jet{cos_coeffs_[0], 0.0, 0.0};
  for (std::size_t m = 1; m < cos_coeffs_.size(); ++m) {
    const double cn = cm * c1 - sm * s1;
    const double sn = sm * c1 + cm * s1;
    cm = cn;
    sm = sn;
    const double a = cos_coeffs_[m];
    const double b = sin_coeffs_[m];
    const double wm = static_cast<double>(m);
    jet.value += a * cm + b * sm;
    jet.d1 += wm * (b * cm - a * sm);
    jet.d2 -= wm * wm * (a * cm + b * sm);
  }
  return jet;
}

namespace {

constexpr std::size_t kMaxCandidates = 4;

// Polishes a grid extremum; sign = +1 for maxima, -1 for minima.
Extremum polish(const TrigInterpolant& interp, double theta0, double grid_value, double sign) {
  const double h = interp.grid().spacing();
  Extremum best{grid_value, theta0};
  double theta = theta0;
  for (int it = 0; it < 30; ++it) {
    const auto jet = interp.evaluate(theta);
    if (it > 0 && sign * (jet.value - best.value) > 0.0) best = {jet.value, theta};
    if (sign * jet.d2 >= 0.0) break;
    const double step = -jet.d1 / jet.d2;
    if (std::abs(step) < 1e-14) break;
    theta += step;
    if (std::abs(theta - theta0) > h) break;
  }
  return best;
}

Extremum search(const TrigInterpolant& interp, std::span<const double> s, double sign) {
  const std::size_t n = s.size();
  std::vector<std::size_t> cand;
  for (std::size_t j = 0; j < n; ++j) {
    const double prev = s[(j + n - 1) % n];
    const double next = s[(j + 1) % n];
    if (sign * (s[j] - prev) >= 0.0 && sign * (s[j] - next) >= 0.0) cand.push_back(j);
  }
  std::sort(cand.begin(), cand.end(),
            [&](std::size_t a, std::size_t b) { return sign * (s[a] - s[b]) > 0.0; });
  if (cand.size() > kMaxCandidates) cand.resize(kMaxCandidates);
  const AngularGrid& g = interp.grid();
  Extremum best{s[cand.front()], g.theta(cand.front())};
  for (std::size_t j : cand) {
    const Extremum e = polish(interp, g.theta(j), s[j], sign);
    if (sign * (e.value - best.value) > 0.0) best = e;
  }
  return best;
}

}  // namespace

Extremum refined_min(const TrigInterpolant& interp, std::span<const double> samples) {
  return search(interp, samples, -1.0);
}

Extremum refined_max(const TrigInterpolant& interp, std::span<const double> samples) {
  return search(interp, samples, +1.0);
}

Extrema refined_extrema(const TrigInterpolant& interp, std::span<const double> samples) {
  return {search(interp, samples, -1.0), search(interp, samples, +1.0)};
}

Extrema refined_extrema(const PeriodicField& f) {
  const TrigInterpolant interp(f);
  return refined_extrema(interp, f.values());
}

}  // namespace kflow
