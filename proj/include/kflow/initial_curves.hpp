#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "kflow/curve_model.hpp"

namespace kflow {

struct Circle {
  double r = 1.0;
  bool operator==(const Circle&) const = default;
};

/// Major axis a along x, minor axis b along y.
struct Ellipse {
  double a = 2.0;
  double b = 1.0;
  bool operator==(const Ellipse&) const = default;
};

struct SupportMode {
  int n = 2;
  double amplitude = 0.0;
  double phase = 0.0;
  bool operator==(const SupportMode&) const = default;
};

/// u = r0 + sum amplitude_i cos(n_i theta + phase_i), n_i >= 2.
struct PerturbedCircle {
  double r0 = 1.0;
  std::vector<SupportMode> modes;
  bool operator==(const PerturbedCircle&) const = default;
};

struct SupportTerm {
  int m = 0;
  double a = 0.0;  ///< cos(m theta) coefficient
  double b = 0.0;  ///< sin(m theta) coefficient
  bool operator==(const SupportTerm&) const = default;
};

/// u = c0 + sum a_m cos(m theta) + b_m sin(m theta).
struct ExplicitSupport {
  double c0 = 1.0;
  std::vector<SupportTerm> terms;
  bool operator==(const ExplicitSupport&) const = default;
};

/// Seeded perturbed circle; see random_convex.
struct RandomConvex {
  std::uint64_t seed = 0;
  double r0 = 1.0;
  int max_mode = 6;
  double budget = 0.8;
  bool operator==(const RandomConvex&) const = default;
};

using CurveKind = std::variant<Circle, Ellipse, PerturbedCircle, ExplicitSupport, RandomConvex>;

struct CurveSpec {
  CurveKind kind = Circle{};
  std::size_t grid_n = 256;
  bool operator==(const CurveSpec&) const = default;
};

/// Support function of the spec sampled on its grid.
PeriodicField support_function(const CurveSpec& spec);

/// Curvature 1/(u_thth + u) from the spec's support function. Throws
/// DomainError for invalid parameters and ConvexityError (with the minimizing
/// angle) when u_thth + u is not positive.
CurvatureProfile generate(const CurveSpec& spec);

/// Modes 2..max_mode with random amplitudes and phases, scaled so that
/// sum (n^2 - 1)|a_n| = budget * r0. Deterministic in the seed.
PerturbedCircle random_convex_modes(std::uint64_t seed, double r0, int max_mode, double budget);

CurvatureProfile random_convex(std::uint64_t seed, double r0, int max_mode, double budget,
                               std::size_t grid_n = 256);

}  // namespace kflow
