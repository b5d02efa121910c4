#include "kflow/initial_curves.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace kflow {

namespace {

struct SupportSample {
  double u;
  double u_plus_upp;  // u_thth + u
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_modes(const PerturbedCircle& p) {
  if (!(p.r0 > 0.0)) throw DomainError("PerturbedCircle requires r0 > 0");
  for (const auto& m : p.modes) {
    if (m.n == 1) {
      throw DomainError("PerturbedCircle mode n = 1 is a pure translation and is not allowed");
    }
    if (m.n < 2) throw DomainError("PerturbedCircle modes must have n >= 2");
  }
}

// Closed-form support function and u_thth + u at one angle.
SupportSample evaluate(const CurveKind& kind, double th) {
  return std::visit(
      Overloaded{
          [&](const Circle& c) { return SupportSample{c.r, c.r}; },
          [&](const Ellipse& e) {
            const double c = std::cos(th), s = std::sin(th);
            const double q = e.a * e.a * c * c + e.b * e.b * s * s;
            return SupportSample{std::sqrt(q), e.a * e.a * e.b * e.b / (q * std::sqrt(q))};
          },
          [&](const PerturbedCircle& p) {
            SupportSample r{p.r0, p.r0};
            for (const auto& m : p.modes) {
              const double c = m.amplitude * std::cos(m.n * th + m.phase);
              r.u += c;
              r.u_plus_upp += (1.0 - m.n * m.n) * c;
            }
            return r;
          },
          [&](const ExplicitSupport& x) {
            SupportSample r{x.c0, x.c0};
            for (const auto& t : x.terms) {
              const double c = t.a * std::cos(t.m * th) + t.b * std::sin(t.m * th);
              r.u += c;
              r.u_plus_upp += (1.0 - t.m * t.m) * c;
            }
            return r;
          },
          [&](const RandomConvex&) { return SupportSample{}; },
      },
      kind);
}

CurveKind resolve(const CurveKind& kind) {
  if (const auto* r = std::get_if<RandomConvex>(&kind)) {
    return random_convex_modes(r->seed, r->r0, r->max_mode, r->budget);
  }
  return kind;
}

void validate(const CurveKind& kind) {
  std::visit(Overloaded{
                 [](const Circle& c) {
                   if (!(c.r > 0.0)) throw DomainError("Circle requires r > 0");
                 },
                 [](const Ellipse& e) {
                   if (!(e.b > 0.0) || !(e.a >= e.b)) {
                     throw DomainError("Ellipse requires a >= b > 0");
                   }
                 },
                 [](const PerturbedCircle& p) { validate_modes(p); },
                 [](const ExplicitSupport& x) {
                   for (const auto& t : x.terms) {
                     if (t.m < 0) throw DomainError("ExplicitSupport modes must be >= 0");
                   }
                 },
                 [](const RandomConvex& r) {
                   if (!(r.r0 > 0.0)) throw DomainError("RandomConvex requires r0 > 0");
                   if (r.max_mode < 2) throw DomainError("RandomConvex requires max_mode >= 2");
                   if (!(r.budget >= 0.0 && r.budget < 1.0)) {
                     throw DomainError("RandomConvex requires 0 <= budget < 1");
                   }
                 },
             },
             kind);
}

}  // namespace

PeriodicField support_function(const CurveSpec& spec) {
  validate(spec.kind);
  const CurveKind kind = resolve(spec.kind);
  return PeriodicField::sample(AngularGrid(spec.grid_n),
                               [&](double th) { return evaluate(kind, th).u; });
}

CurvatureProfile generate(const CurveSpec& spec) {
  validate(spec.kind);
  const CurveKind kind = resolve(spec.kind);
  const AngularGrid grid(spec.grid_n);
  std::vector<double> rho(grid.size());
  std::size_t j_min = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    rho[j] = evaluate(kind, grid.theta(j)).u_plus_upp;
    if (rho[j] < rho[j_min]) j_min = j;
  }
  if (!(rho[j_min] > 0.0)) {
    throw ConvexityError(j_min, grid.theta(j_min), rho[j_min]);
  }
  std::vector<double> k(grid.size());
  for (std::size_t j = 0; j < k.size(); ++j) k[j] = 1.0 / rho[j];
  return CurvatureProfile(grid, std::move(k));
}

PerturbedCircle random_convex_modes(std::uint64_t seed, double r0, int max_mode, double budget) {
  validate(RandomConvex{seed, r0, max_mode, budget});
  std::mt19937_64 rng(seed);
  // Explicit 53-bit mapping keeps the stream identical across standard libraries.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  PerturbedCircle p{r0, {}};
  double spent = 0.0;
  for (int n = 2; n <= max_mode; ++n) {
    const double w = uniform();
    const double phase = 2.0 * std::numbers::pi * uniform();
    p.modes.push_back({n, w, phase});
    spent += (n * n - 1.0) * w;
  }
  const double scale = spent > 0.0 ? budget * r0 / spent : 0.0;
  for (auto& m : p.modes) m.amplitude *= scale;
  return p;
}

CurvatureProfile random_convex(std::uint64_t seed, double r0, int max_mode, double budget,
                               std::size_t grid_n) {
  return generate(CurveSpec{random_convex_modes(seed, r0, max_mode, budget), grid_n});
}

}  // namespace kflow
