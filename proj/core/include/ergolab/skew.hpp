#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <vector>

#include "ergolab/gaussian.hpp"
#include "ergolab/numeric.hpp"
#include "ergolab/products.hpp"
#include "ergolab/rng.hpp"

namespace ergolab::skew {

/// Generator of a Z-action together with everything an extension needs.
template <class B>
concept ZAction = requires(const B& b, const typename B::Point& p) {
  { b.step(p) } -> std::convertible_to<typename B::Point>;
};

/// Nonsingular Z-action exposing log d(mu o T)/d mu at a point.
template <class B>
concept NonsingularZAction = ZAction<B> && requires(const B& b, const typename B::Point& p) {
  { b.rn_log_one(p) } -> std::convertible_to<double>;
};

// --- concrete bases ---

struct ProductBase {
  using Point = products::Point;
  const products::ProductSystem* sys;
  Point step(const Point& x) const { return products::apply_T(*sys, x, 1); }
  double rn_log_one(const Point& x) const { return products::rn_log(*sys, 1, x); }
  Point sample(Rng& rng) const { return products::sample_point(*sys, rng); }
};

struct GaussianBase {
  using Point = gaussian::Vector;
  const gaussian::GaussianSpace* space;
  const gaussian::AffineMap* map;
  Point step(const Point& x) const { return gaussian::apply_T(*space, *map, x); }
  // d mu o T / d mu (x) = 1 / exp_f(Tx), from d mu o T^{-1}/d mu = exp_f.
  double rn_log_one(const Point& x) const {
    return -gaussian::exp_log(*space, map->f, step(x));
  }
  Point sample(Rng& rng) const { return gaussian::sample(*space, rng); }
};

/// Measure-preserving rotation y -> y + alpha (mod 1) on [0,1).
struct CircleRotation {
  using Point = double;
  double alpha;
  Point step(Point y) const {
    double z = y + alpha;
    z -= std::floor(z);
    return z;
  }
  double rn_log_one(Point) const { return 0.0; }
  Point sample(Rng& rng) const { return rng.uniform(); }
};

/// Real fiber with compensated accumulation for long orbits.
struct RealFiber {
  double value = 0.0;
  double comp = 0.0;
  void add(double dv) {
    const double y = dv - comp;
    const double t = value + y;
    comp = (t - value) - y;
    value = t;
  }
};

struct IntFiber {
  long long value = 0;
  void add(long long dv) { value += dv; }
};

struct ResidueFiber {
  long long value = 0;
  long long modulus = 1;
  void add(long long dv) {
    value = (value + dv) % modulus;
    if (value < 0) value += modulus;
  }
};

template <class P, class F>
struct SkewState {
  P base;
  F fiber;
};

/// One step of the skew product: (y, g) -> (T y, g + f(y)).
template <ZAction B, class F, class Cocycle>
SkewState<typename B::Point, F> skew_step(const B& base, const Cocycle& cocycle,
                                          SkewState<typename B::Point, F> s) {
  s.fiber.add(cocycle(s.base));
  s.base = base.step(s.base);
  return s;
}

/// One step of the Maharam extension: the cocycle is the log Radon-Nikodym
/// derivative of the base.
template <NonsingularZAction B>
SkewState<typename B::Point, RealFiber> maharam_step(const B& base,
                                                     SkewState<typename B::Point, RealFiber> s) {
  return skew_step<B, RealFiber>(base, [&](const typename B::Point& y) {
    return base.rn_log_one(y);
  }, std::move(s));
}

struct OrbitSample {
  long long step;
  double fiber;
};

/// Runs n_steps of the skew product and records the fiber every `stride`
/// steps (plus the final state).
template <ZAction B, class Cocycle>
std::vector<OrbitSample> run_orbit(const B& base, const Cocycle& cocycle,
                                   typename B::Point start, long long n_steps,
                                   long long stride = 1) {
  std::vector<OrbitSample> trace;
  SkewState<typename B::Point, RealFiber> s{std::move(start), {}};
  for (long long k = 1; k <= n_steps; ++k) {
    s = skew_step<B, RealFiber>(base, cocycle, std::move(s));
    if (k % stride == 0 || k == n_steps) trace.push_back({k, s.fiber.value});
  }
  return trace;
}

struct RecurrenceReport {
  // (step, min |fiber| seen up to that step) at power-of-two checkpoints
  std::vector<std::pair<long long, double>> min_abs_checkpoints;
  long long window_entries = 0;  // steps with |fiber| < window
  double window = 0.0;
  double final_fiber = 0.0;
  double empirical_mean_increment = 0.0;
};

/// Tracks how close the fiber returns to 0 along one orbit. Evidence only:
/// a finite orbit cannot prove recurrence.
template <ZAction B, class Cocycle>
RecurrenceReport atkinson_diagnostic(const B& base, const Cocycle& cocycle,
                                     typename B::Point start, long long n_steps, double window) {
  RecurrenceReport rep;
  rep.window = window;
  SkewState<typename B::Point, RealFiber> s{std::move(start), {}};
  double min_abs = std::numeric_limits<double>::infinity();
  long long next_checkpoint = 1;
  for (long long k = 1; k <= n_steps; ++k) {
    s = skew_step<B, RealFiber>(base, cocycle, std::move(s));
    min_abs = std::min(min_abs, std::abs(s.fiber.value));
    if (std::abs(s.fiber.value) < window) ++rep.window_entries;
    if (k == next_checkpoint || k == n_steps) {
      rep.min_abs_checkpoints.emplace_back(k, min_abs);
      next_checkpoint *= 2;
    }
  }
  rep.final_fiber = s.fiber.value;
  rep.empirical_mean_increment = s.fiber.value / static_cast<double>(n_steps);
  return rep;
}

struct InvarianceCheck {
  double mean_difference = 0.0;
  double se = 0.0;
  std::size_t n_samples = 0;
};

/// Monte Carlo check that the Maharam extension preserves mu x e^{-t} dt:
/// for F(x, t) = g(x) 1_{[s0,s1]}(t), compares E[F o T_rho] with E[F] when the
/// fiber coordinate is drawn from the truncated e^{-t} law on
/// [s0 - pad, s1 + pad]. The pad must dominate |rho| over the sampled points.
template <NonsingularZAction B, class G>
InvarianceCheck maharam_invariance_check(const B& base, const G& g, double s0, double s1,
                                         double pad, std::size_t n_samples, std::uint64_t seed) {
  const double A = s0 - pad, Bnd = s1 + pad;
  const double ea = std::exp(-A), eb = std::exp(-Bnd);
  std::vector<double> diffs(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng = make_stream(seed, 0x3c, i);
    const auto x = base.sample(rng);
    const double u = rng.uniform();
    const double t = -std::log(ea - u * (ea - eb));  // truncated exponential on [A, Bnd]
    const double rho = base.rn_log_one(x);
    const double gx = g(x) ? 1.0 : 0.0;
    const double gtx = g(base.step(x)) ? 1.0 : 0.0;
    const double lhs = gtx * ((t + rho >= s0 && t + rho <= s1) ? 1.0 : 0.0);
    const double rhs = gx * ((t >= s0 && t <= s1) ? 1.0 : 0.0);
    diffs[i] = lhs - rhs;
  }
  const MeanAndSe ms = mean_and_se(diffs);
  return {ms.mean, ms.se, n_samples};
}

/// Stable FNV-1a hashes of canonically formatted points, for orbit traces.
std::uint64_t point_hash(const products::Point& x);
std::uint64_t point_hash(const gaussian::Vector& x);
std::uint64_t point_hash(double x);

}  // namespace ergolab::skew
