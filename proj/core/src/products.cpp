#include "ergolab/products.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ergolab/errors.hpp"
#include "ergolab/numeric.hpp"
#include "ergolab/rng.hpp"

namespace ergolab::products {

namespace {

long long mod_pos(long long a, long long p) {
  long long r = a % p;
  return r < 0 ? r + p : r;
}

Rational rational_pow(const Rational& base, long long e) {
  Rational acc = 1;
  Rational b = e >= 0 ? base : Rational(1) / base;
  long long n = e >= 0 ? e : -e;
  for (long long i = 0; i < n; ++i) acc *= b;
  return acc;
}

/// Union of index intervals with O(1) sampling/counting.
struct ComponentSet {
  std::vector<IndexInterval> intervals;
  long long total = 0;

  static ComponentSet full(long long p) { return ComponentSet{{{0, p}}, p}; }
  static ComponentSet from_intervals(std::vector<IndexInterval> iv) {
    ComponentSet s;
    for (const auto& i : iv)
      if (i.count() > 0) {
        s.total += i.count();
        s.intervals.push_back(i);
      }
    return s;
  }
  static ComponentSet from_list(const std::vector<long long>& values) {
    ComponentSet s;
    for (long long v : values) {
      s.intervals.push_back({v, v + 1});
      ++s.total;
    }
    return s;
  }
  long long nth(long long r) const {
    for (const auto& i : intervals) {
      if (r < i.count()) return i.lo + r;
      r -= i.count();
    }
    throw std::logic_error("ComponentSet::nth out of range");
  }
};

}  // namespace

const Rational& FactorSystem::weight(long long j) const {
  if (!explicit_weights.empty()) return explicit_weights.at(static_cast<std::size_t>(j));
  return j < cutoff ? w_low : w_high;
}

Rational FactorSystem::mass(const std::vector<IndexInterval>& intervals) const {
  Rational total = 0;
  for (const auto& iv : intervals) {
    if (iv.count() <= 0) continue;
    if (!explicit_weights.empty()) {
      for (long long j = iv.lo; j < iv.hi; ++j) total += explicit_weights[static_cast<std::size_t>(j)];
    } else {
      const long long low_count = std::max(0LL, std::min(iv.hi, cutoff) - iv.lo);
      const long long high_count = iv.count() - low_count;
      total += Rational(low_count) * w_low + Rational(high_count) * w_high;
    }
  }
  return total;
}

bool FactorSystem::in_Y(long long j) const {
  for (const auto& iv : set_Y)
    if (iv.contains(j)) return true;
  return false;
}

bool FactorSystem::in_Z(long long j) const {
  for (const auto& iv : set_Z)
    if (iv.contains(j)) return true;
  return false;
}

measures::FiniteMeasure FactorSystem::to_finite_measure() const {
  std::vector<double> w(static_cast<std::size_t>(modulus));
  for (long long j = 0; j < modulus; ++j)
    w[static_cast<std::size_t>(j)] = weight(j).convert_to<double>();
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return measures::FiniteMeasure(std::move(w));
}

FactorSystem odometer_factor(long long p, const Rational& lambda, long long prefix_product) {
  if (p < 2) throw std::domain_error("odometer_factor: modulus must be >= 2");
  if (!(lambda > 0 && lambda <= 1))
    throw std::domain_error("odometer_factor: lambda must lie in (0,1]");
  if (prefix_product < 1) throw std::domain_error("odometer_factor: prefix product must be >= 1");

  FactorSystem f;
  f.modulus = p;
  f.step = 1;
  f.cutoff = (p + 1) / 2;  // low zone {j : j < p/2, boundary j = p/2 goes high}
  const long long n_low = f.cutoff;
  const long long n_high = p - f.cutoff;
  const Rational a = numerator(lambda);
  const Rational b = denominator(lambda);
  const Rational denom = Rational(n_low) * b + Rational(n_high) * a;
  f.w_low = b / denom;
  f.w_high = a / denom;

  const long long P = prefix_product;
  // Y = {x < p/2 - P} u {p/2 < x < p - P}
  IndexInterval y1{0, std::max(0LL, (p - 2 * P + 1) / 2)};
  IndexInterval y2{p / 2 + 1, std::max(p / 2 + 1, p - P)};
  f.set_Y = {y1, y2};
  // Z = {P < x < p/2}
  f.set_Z = {IndexInterval{P + 1, f.cutoff}};
  // largest l >= 1 with l*P <= p/2
  f.ell = (2 * P <= p) ? p / (2 * P) : 0;
  return f;
}

FactorSystem uniform_factor(long long p, long long step) {
  if (p < 2) throw std::domain_error("uniform_factor: modulus must be >= 2");
  if (std::gcd(step, p) != 1) throw std::domain_error("uniform_factor: gcd(step, p) must be 1");
  FactorSystem f;
  f.modulus = p;
  f.step = step;
  f.cutoff = p;
  f.w_low = Rational(1, p);
  f.w_high = Rational(1, p);
  return f;
}

FactorSystem factor_from_measure(const measures::FiniteMeasure& mu, long long step) {
  const long long p = static_cast<long long>(mu.modulus());
  if (p < 2) throw std::domain_error("factor_from_measure: modulus must be >= 2");
  if (std::gcd(step, p) != 1)
    throw std::domain_error("factor_from_measure: gcd(step, p) must be 1");
  FactorSystem f;
  f.modulus = p;
  f.step = step;
  f.cutoff = p;
  Rational sum = 0;
  f.explicit_weights.reserve(mu.weights.size());
  for (double w : mu.weights) {
    if (!(w > 0.0))
      throw std::domain_error("factor_from_measure: weights must be strictly positive");
    f.explicit_weights.emplace_back(w);  // exact dyadic rational from the double
    sum += f.explicit_weights.back();
  }
  for (auto& w : f.explicit_weights) w /= sum;
  return f;
}

OdometerSpec::OdometerSpec(Rational lambda_, std::vector<long long> moduli_)
    : lambda(std::move(lambda_)), moduli(std::move(moduli_)) {
  if (!(lambda > 0 && lambda < 1)) throw std::domain_error("OdometerSpec: lambda must lie in (0,1)");
  if (moduli.empty()) throw std::domain_error("OdometerSpec: need at least one modulus");
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (moduli[i] < 2) throw std::domain_error("OdometerSpec: moduli must be >= 2");
    if (i > 0 && moduli[i] <= moduli[i - 1])
      throw std::domain_error("OdometerSpec: moduli must be strictly increasing");
    for (std::size_t j = 0; j < i; ++j)
      if (std::gcd(moduli[i], moduli[j]) != 1)
        throw std::domain_error("OdometerSpec: moduli must be pairwise coprime");
  }
}

std::optional<long long> ProductSystem::state_space_size() const {
  long long total = 1;
  for (const auto& f : factors) {
    if (total > (1LL << 62) / f.modulus) return std::nullopt;
    total *= f.modulus;
  }
  return total;
}

ProductSystem build_odometer(const OdometerSpec& spec) {
  ProductSystem sys;
  BigInt prefix = 1;
  for (long long p : spec.moduli) {
    // Once the prefix exceeds p the recipe sets are empty; clamp to keep
    // everything in machine integers.
    const long long prefix_ll = prefix > p ? p + 1 : prefix.convert_to<long long>();
    sys.factors.push_back(odometer_factor(p, spec.lambda, prefix_ll));
    prefix *= p;
  }
  return sys;
}

Point apply_T(const ProductSystem& sys, const Point& x, long long k) {
  if (x.size() != sys.depth()) throw std::invalid_argument("apply_T: point depth mismatch");
  Point y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& f = sys.factors[i];
    y[i] = mod_pos(x[i] + mod_pos(k, f.modulus) * f.step, f.modulus);
  }
  return y;
}

Point sample_point(const ProductSystem& sys, Rng& rng) {
  Point x(sys.depth());
  for (std::size_t i = 0; i < sys.depth(); ++i) {
    const auto& f = sys.factors[i];
    if (f.explicit_weights.empty()) {
      const double low_mass = (Rational(f.cutoff) * f.w_low).convert_to<double>();
      if (f.cutoff == f.modulus || rng.uniform() < low_mass) {
        x[i] = static_cast<long long>(rng.uniform_below(static_cast<std::uint64_t>(f.cutoff)));
      } else {
        x[i] = f.cutoff + static_cast<long long>(rng.uniform_below(
                              static_cast<std::uint64_t>(f.modulus - f.cutoff)));
      }
    } else {
      double u = rng.uniform();
      long long j = 0;
      for (; j < f.modulus - 1; ++j) {
        u -= f.explicit_weights[static_cast<std::size_t>(j)].convert_to<double>();
        if (u <= 0.0) break;
      }
      x[i] = j;
    }
  }
  return x;
}

Rational rn_ratio(const ProductSystem& sys, long long k, const Point& x) {
  if (x.size() != sys.depth()) throw std::invalid_argument("rn_ratio: point depth mismatch");
  Rational r = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& f = sys.factors[i];
    const long long shifted = mod_pos(x[i] + mod_pos(k, f.modulus) * f.step, f.modulus);
    r *= f.weight(shifted);
    r /= f.weight(x[i]);
  }
  return r;
}

double rn_log(const ProductSystem& sys, long long k, const Point& x) {
  if (x.size() != sys.depth()) throw std::invalid_argument("rn_log: point depth mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& f = sys.factors[i];
    const long long shifted = mod_pos(x[i] + mod_pos(k, f.modulus) * f.step, f.modulus);
    if (shifted == x[i]) continue;
    acc += std::log(f.weight(shifted).convert_to<double>()) -
           std::log(f.weight(x[i]).convert_to<double>());
  }
  return acc;
}

std::optional<long long> lattice_exponent(const Rational& ratio, const Rational& lambda) {
  if (!(ratio > 0)) return std::nullopt;
  if (ratio == 1) return 0;
  if (lambda == 1) return std::nullopt;
  const double j_approx = std::log(ratio.convert_to<double>()) /
                          std::log(lambda.convert_to<double>());
  const long long j = std::llround(j_approx);
  if (std::abs(j_approx - static_cast<double>(j)) > 0.25) return std::nullopt;
  if (std::llabs(j) > 512) return std::nullopt;
  if (rational_pow(lambda, j) == ratio) return j;
  return std::nullopt;
}

std::string to_string(HopfClass c) {
  switch (c) {
    case HopfClass::ConvergentLike: return "ConvergentLike";
    case HopfClass::DivergentLike: return "DivergentLike";
    case HopfClass::Undecided: return "Undecided";
  }
  return "Undecided";
}

HopfClass classify_trace(const std::vector<double>& log_partials) {
  const std::size_t K = log_partials.size();
  if (K < 8) return HopfClass::Undecided;
  const double tail_ratio = 1.0 - std::exp(log_partials[3 * K / 4 - 1] - log_partials[K - 1]);
  if (tail_ratio < 1e-2) return HopfClass::ConvergentLike;
  std::vector<double> xs, ys;
  xs.reserve(K / 2);
  ys.reserve(K / 2);
  for (std::size_t j = K / 2; j < K; ++j) {
    xs.push_back(std::log(static_cast<double>(j + 1)));
    ys.push_back(log_partials[j]);
  }
  const LineFit fit = fit_line(xs, ys);
  if (fit.slope >= 0.75) return HopfClass::DivergentLike;
  return HopfClass::Undecided;
}

HopfTrace hopf_partial_sums(const ProductSystem& sys, const Point& x, std::size_t K) {
  if (K < 1) throw std::domain_error("hopf_partial_sums: K must be >= 1");
  HopfTrace trace;
  trace.log_partials.reserve(K);
  LogSumExp acc;
  Point y = x;
  double log_ratio = 0.0;  // log rn(k, x), accumulated one step at a time
  for (std::size_t k = 1; k <= K; ++k) {
    log_ratio += rn_log(sys, 1, y);
    y = apply_T(sys, y, 1);
    acc.add(log_ratio);
    trace.log_partials.push_back(acc.value());
  }
  trace.classification = classify_trace(trace.log_partials);
  return trace;
}

bool ConditionReport::all_hold() const {
  if (!cond_circ.holds) return false;
  for (const auto& row : cond_bullet)
    if (!row.holds) return false;
  for (const auto& row : cond_star)
    if (!row.holds) return false;
  return true;
}

namespace {

double shift_hellinger_sq(const FactorSystem& f) {
  // H^2(mu, mu o T^{-1}) = 1 - sum_j sqrt(mu(j) mu(j - step))
  double bc = 0.0;
  if (f.explicit_weights.empty()) {
    const double wl = f.w_low.convert_to<double>();
    const double wh = f.w_high.convert_to<double>();
    const long long n_low = f.cutoff, n_high = f.modulus - f.cutoff;
    if (n_high == 0) return 0.0;
    // step 1: zone changes exactly at j = 0 and j = cutoff
    bc = static_cast<double>(n_low - 1) * wl + static_cast<double>(n_high - 1) * wh +
         2.0 * std::sqrt(wl * wh);
  } else {
    for (long long j = 0; j < f.modulus; ++j) {
      const long long prev = (j - f.step % f.modulus + f.modulus) % f.modulus;
      bc += std::sqrt(f.weight(j).convert_to<double>() * f.weight(prev).convert_to<double>());
    }
  }
  return std::clamp(1.0 - bc, 0.0, 1.0);
}

}  // namespace

ConditionReport condition_report(const OdometerSpec& spec) {
  const ProductSystem sys = build_odometer(spec);
  ConditionReport rep;
  double sum = 0.0;
  for (std::size_t i = 0; i < sys.depth(); ++i) {
    const double h2 = shift_hellinger_sq(sys.factors[i]);
    rep.cond_circ.terms.push_back(h2);
    sum += h2;
  }
  rep.cond_circ.value = sum;
  rep.cond_circ.holds = true;
  for (std::size_t i = 1; i < rep.cond_circ.terms.size(); ++i) {
    if (!(rep.cond_circ.terms[i] <= 0.5 * rep.cond_circ.terms[i - 1])) {
      rep.cond_circ.holds = false;
      break;
    }
  }
  const Rational star_threshold = Rational(1) / (2 * (spec.lambda + 1));
  for (std::size_t i = 0; i < sys.depth(); ++i) {
    const std::size_t n = i + 1;
    ConditionReport::MassRow bullet;
    bullet.n = n;
    bullet.mass = sys.factors[i].mass_Y();
    bullet.threshold = Rational(1) - Rational(1, BigInt(1) << (n + 1));
    bullet.holds = bullet.mass > bullet.threshold;
    rep.cond_bullet.push_back(std::move(bullet));

    ConditionReport::MassRow star;
    star.n = n;
    star.mass = sys.factors[i].mass_Z();
    star.threshold = star_threshold;
    star.holds = star.mass > star.threshold;
    rep.cond_star.push_back(std::move(star));
  }
  return rep;
}

WitnessReport essential_value_witness(const OdometerSpec& spec, std::size_t n,
                                      const CylinderHead& head, std::uint64_t seed,
                                      long long max_exhaustive, std::size_t n_samples) {
  const std::size_t N = spec.moduli.size();
  if (N < n + 2)
    throw std::domain_error("essential_value_witness: truncation depth must be >= n + 2");
  if (head.depth() != n)
    throw std::invalid_argument("essential_value_witness: head depth must equal n");

  const ProductSystem sys = build_odometer(spec);
  const ConditionReport cond = condition_report(spec);

  // Structural requirements: (*) for factor n+1, a valid iterate multiplier,
  // and (bullet) for factors n+2..N.
  if (sys.factors[n].ell < 1 || !cond.cond_star[n].holds)
    throw WitnessUnavailableError("essential_value_witness: condition (*) fails at factor " +
                                  std::to_string(n + 1));
  for (std::size_t k = n + 1; k < N; ++k)
    if (!cond.cond_bullet[k].holds)
      throw WitnessUnavailableError("essential_value_witness: condition (bullet) fails at factor " +
                                    std::to_string(k + 1));

  long long prefix = 1;
  for (std::size_t i = 0; i < n; ++i) prefix *= spec.moduli[i];

  WitnessReport rep;
  rep.iterate = prefix * sys.factors[n].ell;

  rep.prefix_period_ok = true;
  for (std::size_t i = 0; i < n; ++i)
    if (rep.iterate % spec.moduli[i] != 0) rep.prefix_period_ok = false;

  // Component sets of A = B x Z_{n+1} x Y_{n+2} x ... x Y_N.
  std::vector<ComponentSet> comps;
  rep.head_mass = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (head.allowed[i].empty()) {
      comps.push_back(ComponentSet::full(spec.moduli[i]));
    } else {
      for (long long v : head.allowed[i])
        if (v < 0 || v >= spec.moduli[i])
          throw std::invalid_argument("essential_value_witness: head value out of range");
      comps.push_back(ComponentSet::from_list(head.allowed[i]));
      Rational m = 0;
      for (long long v : head.allowed[i]) m += sys.factors[i].weight(v);
      rep.head_mass *= m;
    }
  }
  comps.push_back(ComponentSet::from_intervals(sys.factors[n].set_Z));
  for (std::size_t i = n + 1; i < N; ++i)
    comps.push_back(ComponentSet::from_intervals(sys.factors[i].set_Y));
  for (const auto& c : comps)
    if (c.total == 0)
      throw WitnessUnavailableError("essential_value_witness: empty component set");

  rep.mass = rep.head_mass * sys.factors[n].mass_Z();
  for (std::size_t i = n + 1; i < N; ++i) rep.mass *= sys.factors[i].mass_Y();

  rep.delta_bound = Rational(1) / (2 * (spec.lambda + 1));
  for (std::size_t k = n + 2; k <= N; ++k)
    rep.delta_bound *= Rational(1) - Rational(1, BigInt(1) << (k + 1));
  rep.achieved_delta = rep.mass / rep.head_mass;
  rep.mass_ok = rep.mass >= rep.head_mass * rep.delta_bound;

  const auto check_point = [&](const Point& x) {
    if (rn_ratio(sys, rep.iterate, x) != spec.lambda) return false;
    for (std::size_t i = 0; i < n; ++i)
      if ((x[i] + rep.iterate) % spec.moduli[i] != x[i]) return false;
    return true;
  };

  const auto state_space = sys.state_space_size();
  bool all_ok = true;
  if (state_space && *state_space <= max_exhaustive) {
    rep.exhaustive = true;
    Point x(N, 0);
    std::vector<long long> idx(N, 0);
    for (std::size_t i = 0; i < N; ++i) x[i] = comps[i].nth(0);
    bool done = false;
    while (!done) {
      all_ok = all_ok && check_point(x);
      ++rep.points_checked;
      // mixed-radix increment over the component sets
      std::size_t i = 0;
      for (;; ++i) {
        if (i == N) {
          done = true;
          break;
        }
        if (++idx[i] < comps[i].total) {
          x[i] = comps[i].nth(idx[i]);
          break;
        }
        idx[i] = 0;
        x[i] = comps[i].nth(0);
      }
      if (!all_ok) break;
    }
  } else {
    rep.exhaustive = false;
    Rng rng = make_stream(seed, /*tag=*/0x57, 0);
    Point x(N, 0);
    for (std::size_t s = 0; s < n_samples && all_ok; ++s) {
      for (std::size_t i = 0; i < N; ++i)
        x[i] = comps[i].nth(static_cast<long long>(
            rng.uniform_below(static_cast<std::uint64_t>(comps[i].total))));
      all_ok = check_point(x);
      ++rep.points_checked;
    }
  }
  rep.lattice_confirmed = all_ok;
  return rep;
}

SubgroupClass subgroup_detect(const std::vector<double>& values, double tol) {
  if (values.empty()) throw std::invalid_argument("subgroup_detect: empty value list");
  if (!(tol > 0)) throw std::invalid_argument("subgroup_detect: tol must be > 0");
  double g = 0.0;
  for (double v : values) {
    double a = std::max(g, std::abs(v));
    double b = std::min(g, std::abs(v));
    while (b > tol) {
      const double r = std::abs(std::remainder(a, b));
      a = b;
      b = r;
    }
    g = a;
  }
  if (g <= tol) return {SubgroupClass::Kind::Trivial, 0.0};
  if (g < 10.0 * tol) return {SubgroupClass::Kind::Dense, 0.0};
  for (double v : values)
    if (std::abs(std::remainder(v, g)) > tol) return {SubgroupClass::Kind::Dense, 0.0};
  return {SubgroupClass::Kind::Cyclic, g};
}

TopSlice top_slice_mass(std::vector<double> phi_samples, double delta) {
  if (phi_samples.empty()) throw std::invalid_argument("top_slice_mass: empty sample list");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("top_slice_mass: delta must lie in (0,1)");
  for (double v : phi_samples)
    if (v < 0.0) throw std::domain_error("top_slice_mass: samples must be nonnegative");
  std::sort(phi_samples.begin(), phi_samples.end(), std::greater<>());
  const std::size_t N = phi_samples.size();
  const std::size_t k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(delta * static_cast<double>(N))));
  TopSlice out;
  KahanSum slice, total;
  for (std::size_t i = 0; i < N; ++i) {
    total.add(phi_samples[i]);
    if (i < k) slice.add(phi_samples[i]);
  }
  out.threshold = phi_samples[k - 1];
  out.slice_mass = slice.value() / static_cast<double>(N);
  out.total_mass = total.value() / static_cast<double>(N);
  out.bound_holds = out.slice_mass >= 0.5 * delta * out.total_mass;
  return out;
}

}  // namespace ergolab::products
