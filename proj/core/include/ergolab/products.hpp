#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/measures.hpp"
#include "ergolab/rng.hpp"

namespace ergolab::products {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Half-open index interval [lo, hi) inside Z/pZ.
struct IndexInterval {
  long long lo = 0;
  long long hi = 0;
  long long count() const { return hi > lo ? hi - lo : 0; }
  bool contains(long long j) const { return j >= lo && j < hi; }
};

/// One cyclic factor x -> x + step (mod p) carrying a quasi-invariant
/// two-level measure: weight w_low on [0, cutoff), w_high on [cutoff, p).
/// Arbitrary measures are supported through explicit_weights.
struct FactorSystem {
  long long modulus = 0;
  long long step = 1;
  long long cutoff = 0;
  Rational w_low = 0;
  Rational w_high = 0;
  std::vector<Rational> explicit_weights;  // overrides the two-level profile when nonempty

  // Prop-2.12 recipe metadata (may be empty when the modulus gap is too small).
  std::vector<IndexInterval> set_Y;
  std::vector<IndexInterval> set_Z;
  long long ell = 0;  // largest l >= 1 with l * prefix_product <= p/2; 0 if none

  const Rational& weight(long long j) const;
  Rational mass(const std::vector<IndexInterval>& intervals) const;
  Rational mass_Y() const { return mass(set_Y); }
  Rational mass_Z() const { return mass(set_Z); }
  bool in_Y(long long j) const;
  bool in_Z(long long j) const;
  measures::FiniteMeasure to_finite_measure() const;
};

/// Exact weights for the type III_lambda recipe: w_low on {j : j < p/2 or
/// (2j < p+1)} and w_high = lambda * w_low on the rest, normalized; the
/// recipe sets Y, Z and the iterate multiplier l are derived from
/// prefix_product = p_1...p_{n-1}. lambda = 1 degenerates to the uniform
/// (measure-preserving) factor.
FactorSystem odometer_factor(long long p, const Rational& lambda, long long prefix_product);

FactorSystem uniform_factor(long long p, long long step = 1);

FactorSystem factor_from_measure(const measures::FiniteMeasure& mu, long long step = 1);

/// lambda in (0,1) plus pairwise-coprime strictly increasing moduli.
struct OdometerSpec {
  Rational lambda;
  std::vector<long long> moduli;
  OdometerSpec(Rational lambda_, std::vector<long long> moduli_);
};

/// Depth-N truncation of the infinite product; points are coordinate vectors.
struct ProductSystem {
  std::vector<FactorSystem> factors;
  std::size_t depth() const { return factors.size(); }
  /// Total number of points, or nullopt on overflow past 2^62.
  std::optional<long long> state_space_size() const;
};

using Point = std::vector<long long>;

ProductSystem build_odometer(const OdometerSpec& spec);

Point apply_T(const ProductSystem& sys, const Point& x, long long k = 1);

/// Draw a point from mu = tensor of the factor measures.
Point sample_point(const ProductSystem& sys, Rng& rng);

/// Exact Radon-Nikodym ratio d(mu o T^k)/d mu at x, i.e.
/// prod_n mu_n(x_n + k*step_n) / mu_n(x_n).
Rational rn_ratio(const ProductSystem& sys, long long k, const Point& x);

/// log of rn_ratio as a double.
double rn_log(const ProductSystem& sys, long long k, const Point& x);

/// Writes ratio as lambda^j when it lies on the lambda-lattice (exact match).
std::optional<long long> lattice_exponent(const Rational& ratio, const Rational& lambda);

enum class HopfClass { ConvergentLike, DivergentLike, Undecided };

std::string to_string(HopfClass c);

/// Partial sums S_K = sum_{k<=K} exp(rn_log(k, x)) kept in log space.
struct HopfTrace {
  std::vector<double> log_partials;
  HopfClass classification = HopfClass::Undecided;
  double log_partial(std::size_t k) const { return log_partials.at(k - 1); }
};

/// Growth-rate heuristic: Cauchy tail => ConvergentLike, log-log slope near 1
/// or a fat tail increment => DivergentLike, otherwise Undecided. Finite
/// truncations are periodic, so this labels evidence, never a verdict.
HopfClass classify_trace(const std::vector<double>& log_partials);

HopfTrace hopf_partial_sums(const ProductSystem& sys, const Point& x, std::size_t K);

struct ConditionReport {
  struct Circ {
    bool holds = false;      // consecutive H^2 terms keep halving (geometric evidence)
    double value = 0.0;      // partial sum of the H^2 terms
    std::vector<double> terms;
  };
  struct MassRow {
    std::size_t n = 0;  // 1-based factor index
    Rational mass;
    Rational threshold;
    bool holds = false;
  };
  Circ cond_circ;
  std::vector<MassRow> cond_bullet;  // mu_n(Y_n) > 1 - 2^{-n-1}
  std::vector<MassRow> cond_star;    // mu_n(Z_n) > 1/(2(lambda+1))
  bool all_hold() const;
};

ConditionReport condition_report(const OdometerSpec& spec);

/// Product-form head B = allowed_1 x ... x allowed_n over coordinates 1..n.
/// An empty allowed list for a coordinate means the full factor.
struct CylinderHead {
  std::vector<std::vector<long long>> allowed;
  std::size_t depth() const { return allowed.size(); }
};

struct WitnessReport {
  long long iterate = 0;            // m = p_1...p_n * l_{n+1}
  bool prefix_period_ok = false;    // T^m fixes coordinates 1..n
  bool lattice_confirmed = false;   // rn_ratio(m, x) == lambda on every checked x in A
  std::size_t points_checked = 0;
  bool exhaustive = false;
  Rational head_mass;     // mu([B])
  Rational mass;          // mu(A)
  Rational achieved_delta;  // mu(A)/mu([B])
  Rational delta_bound;     // (1/(2(lambda+1))) * prod_{k=n+2}^N (1 - 2^{-k-1})
  bool mass_ok = false;     // mass >= head_mass * delta_bound
};

/// Finite witness for "log lambda is an essential value": builds
/// A = B x Z_{n+1} x Y_{n+2} x ... x Y_N, iterates m = p_1...p_n * l_{n+1}
/// steps and checks the Radon-Nikodym ratio equals lambda exactly on A.
/// Enumerates A when the state space is at most max_exhaustive, otherwise
/// samples n_samples points of A.
WitnessReport essential_value_witness(const OdometerSpec& spec, std::size_t n,
                                      const CylinderHead& head, std::uint64_t seed = 1,
                                      long long max_exhaustive = 1'000'000,
                                      std::size_t n_samples = 10'000);

struct SubgroupClass {
  enum class Kind { Trivial, Cyclic, Dense } kind;
  double generator = 0.0;  // positive generator when Cyclic
};

/// Coarsest closed subgroup of R consistent with the observed values at
/// tolerance tol; Cyclic generators come from a gcd-like reduction.
SubgroupClass subgroup_detect(const std::vector<double>& values, double tol);

struct TopSlice {
  double threshold = 0.0;    // smallest sample value included in the slice
  double slice_mass = 0.0;   // empirical integral over the slice
  double total_mass = 0.0;   // empirical integral over everything
  bool bound_holds = false;  // slice_mass >= (delta/2) * total_mass
};

/// Empirical form of the nonatomic top-slice bound: the best slice of
/// measure delta carries at least delta/2 of the integral.
TopSlice top_slice_mass(std::vector<double> phi_samples, double delta);

}  // namespace ergolab::products
