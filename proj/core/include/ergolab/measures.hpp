#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ergolab::measures {

/// One-dimensional Gaussian law.
struct Normal {
  double mean;
  double variance;  // > 0
  Normal(double mean_, double variance_);
};

/// Probability vector on Z/dZ. Weights are nonnegative and sum to 1
/// (within 1e-12); exact-rational measures live in ergolab::products.
struct FiniteMeasure {
  std::vector<double> weights;

  explicit FiniteMeasure(std::vector<double> weights_);
  std::size_t modulus() const { return weights.size(); }

  static FiniteMeasure uniform(std::size_t d);
  static FiniteMeasure point_mass(std::size_t j, std::size_t d);
};

/// H^2 together with the total-variation sandwich H^2 <= TV <= sqrt(2)*H.
struct HellingerReport {
  double h2;
  double tv_lower;  // = h2
  double tv_upper;  // = sqrt(2*h2)
};

HellingerReport make_hellinger_report(double h2);

/// Declared analytic model for the terms beyond a finite list. The product
/// and sum criteria are about infinite families; a truncation alone cannot
/// decide them, so callers state how the tail continues.
struct TailSpec {
  enum class Kind {
    Zero,      // no terms beyond the list
    Geometric, // t_{N+j} = t_N * ratio^j, ratio in [0,1)
    PowerLaw,  // t_n ~ t_N * (N/n)^exponent; sum finite iff exponent > 1
  };
  Kind kind = Kind::Zero;
  double param = 0.0;  // ratio or exponent

  static TailSpec zero() { return {Kind::Zero, 0.0}; }
  static TailSpec geometric(double ratio) { return {Kind::Geometric, ratio}; }
  static TailSpec power_law(double exponent) { return {Kind::PowerLaw, exponent}; }
};

/// Integral-test extrapolation of sum(terms) + declared tail.
struct TailSum {
  bool finite = true;
  double lower = 0.0;  // head sum + tail lower bound (when finite)
  double upper = 0.0;  // head sum + tail upper bound (when finite)
};

TailSum extrapolate_sum(const std::vector<double>& terms, const TailSpec& tail);

struct KakutaniVerdict {
  bool equivalent = false;
  std::vector<double> h2_terms;
  std::vector<double> product_partial;  // prod(1 - H^2_n), non-increasing
  std::vector<double> sum_partial;      // sum H^2_n, non-decreasing
  TailSum extrapolated_sum;
  // 1 - H^2(mu, nu) = prod(1 - H^2_n); meaningful when equivalent.
  double one_minus_h2_product = 0.0;
};

struct AtqiWitness {
  std::size_t m;       // smallest index with sum_{r=n+1}^m s_r > 2a
  double zeta;         // e^{-3a/4}
  double window_lo;    // window is [window_lo, +infinity)
  double window_mass;  // mass the convolved block law puts on the window
  double block_sum;    // S = sum_{r=n+1}^m s_r
};

// --- operations ---

/// H^2(N_{a,s2}, N_{b,t2}) = 1 - sqrt(2*s*t/(s2+t2)) * exp(-(a-b)^2/(4(s2+t2))).
double hellinger_sq_normal(const Normal& p, const Normal& q);

/// H^2(p, q) = 1 - sum_j sqrt(p_j q_j); moduli must match.
double hellinger_sq_discrete(const FiniteMeasure& p, const FiniteMeasure& q);

/// TV sandwich bounds from H^2 (lower = H^2, upper = sqrt(2 H^2)).
std::pair<double, double> tv_bounds(double h2);

/// Convolution of normal laws: parameters add.
Normal convolve_normal(const Normal& p, const Normal& q);

/// Cyclic convolution on Z/dZ.
FiniteMeasure convolve_discrete(const FiniteMeasure& p, const FiniteMeasure& q);

/// Product-measure equivalence test: equivalent iff sum H^2_n (with the
/// declared tail) is finite; any term equal to 1 forces singularity.
KakutaniVerdict kakutani_test(const std::vector<double>& h2_terms, double tol,
                              const TailSpec& tail = TailSpec::zero());

/// Limit Hellinger discrepancy of the shifted normal convolution blocks:
/// 1 - exp(-a^2 / (8 * S)) with S = sum_{k>=n} variances (1-based n),
/// and 0 when S diverges under the declared tail.
double ati_normals(const std::vector<double>& variances, double a, std::size_t n,
                   const TailSpec& tail = TailSpec::zero());

/// Finite-m evidence for translation invariance of a discrete family:
/// L1 distance between xi_n * ... * xi_m * delta_a and xi_n * ... * xi_m.
double ati_shift_l1_discrete(const std::vector<FiniteMeasure>& xs, std::size_t a,
                             std::size_t n, std::size_t m);

/// Density ratio dN_{b - s2/2, s2} / dN_{-s2/2, s2} at t,
/// i.e. exp(b*t/s2 + b*(s2 - b)/(2*s2)).
double normal_translate_rn(double b, double sigma2, double t);

/// Window witness for translation quasi-invariance of the block family
/// psi_r = N_{-s_r/2, s_r}: finds the smallest m with sum s_r > 2a, reports
/// zeta = e^{-3a/4}, the window [-S, inf) and its mass under the convolution.
AtqiWitness atqi_witness_normals(const std::vector<double>& block_norms_sq, double a,
                                 std::size_t n);

}  // namespace ergolab::measures
