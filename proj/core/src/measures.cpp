#include "ergolab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ergolab/errors.hpp"
#include "ergolab/numeric.hpp"

namespace ergolab::measures {

Normal::Normal(double mean_, double variance_) : mean(mean_), variance(variance_) {
  if (!(variance > 0.0)) throw std::domain_error("Normal: variance must be > 0");
}

FiniteMeasure::FiniteMeasure(std::vector<double> weights_) : weights(std::move(weights_)) {
  if (weights.empty()) throw std::domain_error("FiniteMeasure: empty weight vector");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::domain_error("FiniteMeasure: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::domain_error("FiniteMeasure: weights must sum to 1");
}

FiniteMeasure FiniteMeasure::uniform(std::size_t d) {
  return FiniteMeasure(std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

FiniteMeasure FiniteMeasure::point_mass(std::size_t j, std::size_t d) {
  if (j >= d) throw std::domain_error("FiniteMeasure::point_mass: index out of range");
  std::vector<double> w(d, 0.0);
  w[j] = 1.0;
  return FiniteMeasure(std::move(w));
}

HellingerReport make_hellinger_report(double h2) {
  auto [lo, hi] = tv_bounds(h2);
  return HellingerReport{h2, lo, hi};
}

double hellinger_sq_normal(const Normal& p, const Normal& q) {
  const double s2 = p.variance, t2 = q.variance;
  const double s = std::sqrt(s2), t = std::sqrt(t2);
  const double d = p.mean - q.mean;
  const double bc = std::sqrt(2.0 * s * t / (s2 + t2)) * std::exp(-d * d / (4.0 * (s2 + t2)));
  return std::clamp(1.0 - bc, 0.0, 1.0);
}

double hellinger_sq_discrete(const FiniteMeasure& p, const FiniteMeasure& q) {
  if (p.modulus() != q.modulus())
    throw std::domain_error("hellinger_sq_discrete: modulus mismatch");
  double bc = 0.0;
  for (std::size_t j = 0; j < p.modulus(); ++j) bc += std::sqrt(p.weights[j] * q.weights[j]);
  return std::clamp(1.0 - bc, 0.0, 1.0);
}

std::pair<double, double> tv_bounds(double h2) {
  if (!(h2 >= 0.0 && h2 <= 1.0)) throw std::domain_error("tv_bounds: h2 must lie in [0,1]");
  return {h2, std::sqrt(2.0 * h2)};
}

Normal convolve_normal(const Normal& p, const Normal& q) {
  return Normal(p.mean + q.mean, p.variance + q.variance);
}

FiniteMeasure convolve_discrete(const FiniteMeasure& p, const FiniteMeasure& q) {
  if (p.modulus() != q.modulus())
    throw std::domain_error("convolve_discrete: modulus mismatch");
  const std::size_t d = p.modulus();
  std::vector<double> out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t i = (k + d - j % d) % d;  // k - j mod d
      acc += p.weights[j] * q.weights[i];
    }
    out[k] = acc;
  }
  // renormalize away accumulated rounding so the invariant holds exactly enough
  double sum = 0.0;
  for (double w : out) sum += w;
  for (double& w : out) w /= sum;
  return FiniteMeasure(std::move(out));
}

TailSum extrapolate_sum(const std::vector<double>& terms, const TailSpec& tail) {
  TailSum out;
  double head = 0.0;
  for (double t : terms) head += t;
  out.lower = out.upper = head;
  if (terms.empty()) return out;
  const double last = terms.back();
  switch (tail.kind) {
    case TailSpec::Kind::Zero:
      break;
    case TailSpec::Kind::Geometric: {
      const double r = tail.param;
      if (!(r >= 0.0 && r < 1.0))
        throw std::domain_error("TailSpec: geometric ratio must lie in [0,1)");
      const double t = last * r / (1.0 - r);
      out.lower += t;
      out.upper += t;
      break;
    }
    case TailSpec::Kind::PowerLaw: {
      const double q = tail.param;
      if (q <= 1.0) {
        out.finite = (last == 0.0);
        if (!out.finite) {
          out.lower = out.upper = std::numeric_limits<double>::infinity();
        }
        break;
      }
      // t_n = C n^{-q} with C = last * N^q; integral test around n = N.
      const double N = static_cast<double>(terms.size());
      const double C = last * std::pow(N, q);
      out.lower += C * std::pow(N + 1.0, 1.0 - q) / (q - 1.0);
      out.upper += C * std::pow(N, 1.0 - q) / (q - 1.0);
      break;
    }
  }
  return out;
}

KakutaniVerdict kakutani_test(const std::vector<double>& h2_terms, double tol,
                              const TailSpec& tail) {
  KakutaniVerdict v;
  v.h2_terms = h2_terms;
  double prod = 1.0, sum = 0.0;
  bool hit_one = false;
  v.product_partial.reserve(h2_terms.size());
  v.sum_partial.reserve(h2_terms.size());
  for (double h2 : h2_terms) {
    if (!(h2 >= 0.0 && h2 <= 1.0))
      throw std::domain_error("kakutani_test: H^2 term outside [0,1]");
    if (h2 >= 1.0 - tol) hit_one = true;
    prod *= (1.0 - h2);
    sum += h2;
    v.product_partial.push_back(prod);
    v.sum_partial.push_back(sum);
  }
  v.extrapolated_sum = extrapolate_sum(h2_terms, tail);
  v.equivalent = !hit_one && v.extrapolated_sum.finite;
  if (v.equivalent) {
    // Theorem-A identity at the declared tail: prod(1-h) = exp(sum log(1-h));
    // extend the head product by the tail sum bound on -log(1-h) ~ h.
    const double tail_sum = v.extrapolated_sum.upper - sum;
    v.one_minus_h2_product = prod * std::exp(-tail_sum);
  }
  return v;
}

double ati_normals(const std::vector<double>& variances, double a, std::size_t n,
                   const TailSpec& tail) {
  for (double s2 : variances)
    if (!(s2 > 0.0)) throw std::domain_error("ati_normals: variances must be > 0");
  if (a == 0.0) return 0.0;
  if (n < 1 || n > variances.size())
    throw std::domain_error("ati_normals: start index out of range (1-based)");
  std::vector<double> tail_terms(variances.begin() + static_cast<std::ptrdiff_t>(n - 1),
                                 variances.end());
  const TailSum S = extrapolate_sum(tail_terms, tail);
  if (!S.finite) return 0.0;
  const double mid = 0.5 * (S.lower + S.upper);
  return 1.0 - std::exp(-a * a / (8.0 * mid));
}

double ati_shift_l1_discrete(const std::vector<FiniteMeasure>& xs, std::size_t a,
                             std::size_t n, std::size_t m) {
  if (n < 1 || m < n || m > xs.size())
    throw std::domain_error("ati_shift_l1_discrete: bad block range");
  FiniteMeasure conv = xs[n - 1];
  for (std::size_t k = n; k < m; ++k) conv = convolve_discrete(conv, xs[k]);
  const std::size_t d = conv.modulus();
  double l1 = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t shifted = (j + d - a % d) % d;  // (conv * delta_a)(j) = conv(j - a)
    l1 += std::abs(conv.weights[shifted] - conv.weights[j]);
  }
  return 0.5 * l1;  // sup_C |p(C) - q(C)|
}

double normal_translate_rn(double b, double sigma2, double t) {
  if (!(sigma2 > 0.0)) throw std::domain_error("normal_translate_rn: sigma2 must be > 0");
  return std::exp(b * t / sigma2 + b * (sigma2 - b) / (2.0 * sigma2));
}

AtqiWitness atqi_witness_normals(const std::vector<double>& block_norms_sq, double a,
                                 std::size_t n) {
  for (double s : block_norms_sq)
    if (!(s > 0.0)) throw std::domain_error("atqi_witness_normals: block norms must be > 0");
  if (n > block_norms_sq.size())
    throw std::domain_error("atqi_witness_normals: start index out of range");
  double S = 0.0;
  std::size_t m = 0;
  bool found = false;
  for (std::size_t r = n; r < block_norms_sq.size(); ++r) {
    S += block_norms_sq[r];
    if (S > 2.0 * a) {
      m = r + 1;  // 1-based block index
      found = true;
      break;
    }
  }
  if (!found)
    throw NoWitnessError(
        "atqi_witness_normals: cumulative block mass never exceeds 2a "
        "(drift may be a coboundary at this truncation)");
  AtqiWitness w;
  w.m = m;
  w.zeta = std::exp(-0.75 * a);
  w.window_lo = -S;
  w.block_sum = S;
  // N_{-S/2,S}([-S, inf)) = N_{0,1}((-sqrt(S)/2, inf))
  w.window_mass = 1.0 - std_normal_cdf(-0.5 * std::sqrt(S));
  return w;
}

}  // namespace ergolab::measures
