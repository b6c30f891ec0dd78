#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ergolab {

inline constexpr double kDefaultTol = 1e-9;  // absolute, desk-scale quantities are O(1)

inline double std_normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

inline double normal_pdf(double x, double mean, double variance) {
  const double s = std::sqrt(variance);
  return std_normal_pdf((x - mean) / s) / s;
}

/// Streaming log(sum(exp(x_i))) without ever materializing exp(x_i).
class LogSumExp {
 public:
  void add(double log_term) {
    if (std::isinf(log_term) && log_term < 0) return;
    if (n_ == 0 || log_term > max_) {
      if (n_ > 0) acc_ *= std::exp(max_ - log_term);
      max_ = log_term;
      acc_ += 1.0;
    } else {
      acc_ += std::exp(log_term - max_);
    }
    ++n_;
  }
  double value() const {
    if (n_ == 0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(acc_);
  }
  std::size_t count() const { return n_; }

 private:
  double max_ = 0.0;
  double acc_ = 0.0;
  std::size_t n_ = 0;
};

/// Compensated (Kahan) accumulator for long orbit sums.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

struct MeanAndSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

inline MeanAndSe mean_and_se(const std::vector<double>& xs) {
  MeanAndSe out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  if (xs.size() > 1) v /= static_cast<double>(xs.size() - 1);
  out.mean = m;
  out.se = std::sqrt(v / static_cast<double>(xs.size()));
  return out;
}

/// Least-squares fit y = slope*x + intercept; returns {slope, intercept, rms_residual}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_line: need two equal-length samples");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  LineFit fit;
  if (std::abs(det) < 1e-300) {
    fit.slope = 0.0;
    fit.intercept = sy / n;
  } else {
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
  }
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    rss += r * r;
  }
  fit.rms = std::sqrt(rss / n);
  return fit;
}

}  // namespace ergolab
