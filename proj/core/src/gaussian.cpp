#include "ergolab/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "ergolab/errors.hpp"
#include "ergolab/numeric.hpp"

namespace ergolab::gaussian {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GaussianSpace::GaussianSpace(Vector eigs_) : eigs(std::move(eigs_)) {
  if (eigs.size() == 0) throw std::domain_error("GaussianSpace: dimension must be >= 1");
  for (int i = 0; i < eigs.size(); ++i)
    if (!(eigs[i] > 0.0)) throw std::domain_error("GaussianSpace: eigenvalues must be > 0");
}

Vector GaussianSpace::ambient_from_h0(const Vector& h) const {
  return h.cwiseProduct(eigs.cwiseSqrt());
}

Vector GaussianSpace::h0_from_ambient(const Vector& y) const {
  return y.cwiseQuotient(eigs.cwiseSqrt());
}

Vector GaussianSpace::standardize(const Vector& x) const {
  return x.cwiseQuotient(eigs.cwiseSqrt());
}

double orthogonality_defect(const Matrix& V) {
  const Matrix d = V.transpose() * V - Matrix::Identity(V.rows(), V.cols());
  return d.cwiseAbs().maxCoeff();
}

AffineMap::AffineMap(Vector f_, Matrix V_) : f(std::move(f_)), V(std::move(V_)) {
  if (V.rows() != V.cols() || V.rows() != f.size())
    throw std::invalid_argument("AffineMap: dimension mismatch");
  if (orthogonality_defect(V) >= kOrthogonalityTol)
    throw std::domain_error("AffineMap: V is not orthogonal");
}

AffineMap compose(const AffineMap& a, const AffineMap& b) {
  return AffineMap(a.f + a.V * b.f, a.V * b.V);
}

AffineMap inverse(const AffineMap& a) {
  return AffineMap(-(a.V.transpose() * a.f), a.V.transpose());
}

AffineMap identity_map(int dim) {
  return AffineMap(Vector::Zero(dim), Matrix::Identity(dim, dim));
}

AffineMap scale_drift(const AffineMap& a, double t) { return AffineMap(t * a.f, a.V); }

Matrix givens_rotation(int dim, int i, int j, double theta) {
  if (i < 0 || j < 0 || i >= dim || j >= dim || i == j)
    throw std::invalid_argument("givens_rotation: bad axis pair");
  Matrix m = Matrix::Identity(dim, dim);
  const double c = std::cos(theta), s = std::sin(theta);
  m(i, i) = c;
  m(j, j) = c;
  m(i, j) = -s;
  m(j, i) = s;
  return m;
}

Matrix random_orthogonal(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  // one re-orthonormalization pass keeps V^T V - I at machine precision
  Eigen::HouseholderQR<Matrix> qr2(q);
  Matrix q2 = qr2.householderQ();
  const Matrix r2 = qr2.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r2(j, j) < 0) q2.col(j) = -q2.col(j);
  return q2;
}

Matrix rotation_blocks(const std::vector<double>& angles, int dim) {
  if (static_cast<int>(angles.size()) * 2 > dim)
    throw std::invalid_argument("rotation_blocks: too many angles for dimension");
  Matrix m = Matrix::Identity(dim, dim);
  for (std::size_t b = 0; b < angles.size(); ++b) {
    const int i = static_cast<int>(2 * b);
    const double c = std::cos(angles[b]), s = std::sin(angles[b]);
    m(i, i) = c;
    m(i + 1, i + 1) = c;
    m(i, i + 1) = -s;
    m(i + 1, i) = s;
  }
  return m;
}

Vector sample(const GaussianSpace& space, Rng& rng) {
  Vector x(space.dim());
  for (int i = 0; i < space.dim(); ++i) x[i] = std::sqrt(space.eigs[i]) * rng.normal();
  return x;
}

double cm_log_density(const GaussianSpace& space, const Vector& y_ambient, const Vector& x) {
  if (y_ambient.size() != space.eigs.size() || x.size() != space.eigs.size())
    throw std::invalid_argument("cm_log_density: dimension mismatch");
  double lin = 0.0, norm_sq = 0.0;
  for (int i = 0; i < space.dim(); ++i) {
    lin += y_ambient[i] * x[i] / space.eigs[i];
    norm_sq += y_ambient[i] * y_ambient[i] / space.eigs[i];
  }
  return lin - 0.5 * norm_sq;
}

double exp_log(const GaussianSpace& space, const Vector& h, const Vector& x) {
  if (h.size() != space.eigs.size() || x.size() != space.eigs.size())
    throw std::invalid_argument("exp_log: dimension mismatch");
  return h.dot(space.standardize(x)) - 0.5 * h.squaredNorm();
}

double exp_eval(const GaussianSpace& space, const Vector& h, const Vector& x) {
  return std::exp(exp_log(space, h, x));
}

double exp_translate(const GaussianSpace& space, const Vector& h, const Vector& f,
                     const Vector& x) {
  return exp_eval(space, h, x - space.ambient_from_h0(f));
}

WeylImage weyl_apply(const AffineMap& A, const Vector& h) {
  if (h.size() != A.f.size()) throw std::invalid_argument("weyl_apply: dimension mismatch");
  WeylImage w;
  w.vec = A.f + A.V * h;
  w.log_coeff = -A.f.dot(A.V * h) - 0.5 * A.f.squaredNorm();
  return w;
}

Vector apply_T(const GaussianSpace& space, const AffineMap& A, const Vector& x) {
  return space.ambient_from_h0(A.f + A.V * space.standardize(x));
}

Vector apply_T_inverse(const GaussianSpace& space, const AffineMap& A, const Vector& x) {
  return space.ambient_from_h0(A.V.transpose() * (space.standardize(x) - A.f));
}

std::pair<double, double> koopman_consistency(const GaussianSpace& space, const AffineMap& A,
                                              const Vector& h, const Vector& x) {
  // Koopman route: (exp_h o T_A^{-1})(x) * sqrt(exp_f(x)),
  // using d mu_B o T_{(f,V)}^{-1} / d mu_B = exp_f.
  const double lhs_log =
      exp_log(space, h, apply_T_inverse(space, A, x)) + 0.5 * exp_log(space, A.f, x);
  // Weyl route: U_{T_A} = W_{alpha_{1/2}(A)}.
  const WeylImage w = weyl_apply(scale_drift(A, 0.5), h);
  const double rhs_log = w.log_coeff + exp_log(space, w.vec, x);
  return {std::exp(lhs_log), std::exp(rhs_log)};
}

DriftOrbit drift_orbit(const AffineMap& A, std::size_t n) {
  if (n < 1) throw std::domain_error("drift_orbit: n must be >= 1");
  DriftOrbit orbit;
  orbit.terms.reserve(n);
  orbit.norms_sq.reserve(n);
  Vector cur = A.f;
  for (std::size_t k = 0; k < n; ++k) {
    orbit.terms.push_back(cur);
    orbit.norms_sq.push_back(cur.squaredNorm());
    if (k + 1 < n) cur = A.f + A.V * cur;
  }
  return orbit;
}

std::optional<Vector> solve_coboundary(const Matrix& V, const Vector& f, double tol) {
  if (V.rows() != V.cols() || V.rows() != f.size())
    throw std::invalid_argument("solve_coboundary: dimension mismatch");
  const Matrix M = Matrix::Identity(V.rows(), V.cols()) - V;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  const Vector a = cod.solve(f);
  const double residual = (f - (a - V * a)).norm();
  if (residual > tol) return std::nullopt;
  return a;
}

ExpVector invariant_density(const Vector& a) { return ExpVector{a}; }

std::pair<double, double> invariance_box_check(const GaussianSpace& space, const AffineMap& A,
                                               const Vector& a, const Vector& box_lo,
                                               const Vector& box_hi, std::size_t n_samples,
                                               std::uint64_t seed) {
  const auto in_box = [&](const Vector& x) {
    for (int i = 0; i < x.size(); ++i)
      if (x[i] < box_lo[i] || x[i] > box_hi[i]) return false;
    return true;
  };
  std::vector<double> diffs(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    Rng rng = make_stream(seed, 0x1b, s);
    const Vector x = sample(space, rng);
    const double w = exp_eval(space, a, x);
    const double g_before = in_box(x) ? 1.0 : 0.0;
    const double g_after = in_box(apply_T(space, A, x)) ? 1.0 : 0.0;
    diffs[s] = (g_after - g_before) * w;
  }
  const MeanAndSe ms = mean_and_se(diffs);
  return {ms.mean, ms.se};
}

double sqrt_exp_norm(const GaussianSpace& space, const Vector& h) {
  if (h.size() != space.eigs.size())
    throw std::invalid_argument("sqrt_exp_norm: dimension mismatch");
  return std::exp(-h.squaredNorm() / 8.0);
}

namespace {

struct ModelFit {
  double delta = 0.0;
  double coeff = 0.0;
  double beta = 0.0;
  double residual = kInf;
  bool valid = false;
};

ModelFit fit_bounded(const std::vector<double>& s) {
  ModelFit fit;
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double rss = 0.0;
  for (double v : s) rss += (v - mean) * (v - mean);
  fit.residual = std::sqrt(rss / static_cast<double>(s.size())) / std::max(1.0, std::abs(mean));
  fit.delta = kInf;
  fit.coeff = mean;
  fit.valid = true;
  return fit;
}

ModelFit fit_log(const std::vector<double>& s) {
  ModelFit fit;
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i < s.size(); ++i) {  // skip n = 1 (log 1 = 0 anchors poorly)
    xs.push_back(std::log(static_cast<double>(i + 1)));
    ys.push_back(s[i]);
  }
  if (xs.size() < 2) return fit;
  const LineFit lf = fit_line(xs, ys);
  if (!(lf.slope > 0.0)) return fit;
  double scale = 0.0;
  for (double v : ys) scale += std::abs(v);
  scale = std::max(1.0, scale / static_cast<double>(ys.size()));
  fit.residual = lf.rms / scale;
  fit.coeff = lf.slope;
  fit.delta = 1.0 / lf.slope;
  fit.valid = true;
  return fit;
}

ModelFit fit_power(const std::vector<double>& s) {
  ModelFit fit;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0)) return fit;
    xs.push_back(std::log(static_cast<double>(i + 1)));
    ys.push_back(std::log(s[i]));
  }
  if (xs.size() < 2) return fit;
  const LineFit lf = fit_line(xs, ys);
  if (!(lf.slope > 0.05)) return fit;  // beta must be positive for delta = 0
  fit.residual = lf.rms;  // already on log scale
  fit.beta = lf.slope;
  fit.coeff = std::exp(lf.intercept);
  fit.delta = 0.0;
  fit.valid = true;
  return fit;
}

}  // namespace

PoincareEstimate poincare_exponent(const std::vector<double>& norms_sq, GrowthModel model,
                                   double residual_threshold) {
  for (double v : norms_sq)
    if (v < 0.0) throw std::domain_error("poincare_exponent: norms must be nonnegative");
  if (norms_sq.size() < 4)
    throw std::invalid_argument("poincare_exponent: need at least 4 terms");

  PoincareEstimate est;
  const auto take = [&](const ModelFit& fit, GrowthModel m) {
    est.delta = fit.delta;
    est.model = m;
    est.coeff = fit.coeff;
    est.beta = fit.beta;
    est.residual = fit.residual;
    est.undecided = !fit.valid;
  };

  switch (model) {
    case GrowthModel::Bounded:
      take(fit_bounded(norms_sq), GrowthModel::Bounded);
      return est;
    case GrowthModel::LogGrowth:
      take(fit_log(norms_sq), GrowthModel::LogGrowth);
      return est;
    case GrowthModel::PowerGrowth:
      take(fit_power(norms_sq), GrowthModel::PowerGrowth);
      return est;
    case GrowthModel::Auto:
      break;
  }

  const ModelFit fb = fit_bounded(norms_sq);
  const ModelFit fl = fit_log(norms_sq);
  const ModelFit fp = fit_power(norms_sq);
  est.undecided = true;
  est.residual = kInf;
  const auto consider = [&](const ModelFit& fit, GrowthModel m) {
    if (fit.valid && fit.residual < est.residual) {
      take(fit, m);
      est.undecided = false;
    }
  };
  consider(fb, GrowthModel::Bounded);
  consider(fl, GrowthModel::LogGrowth);
  consider(fp, GrowthModel::PowerGrowth);
  if (est.residual > residual_threshold) est.undecided = true;
  return est;
}

std::pair<double, double> t_diss_bounds(double delta) {
  if (std::isnan(delta) || delta < 0.0)
    throw std::domain_error("t_diss_bounds: delta must be >= 0");
  if (std::isinf(delta)) return {kInf, kInf};
  const double lo = std::sqrt(2.0 * delta);
  return {lo, 2.0 * lo};
}

namespace {

products::HopfTrace trace_from_log_terms(const std::vector<double>& log_terms) {
  products::HopfTrace trace;
  trace.log_partials.reserve(log_terms.size());
  LogSumExp acc;
  for (double lt : log_terms) {
    acc.add(lt);
    trace.log_partials.push_back(acc.value());
  }
  trace.classification = products::classify_trace(trace.log_partials);
  return trace;
}

}  // namespace

HopfMcResult hopf_mc(const GaussianSpace& space, const AffineMap& A, double t,
                     std::uint64_t seed, std::size_t K, std::size_t n_samples) {
  if (A.dim() != space.dim()) throw std::invalid_argument("hopf_mc: dimension mismatch");
  HopfMcResult out;

  const auto a = solve_coboundary(A.V, A.f, 1e-8 * std::max(1.0, A.f.norm()));
  if (!a) out.fixed_overlap_warning = true;  // drift meets a fixed vector of V

  const DriftOrbit orbit = drift_orbit(A, K);
  out.traces.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    Rng rng = make_stream(seed, 0x40, s);
    Vector z(space.dim());
    for (int i = 0; i < space.dim(); ++i) z[i] = rng.normal();
    std::vector<double> log_terms(K);
    for (std::size_t n = 0; n < K; ++n)
      log_terms[n] = t * orbit.terms[n].dot(z) - 0.5 * t * t * orbit.norms_sq[n];
    out.traces.push_back(trace_from_log_terms(log_terms));
  }
  return out;
}

std::vector<products::HopfTrace> hopf_mc_synthetic(const std::vector<double>& norms_sq, double t,
                                                   std::uint64_t seed, std::size_t n_samples) {
  std::vector<products::HopfTrace> traces;
  traces.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    Rng rng = make_stream(seed, 0x41, s);
    std::vector<double> log_terms(norms_sq.size());
    for (std::size_t n = 0; n < norms_sq.size(); ++n) {
      const double g = std::sqrt(norms_sq[n]) * rng.normal();
      log_terms[n] = t * g - 0.5 * t * t * norms_sq[n];
    }
    traces.push_back(trace_from_log_terms(log_terms));
  }
  return traces;
}

ShellSplit shell_split(const Matrix& V, const Vector& f, double fixed_tol) {
  if (V.rows() != V.cols() || V.rows() != f.size())
    throw std::invalid_argument("shell_split: dimension mismatch");
  if (orthogonality_defect(V) >= kOrthogonalityTol)
    throw std::domain_error("shell_split: V is not orthogonal");
  const int d = static_cast<int>(V.rows());

  Eigen::RealSchur<Matrix> schur(V);
  const Matrix U = schur.matrixU();
  const Matrix T = schur.matrixT();
  const Vector c = U.transpose() * f;  // f in the Schur basis

  struct Block {
    int start, size;
    double eig_dist;
  };
  std::vector<Block> blocks;
  for (int i = 0; i < d;) {
    if (i + 1 < d && T(i + 1, i) != 0.0) {
      const double tr = T(i, i) + T(i + 1, i + 1);
      const double det = T(i, i) * T(i + 1, i + 1) - T(i, i + 1) * T(i + 1, i);
      const double im_sq = std::max(0.0, det - tr * tr / 4.0);
      const double dist = std::sqrt((tr / 2.0 - 1.0) * (tr / 2.0 - 1.0) + im_sq);
      blocks.push_back({i, 2, dist});
      i += 2;
    } else {
      blocks.push_back({i, 1, std::abs(T(i, i) - 1.0)});
      i += 1;
    }
  }

  ShellSplit out;
  double fixed_sq = 0.0;
  std::map<int, std::pair<Vector, Vector>> per_shell;  // shell -> (c_f, c_a) in Schur coords
  std::map<int, double> shell_min_dist;
  for (const Block& b : blocks) {
    if (b.eig_dist <= 1e-12) {
      out.fixed_dim += b.size;
      for (int j = 0; j < b.size; ++j) fixed_sq += c[b.start + j] * c[b.start + j];
      continue;
    }
    const int shell = b.eig_dist > 1.0 ? 0 : static_cast<int>(std::floor(1.0 / b.eig_dist));
    auto it = per_shell.find(shell);
    if (it == per_shell.end()) {
      it = per_shell.emplace(shell, std::make_pair(Vector::Zero(d), Vector::Zero(d))).first;
      shell_min_dist[shell] = b.eig_dist;
    }
    shell_min_dist[shell] = std::min(shell_min_dist[shell], b.eig_dist);
    const Matrix M = Matrix::Identity(b.size, b.size) - T.block(b.start, b.start, b.size, b.size);
    const Vector fb = c.segment(b.start, b.size);
    const Vector ab = M.fullPivLu().solve(fb);
    it->second.first.segment(b.start, b.size) = fb;
    it->second.second.segment(b.start, b.size) = ab;
  }

  out.fixed_component_norm = std::sqrt(fixed_sq);
  if (out.fixed_component_norm > fixed_tol)
    throw FixedSpaceObstruction(
        "shell_split: drift has a component in the fixed space of V (norm " +
        std::to_string(out.fixed_component_norm) + ")");

  for (const auto& [shell, vecs] : per_shell) {
    ShellBlock sb;
    sb.shell = shell;
    sb.f_block = U * vecs.first;
    sb.a_block = U * vecs.second;
    sb.min_eig_dist = shell_min_dist[shell];
    out.shells.push_back(std::move(sb));
  }
  return out;
}

SlabReport independent_slab_witness(const GaussianSpace& space, int n, double a, double eps,
                                    std::size_t n_samples, std::uint64_t seed) {
  if (n < 0 || n + 1 > space.dim())
    throw std::out_of_range("independent_slab_witness: coordinate index out of range");
  if (!(eps > 0.0)) throw std::domain_error("independent_slab_witness: eps must be > 0");

  SlabReport rep;
  rep.coordinate = n + 1;
  rep.a = a;
  rep.eps = eps;
  rep.mass_formula = std_normal_cdf(a + 0.5 + eps) - std_normal_cdf(a + 0.5 - eps);
  rep.n_samples = n_samples;

  Vector shift = Vector::Zero(space.dim());
  shift[n] = std::sqrt(space.eigs[n]);  // sqrt(eig_{n+1}) e_{n+1}, ambient

  std::vector<double> members(n_samples);
  const std::size_t un = static_cast<std::size_t>(n);
  std::vector<double> sum_z(un, 0.0), sum_z2(un, 0.0), sum_mz(un, 0.0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    Rng rng = make_stream(seed, 0x5a, s);
    const Vector x = sample(space, rng);
    const double z = x[n] / std::sqrt(space.eigs[n]);
    const bool member = (z > a + 0.5 - eps) && (z < a + 0.5 + eps);
    const double lr = cm_log_density(space, shift, x);
    const bool in_window = (lr > a - eps) && (lr < a + eps);
    if (member != in_window) {
      const double boundary_dist = std::min(std::abs(lr - (a - eps)), std::abs(lr - (a + eps)));
      if (boundary_dist > 1e-9) ++rep.window_mismatches;
    }
    members[s] = member ? 1.0 : 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      const double zi = x[static_cast<int>(i)] / std::sqrt(space.eigs[static_cast<int>(i)]);
      sum_z[i] += zi;
      sum_z2[i] += zi * zi;
      sum_mz[i] += members[s] * zi;
    }
  }
  const MeanAndSe ms = mean_and_se(members);
  rep.mass_empirical = ms.mean;
  rep.mass_se = ms.se;
  // sqrt(N) * (sample correlation) is asymptotically N(0,1) under independence.
  const double N = static_cast<double>(n_samples);
  const double var_m = ms.mean * (1.0 - ms.mean);
  for (std::size_t i = 0; i < un; ++i) {
    const double cov = sum_mz[i] / N - ms.mean * (sum_z[i] / N);
    const double var_z = sum_z2[i] / N - (sum_z[i] / N) * (sum_z[i] / N);
    const double denom = std::sqrt(std::max(1e-300, var_m * var_z));
    rep.max_independence_z = std::max(rep.max_independence_z, std::sqrt(N) * std::abs(cov) / denom);
  }
  return rep;
}

}  // namespace ergolab::gaussian
