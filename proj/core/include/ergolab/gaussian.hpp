#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ergolab/products.hpp"  // HopfTrace / classify_trace
#include "ergolab/rng.hpp"

namespace ergolab::gaussian {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Coordinate conventions used throughout this module:
//  * Points x live in ambient coordinates; coordinate i is N(0, eigs[i]).
//  * Cameron-Martin vectors (h, k, f, a, ...) are given by their components
//    in the orthonormal basis {sqrt(eigs[i]) e_i} of H_0, so the Euclidean
//    dot product of two such coordinate vectors is their <.,.>_0 pairing and
//    orthogonal operators of H_0 are plain orthogonal matrices.
//  * cm_log_density takes the translation in ambient coordinates (it is a
//    statement about L_y for y in H); everything else takes H_0 coordinates.

/// R^d with a diagonal covariance; the finite model of (H, mu_B).
struct GaussianSpace {
  Vector eigs;  // eigenvalues of B, all > 0
  explicit GaussianSpace(Vector eigs_);
  int dim() const { return static_cast<int>(eigs.size()); }
  double trace() const { return eigs.sum(); }

  Vector ambient_from_h0(const Vector& h) const;
  Vector h0_from_ambient(const Vector& y) const;
  Vector standardize(const Vector& x) const;  // z_i = x_i / sqrt(eigs_i)
};

/// Affine operator (f, V): x -> f + Vx on H_0; V orthogonal.
struct AffineMap {
  Vector f;
  Matrix V;
  AffineMap(Vector f_, Matrix V_);
  int dim() const { return static_cast<int>(f.size()); }
};

constexpr double kOrthogonalityTol = 1e-10;

double orthogonality_defect(const Matrix& V);  // max |V^T V - I|

/// Composition law (f,V)(f',V') = (f + V f', V V').
AffineMap compose(const AffineMap& a, const AffineMap& b);
AffineMap inverse(const AffineMap& a);
AffineMap identity_map(int dim);

/// Scaling automorphism alpha_t(f, V) = (t f, V).
AffineMap scale_drift(const AffineMap& a, double t);

Matrix givens_rotation(int dim, int i, int j, double theta);
/// QR of a seeded Gaussian matrix, sign-fixed and re-orthonormalized.
Matrix random_orthogonal(int dim, Rng& rng);
/// Block-diagonal rotation matrix from a list of angles (plus a trailing
/// 1x1 identity block when dim is odd).
Matrix rotation_blocks(const std::vector<double>& angles, int dim);

/// Draw from mu_B (ambient coordinates).
Vector sample(const GaussianSpace& space, Rng& rng);

/// log(d mu_B o L_y^{-1} / d mu_B)(x) = sum y_i x_i / eig_i - (1/2) sum y_i^2 / eig_i
/// (y ambient).
double cm_log_density(const GaussianSpace& space, const Vector& y_ambient, const Vector& x);

/// log exp_h(x) = <B^{-1} h, x> - (1/2)||h||_0^2 with h in H_0 coordinates.
double exp_log(const GaussianSpace& space, const Vector& h, const Vector& x);
double exp_eval(const GaussianSpace& space, const Vector& h, const Vector& x);

/// exp_h composed with the inverse translation by f: exp_h(x - f).
double exp_translate(const GaussianSpace& space, const Vector& h, const Vector& f,
                     const Vector& x);

struct WeylImage {
  double log_coeff;  // -<f, Vh>_0 - (1/2)||f||_0^2
  Vector vec;        // f + Vh
};

/// W_{(f,V)} exp_h = e^{log_coeff} exp_{f + Vh}.
WeylImage weyl_apply(const AffineMap& A, const Vector& h);

/// T_{(f,V)} x = f + Vx, acting on ambient points through the H_0 chart.
Vector apply_T(const GaussianSpace& space, const AffineMap& A, const Vector& x);
Vector apply_T_inverse(const GaussianSpace& space, const AffineMap& A, const Vector& x);

/// Evaluates U_{T_A} exp_h at x along two routes: the Koopman definition
/// (exp_h o T_A^{-1}) sqrt(d mu o T_A^{-1}/d mu) and the Weyl image of
/// (f/2, V). Both must agree.
std::pair<double, double> koopman_consistency(const GaussianSpace& space, const AffineMap& A,
                                              const Vector& h, const Vector& x);

struct DriftOrbit {
  std::vector<Vector> terms;      // f^(1), ..., f^(n)
  std::vector<double> norms_sq;   // ||f^(k)||_0^2
};

/// Drift cocycle of (f,V)^n = (f^(n), V^n): f^(k+1) = f + V f^(k).
DriftOrbit drift_orbit(const AffineMap& A, std::size_t n);

/// Solves f = a - Va; minimum-norm least squares, so a lives in the
/// orthogonal complement of the fixed space. NoSolution (nullopt) when the
/// residual exceeds tol, i.e. f has a fixed-space component.
std::optional<Vector> solve_coboundary(const Matrix& V, const Vector& f, double tol = 1e-9);

struct ExpVector {
  Vector h;  // H_0 coordinates
};

/// Density of the T_{(a - Va, V)}-invariant equivalent measure: exp_a.
ExpVector invariant_density(const Vector& a);

/// Paired Monte Carlo test of invariance of exp_a * mu_B under T_A for a box
/// indicator g: returns (mean difference, standard error of the difference).
std::pair<double, double> invariance_box_check(const GaussianSpace& space, const AffineMap& A,
                                               const Vector& a, const Vector& box_lo,
                                               const Vector& box_hi, std::size_t n_samples,
                                               std::uint64_t seed);

/// ||sqrt(exp_h)||_1 = e^{-||h||_0^2 / 8}.
double sqrt_exp_norm(const GaussianSpace& space, const Vector& h);

enum class GrowthModel { Bounded, LogGrowth, PowerGrowth, Auto };

struct PoincareEstimate {
  double delta = 0.0;          // +inf for bounded norms
  GrowthModel model = GrowthModel::Bounded;
  double coeff = 0.0;          // c in c*log n or c*n^beta
  double beta = 0.0;           // power-law exponent
  double residual = 0.0;       // normalized RMS of the fit
  bool undecided = false;
};

/// Convergence abscissa of sum e^{-alpha s_n} for a declared growth model of
/// s_n = ||f^(n)||_0^2: bounded -> +inf, c*log n -> 1/c, c*n^beta -> 0.
/// Auto fits all three and keeps the best; none fitting within the residual
/// threshold marks the estimate undecided.
PoincareEstimate poincare_exponent(const std::vector<double>& norms_sq, GrowthModel model,
                                   double residual_threshold = 0.1);

/// Dissipativity threshold sandwich sqrt(2 delta) <= t_diss <= 2 sqrt(2 delta).
std::pair<double, double> t_diss_bounds(double delta);

struct HopfMcResult {
  std::vector<products::HopfTrace> traces;
  bool fixed_overlap_warning = false;  // V has a fixed vector carrying drift
};

/// Per-sample Hopf series of T_{alpha_t(A)}: partial sums of
/// exp(t <B^{-1} f^(n), x> - (t^2/2) ||f^(n)||_0^2), kept in log space.
/// Sample i draws from the stream (seed, i), so results never depend on the
/// worker schedule.
HopfMcResult hopf_mc(const GaussianSpace& space, const AffineMap& A, double t,
                     std::uint64_t seed, std::size_t K, std::size_t n_samples);

/// Same series driven by an externally supplied norm ladder; the Gaussian
/// field along the orbit is modeled by independent N(0, s_n) draws.
std::vector<products::HopfTrace> hopf_mc_synthetic(const std::vector<double>& norms_sq, double t,
                                                   std::uint64_t seed, std::size_t n_samples);

struct ShellBlock {
  int shell = 0;            // n with 1/(n+1) < |z-1| <= 1/n (0 for |z-1| > 1)
  Vector f_block;           // projection of f onto the shell subspace
  Vector a_block;           // transfer vector with f_block = a_block - V a_block
  double min_eig_dist = 0;  // min |z-1| over the shell's eigenvalues
};

struct ShellSplit {
  std::vector<ShellBlock> shells;  // sorted by shell index
  int fixed_dim = 0;               // dimension of ker(I - V)
  double fixed_component_norm = 0; // ||projection of f onto ker(I - V)||
};

/// Splits f along the spectral shells of V around z = 1 and solves the
/// coboundary equation shell by shell; ||a_block|| <= (n+1) ||f_block||.
/// Eigenvalues within 1e-12 of 1 count as fixed space; a nonzero drift
/// component there throws FixedSpaceObstruction.
ShellSplit shell_split(const Matrix& V, const Vector& f, double fixed_tol = 1e-9);

struct SlabReport {
  int coordinate = 0;        // 1-based index n+1 of the slab coordinate
  double a = 0.0, eps = 0.0;
  double mass_formula = 0.0;   // Phi(a+1/2+eps) - Phi(a+1/2-eps)
  double mass_empirical = 0.0;
  double mass_se = 0.0;
  std::size_t window_mismatches = 0;  // membership vs log-RN window disagreements
  double max_independence_z = 0.0;    // max |corr z-score| against coords 1..n
  std::size_t n_samples = 0;
};

/// Slab D_n = {x : a + 1/2 - eps < <x, e_{n+1}>/sqrt(eig_{n+1}) < a + 1/2 + eps}:
/// the translation by sqrt(eig_{n+1}) e_{n+1} has log-RN in (a - eps, a + eps)
/// exactly on D_n, the mass does not depend on n, and D_n is independent of
/// the first n coordinates.
SlabReport independent_slab_witness(const GaussianSpace& space, int n, double a, double eps,
                                    std::size_t n_samples = 100'000, std::uint64_t seed = 1);

}  // namespace ergolab::gaussian
