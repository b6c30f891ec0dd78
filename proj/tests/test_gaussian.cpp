#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ergolab/errors.hpp"
#include "ergolab/gaussian.hpp"
#include "ergolab/numeric.hpp"
#include "ergolab/rng.hpp"

using namespace ergolab;
using namespace ergolab::gaussian;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_h0_vector(Rng& rng, int d, double scale) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

GaussianSpace test_space3() { return GaussianSpace(vec({1.0, 0.5, 0.25})); }

}  // namespace

TEST_CASE("GaussianSpace validation and sampling statistics") {
  CHECK_THROWS_AS(GaussianSpace(vec({1.0, 0.0})), std::domain_error);
  const Vector empty;
  CHECK_THROWS_AS(GaussianSpace{empty}, std::domain_error);

  const GaussianSpace unit(vec({1.0}));
  Rng rng(31);
  const std::size_t N = 100000;
  std::vector<double> xs(N), sq(N);
  for (std::size_t i = 0; i < N; ++i) {
    const Vector x = sample(unit, rng);
    xs[i] = x[0];
    sq[i] = x[0] * x[0];
  }
  const auto mx = mean_and_se(xs);
  CHECK(std::abs(mx.mean) < 4.0 * mx.se);
  const auto ms = mean_and_se(sq);
  CHECK(std::abs(ms.mean - 1.0) < 4.0 * ms.se);
  CHECK(std::abs(ms.mean - 1.0) < 0.02);

  const GaussianSpace sp = test_space3();
  std::vector<double> norms(N);
  Rng rng2(32);
  for (std::size_t i = 0; i < N; ++i) norms[i] = sample(sp, rng2).squaredNorm();
  const auto mn = mean_and_se(norms);
  CHECK(std::abs(mn.mean - sp.trace()) < 4.0 * mn.se);
}

TEST_CASE("cm_log_density: normalization and change of variables") {
  const GaussianSpace sp = test_space3();
  const Vector y = vec({0.4, -0.3, 0.2});  // ambient translation
  CHECK(cm_log_density(sp, vec({0, 0, 0}), vec({0.3, 1.0, -0.2})) == 0.0);

  const std::size_t N = 100000;
  std::vector<double> ws(N);
  Rng rng(33);
  for (std::size_t i = 0; i < N; ++i)
    ws[i] = std::exp(cm_log_density(sp, y, sample(sp, rng)));
  const auto ms = mean_and_se(ws);
  CHECK(std::abs(ms.mean - 1.0) < 4.0 * ms.se);

  // E[g(x + y)] = E[g(x) e^{cm(y, x)}] for a box indicator g
  const Vector lo = vec({-0.5, -0.6, -0.4}), hi = vec({0.9, 0.8, 0.6});
  const auto in_box = [&](const Vector& x) {
    for (int i = 0; i < 3; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  };
  std::vector<double> lhs(N), rhs(N);
  Rng rng_l(34), rng_r(35);
  for (std::size_t i = 0; i < N; ++i) {
    lhs[i] = in_box(sample(sp, rng_l) + y) ? 1.0 : 0.0;
    const Vector x = sample(sp, rng_r);
    rhs[i] = (in_box(x) ? 1.0 : 0.0) * std::exp(cm_log_density(sp, y, x));
  }
  const auto ml = mean_and_se(lhs), mr = mean_and_se(rhs);
  CHECK(std::abs(ml.mean - mr.mean) < 4.0 * std::sqrt(ml.se * ml.se + mr.se * mr.se));
}

TEST_CASE("exponential vector identities (ii), (viii), (ix), (x)") {
  const GaussianSpace sp = test_space3();
  Rng rng(36);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector h = random_h0_vector(rng, 3, 0.8);
    const Vector k = random_h0_vector(rng, 3, 0.8);
    const Vector f = random_h0_vector(rng, 3, 0.8);
    const Vector x = sample(sp, rng);

    // (viii) exp_h exp_k = e^{<h,k>_0} exp_{h+k}, compared in log space
    CHECK(std::abs(exp_log(sp, h, x) + exp_log(sp, k, x) - h.dot(k) -
                   exp_log(sp, h + k, x)) < 1e-10);
    // (ix) sqrt(exp_h) = e^{-|h|^2/8} exp_{h/2}
    CHECK(std::abs(0.5 * exp_log(sp, h, x) - (-h.squaredNorm() / 8.0 + exp_log(sp, h / 2, x))) <
          1e-10);
    // (x) exp_h o L_f^{-1} = e^{-<h,f>_0} exp_h
    CHECK(std::abs(std::log(exp_translate(sp, h, f, x)) - (-h.dot(f) + exp_log(sp, h, x))) <
          1e-10);
    // (iv) positivity
    CHECK(exp_eval(sp, h, x) > 0.0);
  }
}

TEST_CASE("exp_translate special cases") {
  const GaussianSpace sp = test_space3();
  Rng rng(37);
  const Vector h = vec({0.5, 0.0, -0.3});
  const Vector x = sample(sp, rng);
  CHECK(exp_translate(sp, h, vec({0, 0, 0}), x) ==
        doctest::Approx(exp_eval(sp, h, x)).epsilon(1e-12));
  const Vector f_perp = vec({0.0, 0.7, 0.0});  // <h, f>_0 = 0 in H_0 coordinates
  CHECK(exp_translate(sp, h, f_perp, x) == doctest::Approx(exp_eval(sp, h, x)).epsilon(1e-10));
}

TEST_CASE("weyl_apply: special cases and unitarity through the Gram identity") {
  Rng rng(38);
  const Matrix V = random_orthogonal(4, rng);
  const Vector h = random_h0_vector(rng, 4, 1.0);

  const WeylImage pure_rot = weyl_apply(AffineMap(Vector::Zero(4), V), h);
  CHECK(pure_rot.log_coeff == doctest::Approx(0.0));
  CHECK((pure_rot.vec - V * h).norm() < 1e-12);

  const Vector f = random_h0_vector(rng, 4, 1.0);
  const WeylImage trans = weyl_apply(AffineMap(f, Matrix::Identity(4, 4)), Vector::Zero(4));
  CHECK(trans.log_coeff == doctest::Approx(-0.5 * f.squaredNorm()));
  CHECK((trans.vec - f).norm() < 1e-12);

  // <W exp_h, W exp_k> = <exp_h, exp_k> via <exp_a, exp_b> = e^{<a,b>_0}
  for (int trial = 0; trial < 200; ++trial) {
    const Vector a = random_h0_vector(rng, 4, 1.0);
    const Vector b = random_h0_vector(rng, 4, 1.0);
    const Vector g = random_h0_vector(rng, 4, 1.0);
    const Matrix W = random_orthogonal(4, rng);
    const AffineMap A(g, W);
    const WeylImage wa = weyl_apply(A, a), wb = weyl_apply(A, b);
    const double gram = wa.log_coeff + wb.log_coeff + wa.vec.dot(wb.vec);
    CHECK(std::abs(gram - a.dot(b)) < 1e-10);
  }
}

TEST_CASE("apply_T: identity, composition law, commutation criterion") {
  const GaussianSpace sp = test_space3();
  Rng rng(39);
  const Vector x = sample(sp, rng);
  CHECK((apply_T(sp, identity_map(3), x) - x).norm() < 1e-14);

  for (int trial = 0; trial < 50; ++trial) {
    const AffineMap A(random_h0_vector(rng, 3, 1.0), random_orthogonal(3, rng));
    const AffineMap B(random_h0_vector(rng, 3, 1.0), random_orthogonal(3, rng));
    const Vector y = sample(sp, rng);
    const Vector two_step = apply_T(sp, A, apply_T(sp, B, y));
    const Vector composed = apply_T(sp, compose(A, B), y);
    CHECK((two_step - composed).norm() < 1e-10);
    CHECK((apply_T(sp, A, apply_T_inverse(sp, A, y)) - y).norm() < 1e-10);
    CHECK(orthogonality_defect(compose(A, B).V) < kOrthogonalityTol);
  }

  // L_f and T_{(0,V)} commute exactly when V f = f
  const Matrix R = rotation_blocks({M_PI / 3}, 3);  // rotates coords 0,1; fixes coord 2
  const auto commutes = [&](const Vector& f) {
    const AffineMap rot(Vector::Zero(3), R);
    const AffineMap lf(f, Matrix::Identity(3, 3));
    const Vector y = sample(sp, rng);
    const Vector ab = apply_T(sp, lf, apply_T(sp, rot, y));
    const Vector ba = apply_T(sp, rot, apply_T(sp, lf, y));
    return (ab - ba).norm() < 1e-12;
  };
  CHECK(commutes(vec({0.0, 0.0, 1.3})));        // fixed by R
  CHECK_FALSE(commutes(vec({1.0, 0.0, 0.0})));  // moved by R
}

TEST_CASE("koopman_consistency: dual-path evaluation") {
  const GaussianSpace sp = test_space3();
  Rng rng(40);

  // A = (0, I): both sides are exp_h itself
  const Vector h0 = vec({0.4, -0.2, 0.1});
  const Vector x0 = sample(sp, rng);
  const auto [l0, r0] = koopman_consistency(sp, identity_map(3), h0, x0);
  CHECK(l0 == doctest::Approx(exp_eval(sp, h0, x0)).epsilon(1e-12));
  CHECK(r0 == doctest::Approx(exp_eval(sp, h0, x0)).epsilon(1e-12));

  // translation case: U_{L_f} 1 = e^{-|f|^2/8} exp_{f/2}
  const Vector f = vec({0.6, 0.3, -0.4});
  const AffineMap lf(f, Matrix::Identity(3, 3));
  const Vector x1 = sample(sp, rng);
  const auto [l1, r1] = koopman_consistency(sp, lf, Vector::Zero(3), x1);
  const double expected = std::exp(-f.squaredNorm() / 8.0) * exp_eval(sp, f / 2, x1);
  CHECK(l1 == doctest::Approx(expected).epsilon(1e-10));
  CHECK(r1 == doctest::Approx(expected).epsilon(1e-10));

  for (int trial = 0; trial < 100; ++trial) {
    const AffineMap A(random_h0_vector(rng, 3, 0.7), random_orthogonal(3, rng));
    const Vector h = random_h0_vector(rng, 3, 0.7);
    const Vector x = sample(sp, rng);
    const auto [lhs, rhs] = koopman_consistency(sp, A, h, x);
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("drift_orbit: closed forms and the drift cocycle") {
  const Vector f2 = vec({1.0, 0.0});

  const DriftOrbit straight = drift_orbit(AffineMap(f2, Matrix::Identity(2, 2)), 16);
  for (std::size_t k = 0; k < 16; ++k)
    CHECK((straight.terms[k] - static_cast<double>(k + 1) * f2).norm() < 1e-12);

  const DriftOrbit flip = drift_orbit(AffineMap(f2, -Matrix::Identity(2, 2)), 16);
  for (std::size_t k = 0; k < 16; ++k) {
    if (k % 2 == 0)
      CHECK((flip.terms[k] - f2).norm() < 1e-12);
    else
      CHECK(flip.terms[k].norm() < 1e-12);
  }

  const Matrix rot90 = rotation_blocks({M_PI / 2}, 2);
  const DriftOrbit four = drift_orbit(AffineMap(f2, rot90), 64);
  for (std::size_t k = 0; k < 64; ++k) {
    CHECK(four.norms_sq[k] <= 4.0 + 1e-9);  // orbit bounded by 2
    if ((k + 1) % 4 == 0) CHECK(four.terms[k].norm() < 1e-10);
  }

  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const AffineMap A(random_h0_vector(rng, 4, 1.0), random_orthogonal(4, rng));
    const DriftOrbit orbit = drift_orbit(A, 130);
    const std::size_t m = 1 + rng.uniform_below(64), n = 1 + rng.uniform_below(64);
    Matrix Vm = Matrix::Identity(4, 4);
    for (std::size_t i = 0; i < m; ++i) Vm = A.V * Vm;
    const Vector expect = orbit.terms[m - 1] + Vm * orbit.terms[n - 1];
    CHECK((orbit.terms[m + n - 1] - expect).norm() < 1e-10);
  }
}

TEST_CASE("solve_coboundary: examples, random instances, and NoSolution") {
  const Matrix rot90 = rotation_blocks({M_PI / 2}, 2);
  const auto a = solve_coboundary(rot90, vec({1.0, 0.0}));
  REQUIRE(a.has_value());
  CHECK((*a - vec({0.5, 0.5})).norm() < 1e-12);
  CHECK((vec({1.0, 0.0}) - (*a - rot90 * *a)).norm() < 1e-12);

  const auto half = solve_coboundary(-Matrix::Identity(3, 3), vec({0.4, -1.0, 0.2}));
  REQUIRE(half.has_value());
  CHECK((*half - vec({0.2, -0.5, 0.1})).norm() < 1e-12);

  CHECK_FALSE(solve_coboundary(Matrix::Identity(2, 2), vec({0.3, 0.0})).has_value());

  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    // angles bounded away from 0 keep the spectrum away from z = 1
    std::vector<double> angles(3);
    for (auto& th : angles) th = 0.3 + (M_PI - 0.6) * rng.uniform();
    const Matrix base = rotation_blocks(angles, 6);
    const Matrix Q = random_orthogonal(6, rng);
    const Matrix V = Q * base * Q.transpose();
    const Vector f = random_h0_vector(rng, 6, 1.0);
    const auto sol = solve_coboundary(V, f, 1e-9);
    REQUIRE(sol.has_value());
    CHECK((f - (*sol - V * *sol)).norm() < 1e-9);
    const DriftOrbit orbit = drift_orbit(AffineMap(f, V), 10000);
    const double bound = 2.0 * sol->norm() + 1e-8;
    for (double s : orbit.norms_sq) CHECK(std::sqrt(s) <= bound);
  }

  // fixed-space drift grows linearly
  const Vector f = vec({0.7, -0.1});
  const DriftOrbit lin = drift_orbit(AffineMap(f, Matrix::Identity(2, 2)), 2000);
  for (std::size_t k = 0; k < 2000; k += 97)
    CHECK(std::sqrt(lin.norms_sq[k]) ==
          doctest::Approx(static_cast<double>(k + 1) * f.norm()).epsilon(1e-9));
}

TEST_CASE("invariant_density: normalization and Monte Carlo invariance") {
  const GaussianSpace sp = test_space3();
  const Matrix R = rotation_blocks({M_PI / 2}, 3);
  const Vector a = vec({0.5, 0.5, 0.0});
  const Vector f = a - R * a;
  const AffineMap A(f, R);

  CHECK(invariant_density(Vector::Zero(3)).h.norm() == 0.0);

  const auto [diff, se] =
      invariance_box_check(sp, A, a, vec({-0.8, -0.7, -0.9}), vec({0.6, 0.9, 0.8}), 100000, 43);
  CHECK(std::abs(diff) < 4.0 * se);

  // int exp_a d mu_B = 1
  Rng rng(44);
  std::vector<double> ws(100000);
  for (auto& w : ws) w = exp_eval(sp, a, sample(sp, rng));
  const auto ms = mean_and_se(ws);
  CHECK(std::abs(ms.mean - 1.0) < 4.0 * ms.se);
}

TEST_CASE("sqrt_exp_norm: closed form and Monte Carlo") {
  const GaussianSpace sp = test_space3();
  CHECK(sqrt_exp_norm(sp, Vector::Zero(3)) == doctest::Approx(1.0));
  const Vector h8 = vec({2.0, 2.0, 0.0});  // |h|_0^2 = 8
  CHECK(sqrt_exp_norm(sp, h8) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));

  const Vector h = vec({0.9, -0.5, 0.7});
  Rng rng(45);
  std::vector<double> ws(200000);
  for (auto& w : ws) w = std::exp(0.5 * exp_log(sp, h, sample(sp, rng)));
  const auto ms = mean_and_se(ws);
  CHECK(std::abs(ms.mean - sqrt_exp_norm(sp, h)) < 4.0 * ms.se);
}

TEST_CASE("poincare_exponent: declared growth models") {
  std::vector<double> bounded, logs, linear, noisy;
  Rng rng(46);
  for (int n = 1; n <= 2000; ++n) {
    bounded.push_back(3.0 + 0.5 * std::sin(0.37 * n));
    logs.push_back(2.0 * std::log(static_cast<double>(n)));
    linear.push_back(0.8 * n);
    noisy.push_back(1.6 * std::log(static_cast<double>(n)) + 0.1 * rng.normal());
  }
  const auto eb = poincare_exponent(bounded, GrowthModel::Bounded);
  CHECK(std::isinf(eb.delta));
  const auto el = poincare_exponent(logs, GrowthModel::LogGrowth);
  CHECK(el.delta == doctest::Approx(0.5).epsilon(1e-9));
  const auto ep = poincare_exponent(linear, GrowthModel::PowerGrowth);
  CHECK(ep.delta == 0.0);
  CHECK(ep.beta == doctest::Approx(1.0).epsilon(1e-6));

  const auto en = poincare_exponent(noisy, GrowthModel::LogGrowth);
  CHECK(std::abs(en.delta - 1.0 / 1.6) < 0.1 / 1.6);

  // Auto mode identifies each declared family
  CHECK(poincare_exponent(logs, GrowthModel::Auto).model == GrowthModel::LogGrowth);
  CHECK(std::isinf(poincare_exponent(bounded, GrowthModel::Auto).delta));
  CHECK(poincare_exponent(linear, GrowthModel::Auto).delta == 0.0);
}

TEST_CASE("t_diss_bounds") {
  CHECK(t_diss_bounds(0.0) == std::pair<double, double>{0.0, 0.0});
  const auto [l2, u2] = t_diss_bounds(2.0);
  CHECK(l2 == doctest::Approx(2.0));
  CHECK(u2 == doctest::Approx(4.0));
  const auto [lh, uh] = t_diss_bounds(0.5);
  CHECK(lh == doctest::Approx(1.0));
  CHECK(uh == doctest::Approx(2.0));
  const auto [li, ui] = t_diss_bounds(std::numeric_limits<double>::infinity());
  CHECK(std::isinf(li));
  CHECK(std::isinf(ui));
  CHECK_THROWS_AS(t_diss_bounds(-0.5), std::domain_error);
}

TEST_CASE("hopf_mc: measure-preserving row, bounded drift, synthetic decay") {
  const GaussianSpace sp = test_space3();
  Rng rng(47);
  const AffineMap A(random_h0_vector(rng, 3, 1.0), rotation_blocks({2.1}, 3));

  const HopfMcResult zero_t = hopf_mc(sp, A, 0.0, 7, 64, 8);
  for (const auto& trace : zero_t.traces) {
    for (std::size_t k = 1; k <= 64; ++k)
      CHECK(trace.log_partial(k) == doctest::Approx(std::log(double(k))).epsilon(1e-12));
    CHECK(trace.classification == products::HopfClass::DivergentLike);
  }

  // V = -I keeps f^{(n)} bounded: every other summand is exactly 1
  const AffineMap flip(vec({0.8, -0.4, 0.3}), -Matrix::Identity(3, 3));
  const HopfMcResult bounded = hopf_mc(sp, flip, 1.3, 8, 512, 16);
  CHECK_FALSE(bounded.fixed_overlap_warning);
  for (const auto& trace : bounded.traces)
    CHECK(trace.classification == products::HopfClass::DivergentLike);

  // drift on the fixed space of V = I triggers the precondition warning
  const HopfMcResult warned = hopf_mc(sp, AffineMap(vec({0.5, 0, 0}), Matrix::Identity(3, 3)),
                                      1.0, 9, 16, 2);
  CHECK(warned.fixed_overlap_warning);

  std::vector<double> linear_norms(512);
  for (std::size_t n = 0; n < 512; ++n) linear_norms[n] = static_cast<double>(n + 1);
  const auto synth = hopf_mc_synthetic(linear_norms, 3.0, 10, 64);
  std::size_t convergent = 0;
  for (const auto& trace : synth)
    if (trace.classification == products::HopfClass::ConvergentLike) ++convergent;
  CHECK(convergent > synth.size() / 2);
}

TEST_CASE("hopf_mc_synthetic: classification is monotone in t per sample") {
  std::vector<double> norms(2048);
  for (std::size_t n = 0; n < 2048; ++n) norms[n] = 1.0 * std::log(static_cast<double>(n + 2));
  const std::vector<double> grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
  const std::size_t n_samples = 32;
  std::vector<std::vector<products::HopfClass>> cls(n_samples);
  for (double t : grid) {
    const auto traces = hopf_mc_synthetic(norms, t, 11, n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) cls[s].push_back(traces[s].classification);
  }
  std::size_t inversions = 0, pairs = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      ++pairs;
      if (cls[s][i] == products::HopfClass::ConvergentLike &&
          cls[s][i + 1] == products::HopfClass::DivergentLike)
        ++inversions;
    }
  }
  CHECK(inversions <= pairs / 50);
}

TEST_CASE("shell_split: single shell, zero drift, reassembly, obstruction") {
  // |e^{i pi/6} - 1| = 0.5176 lies in (1/2, 1]: a single shell with n = 1
  const Matrix R = rotation_blocks({M_PI / 6}, 2);
  const Vector f = vec({1.0, -0.5});
  const ShellSplit split = shell_split(R, f);
  REQUIRE(split.shells.size() == 1);
  CHECK(split.shells[0].shell == 1);
  const auto direct = solve_coboundary(R, f);
  REQUIRE(direct.has_value());
  CHECK((split.shells[0].a_block - *direct).norm() < 1e-10);

  const ShellSplit zero = shell_split(R, Vector::Zero(2));
  for (const auto& sb : zero.shells) CHECK(sb.a_block.norm() < 1e-14);

  Rng rng(48);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> angles(4);
    for (auto& th : angles) th = 0.05 + (M_PI - 0.1) * rng.uniform();
    const Matrix Q = random_orthogonal(8, rng);
    const Matrix V = Q * rotation_blocks(angles, 8) * Q.transpose();
    const Vector g = random_h0_vector(rng, 8, 1.0);
    const ShellSplit sp = shell_split(V, g);
    Vector reassembled = Vector::Zero(8);
    for (const auto& sb : sp.shells) {
      reassembled += sb.a_block - V * sb.a_block;
      CHECK(sb.a_block.norm() <=
            (sb.shell + 1) * sb.f_block.norm() + 1e-10);
    }
    CHECK((reassembled - g).norm() < 1e-10);
  }

  // eigenvalue 1 with drift on the fixed space
  Matrix mixed = Matrix::Identity(4, 4);
  mixed.block<2, 2>(2, 2) = rotation_blocks({1.0}, 2);
  CHECK_THROWS_AS(shell_split(mixed, vec({0.3, 0.0, 0.5, 0.0})), FixedSpaceObstruction);
  const ShellSplit ok = shell_split(mixed, vec({0.0, 0.0, 0.5, -0.2}));
  CHECK(ok.fixed_dim == 2);
  CHECK(ok.fixed_component_norm < 1e-12);
}

TEST_CASE("independent_slab_witness") {
  const GaussianSpace sp(vec({2.0, 1.0, 0.5, 0.25}));
  const SlabReport rep = independent_slab_witness(sp, 2, 0.0, 0.1, 50000, 49);
  CHECK(rep.coordinate == 3);
  CHECK(rep.mass_formula == doctest::Approx(std_normal_cdf(0.6) - std_normal_cdf(0.4)));
  CHECK(rep.window_mismatches == 0);
  CHECK(std::abs(rep.mass_empirical - rep.mass_formula) < 4.0 * std::max(rep.mass_se, 1e-6));
  CHECK(rep.max_independence_z < 4.0);

  const SlabReport shifted = independent_slab_witness(sp, 1, 1.3, 0.25, 50000, 50);
  CHECK(shifted.mass_formula == doctest::Approx(std_normal_cdf(1.3 + 0.75) -
                                                std_normal_cdf(1.3 + 0.25)));
  CHECK(shifted.window_mismatches == 0);
  CHECK(std::abs(shifted.mass_empirical - shifted.mass_formula) <
        4.0 * std::max(shifted.mass_se, 1e-6));

  CHECK_THROWS_AS(independent_slab_witness(sp, 4, 0.0, 0.1, 10, 1), std::out_of_range);
}
