#include <gtest/gtest.h>

#include <cmath>

#include "landau/operators.hpp"
#include "oracles/oracles.hpp"

using namespace landau;

namespace {

// mu_k^w of e^{-a s}: ((-1)^k/2) int L_k(t) e^{-(1+a)t/2} dt = (1-a)^k / (1+a)^{k+1}
double gaussian_weyl_eig(double a, int k) { return std::pow(1.0 - a, k) / std::pow(1.0 + a, k + 1); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// |phi_{k,q}|^2 from the explicit Landau-level eigenfunction
double phi_sq(int k, int q, double b, double x, double y) {
  if (k < q) std::swap(k, q);  // the density is symmetric in (k, q)
  const double rho = b * (x * x + y * y) / 2.0;
  const double lag = oracle::laguerre_series(q, k - q, rho);
  const double pre = b / (2.0 * oracle::pi) * oracle::factorial(q) / oracle::factorial(k);
  return pre * std::pow(rho, k - q) * lag * lag * std::exp(-rho);
}

}  // namespace

TEST(WeylMatrix, RankOneProjection) {
  auto t = weyl_matrix(level_kernel_symbol(0, 2 * oracle::pi), 10);
  for (int k = 0; k < 10; ++k)
    for (int l = 0; l < 10; ++l) EXPECT_LT(std::abs(t.entries(k, l) - (k == 0 && l == 0 ? 1.0 : 0.0)), 1e-9);
  auto ev = eig_hermitian(t).eigenvalues;
  EXPECT_NEAR(ev.back(), 1.0, 1e-9);
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) EXPECT_LT(std::abs(ev[i]), 1e-9);
}

TEST(WeylMatrix, ConstantIsScalar) {
  auto t = weyl_matrix(Symbol2D::radial(RadialProfile::make_constant(2.5)), 12);
  for (int k = 0; k < 12; ++k)
    for (int l = 0; l < 12; ++l) EXPECT_LT(std::abs(t.entries(k, l) - (k == l ? 2.5 : 0.0)), 1e-10);
}

TEST(WeylMatrix, RadialGaussianIsDiagonal) {
  const double a = 0.1;
  auto t = weyl_matrix(Symbol2D::radial(RadialProfile::make_gaussian(a)), 33);
  double off = 0.0, diag = 0.0;
  for (int k = 0; k < 33; ++k)
    for (int l = 0; l < 33; ++l) (k == l ? diag : off) = std::max(k == l ? diag : off, std::abs(t.entries(k, l)));
  EXPECT_LT(off, 1e-9 * diag);
  for (int k = 0; k <= 32; ++k) EXPECT_LT(rel_err(t.entries(k, k).real(), gaussian_weyl_eig(a, k)), 1e-8) << k;
  EXPECT_LT((t.entries - t.entries.adjoint()).cwiseAbs().maxCoeff(), 1e-10 * t.entries.cwiseAbs().maxCoeff());
}

TEST(WeylMatrix, NonConvergenceIsReported) {
  // a disk indicator is not resolved by Gauss-Hermite, so doubling disagrees
  EXPECT_THROW(weyl_matrix(Symbol2D::radial(RadialProfile::make_disk(2.0)), 6), AccuracyError);
  EXPECT_THROW(weyl_matrix(Symbol2D::radial(RadialProfile::make_constant(1.0)), 300), std::invalid_argument);
}

TEST(WeylRadialEigs, Fixtures) {
  auto g1 = weyl_radial_eigs(RadialProfile::make_gaussian(1.0, 1.0 / oracle::pi), 40);
  EXPECT_NEAR(g1[0], 1.0 / (2 * oracle::pi), 1e-15);
  for (int k = 1; k < 40; ++k) EXPECT_LT(std::abs(g1[k]), 1e-10);
  // constant through the quadrature path
  auto c = weyl_radial_eigs(RadialProfile::make_custom([](double) { return 3.0; }), 50);
  for (int k = 0; k < 50; ++k) EXPECT_NEAR(c[k], 3.0, 1e-10) << k;
  for (double a : {0.1, 0.5, 2.0}) {
    auto mu = weyl_radial_eigs(RadialProfile::make_gaussian(a), 65);
    for (int k = 0; k <= 64; ++k) EXPECT_LT(std::abs(mu[k] - gaussian_weyl_eig(a, k)), 1e-13) << a << " " << k;
  }
}

TEST(WeylRadialEigs, MatchesMatrixDiagonal) {
  auto mix = RadialProfile::make_laguerre_mix({0.2, -0.5, 0.0, 0.9, 0.3});
  auto mu = weyl_radial_eigs(mix, 20);
  auto t = weyl_matrix(Symbol2D::radial(mix), 20);
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(t.entries(k, k).real(), mu[k], 1e-10);
  // c_k (-1)^k L_k(2s) e^{-s} has eigenvalue c_k / 2 on index k
  const std::vector<double> c{0.2, -0.5, 0.0, 0.9, 0.3};
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(mu[k], k < 5 ? c[k] / 2 : 0.0, 1e-13);
}

TEST(WeylRadialEigs, LargeKStable) {
  auto mu = weyl_radial_eigs(RadialProfile::make_power(2.0), 5000);
  ASSERT_EQ(mu.size(), 5000u);
  for (double v : mu) ASSERT_TRUE(std::isfinite(v));
  // the power profile gives positive, decreasing eigenvalues
  for (int k = 1; k < 5000; k += 97) EXPECT_LT(mu[k], mu[k - 1]);
  EXPECT_GT(mu[4999], 0.0);
}

TEST(WeylRadialEigsFourier, AgreesWithDirectFormula) {
  for (auto p : {RadialProfile::make_gaussian(1.0, 1.0 / oracle::pi), RadialProfile::make_gaussian(0.3),
                 RadialProfile::make_laguerre_mix({0.5, 0.1, -0.7, 0.0, 0.2})}) {
    auto direct = weyl_radial_eigs(p, 40);
    auto viaf = weyl_radial_eigs_fourier(radial_fourier_transform(p), 40);
    for (int k = 0; k < 40; ++k) EXPECT_NEAR(direct[k], viaf[k], 1e-9) << p.kind_name() << " " << k;
  }
  auto z = weyl_radial_eigs_fourier(RadialProfile::make_constant(0.0), 7);
  for (double v : z) EXPECT_EQ(v, 0.0);
}

TEST(AntiwickRadialEigs, Fixtures) {
  auto e = antiwick_radial_eigs_log(RadialProfile::make_gaussian(1.0), 60);
  for (int k = 0; k < 60; ++k) EXPECT_NEAR(e[k].log_abs, -(k + 1) * std::log(3.0), 1e-12 * (k + 1)) << k;
  auto c = antiwick_radial_eigs(RadialProfile::make_custom([](double) { return 1.7; }), 20);
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(c[k], 1.7, 1e-12);
}

TEST(AntiwickRadialEigs, MatchesWeylOfConvolution) {
  for (auto p : {RadialProfile::make_gaussian(0.4), RadialProfile::make_laguerre_mix({1.0, 0.3, 0.5})}) {
    auto aw = antiwick_radial_eigs(p, 65);
    auto w = weyl_radial_eigs(antiwick_to_weyl(Symbol2D::radial(p)).profile, 65);
    for (int k = 0; k <= 64; ++k) EXPECT_LT(std::abs(aw[k] - w[k]), 1e-8 * std::abs(aw[k]) + 1e-15) << k;
  }
}

TEST(ToeplitzRadialEigs, ExponentialWeight) {
  for (double b : {1.0, 2.0})
    for (double g : {0.5, 1.0}) {
      const double mu = 2.0 * g / b;
      auto nu = toeplitz_radial_eigs_log(RadialProfile::make_exp_beta(g, 1.0), 0, b, 201);
      for (int k = 0; k <= 200; ++k) EXPECT_NEAR(nu[k].log_abs, -(k + 1) * std::log1p(mu), 1e-10) << k;
    }
}

TEST(ToeplitzRadialEigs, DiskIsIncompleteGamma) {
  auto nu = toeplitz_radial_eigs_log(RadialProfile::make_disk(1.0), 0, 2.0, 401);
  EXPECT_NEAR(nu[0].value(), 1.0 - std::exp(-1.0), 1e-15);
  for (int k = 0; k <= 400; k += 10) {
    const double ref = oracle::log_incomplete_gamma_p(k + 1.0, 1.0);
    EXPECT_NEAR(nu[k].log_abs, ref, 1e-10 * std::max(1.0, std::abs(ref))) << k;
  }
}

TEST(ToeplitzRadialEigs, HigherLevelsMatchPlanarQuadrature) {
  const auto zeta = RadialProfile::make_gaussian(0.3);
  for (double b : {1.0, 2.0})
    for (int q : {1, 2}) {
      auto nu = toeplitz_radial_eigs(zeta, q, b, 33);
      for (int k : {0, 1, 3, 10, 20, 32}) {
        const double sigma = std::sqrt(2.0 / b);
        const double ref = integrate_r2([&](double x, double y) { return zeta(x * x + y * y) * phi_sq(k, q, b, x, y); },
                                        cached_gauss_hermite(k + q + 60), {0.0, 0.0}, sigma);
        EXPECT_LT(rel_err(nu[k], ref), 1e-7) << b << " " << q << " " << k;
      }
    }
}

TEST(ToeplitzRadialEigs, SecondDerivativeIdentity) {
  // (1 + Delta/2b) zeta on level 0 equals zeta on level 1
  for (double b : {1.0, 2.0}) {
    const double a = 0.25, c = 2 * a / b;
    auto zeta = Symbol2D::radial(RadialProfile::make_gaussian(a));
    auto lhs = toeplitz_radial_eigs(level_lift(zeta, b, 1).profile, 0, b, 21);
    auto rhs = toeplitz_radial_eigs(zeta.profile, 1, b, 21);
    for (int k = 0; k <= 20; ++k) {
      EXPECT_LT(rel_err(lhs[k], rhs[k]), 1e-7) << k;
      EXPECT_LT(rel_err(rhs[k], (1.0 + c * c * k) / std::pow(1.0 + c, k + 2)), 1e-10) << k;
    }
  }
}

TEST(AssembleHV, FreeHamiltonian) {
  auto t = assemble_HV(Symbol4D::zero(1.5), 3, 4, Sign::plus);
  auto rep = eig_hermitian(t);
  ASSERT_EQ(rep.clusters.size(), 3u);
  for (int q = 0; q < 3; ++q) {
    EXPECT_DOUBLE_EQ(rep.clusters[q].first, 1.5 * (2 * q + 1));
    EXPECT_EQ(rep.clusters[q].second, 4);
  }
  for (int c : rep.gap_counts) EXPECT_EQ(c, 0);
}

TEST(AssembleHV, SingleGapEigenvalue) {
  for (double b : {1.0, 2.0}) {
    auto con = construct_gap_potential(b, {1}, {b}, {0.5});
    ASSERT_EQ(con.predicted.size(), 1u);
    EXPECT_DOUBLE_EQ(con.predicted[0].value, b / 2);
    auto rep = eig_hermitian(assemble_HV(con.V, 2, 6, Sign::minus));
    EXPECT_NEAR(rep.eigenvalues.front(), b / 2, 1e-8);
    EXPECT_EQ(rep.count_minus(0), 1);
  }
}

TEST(AssembleHV, PrescribedGapCounts) {
  auto con = construct_gap_potential(1.0, {2, 0, 1}, {0.8, 0.5, 0.3}, {0.5, 0.25});
  auto t = assemble_HV(con.V, 6, 8, Sign::minus);
  auto rep = eig_hermitian(t);
  EXPECT_EQ(rep.count_minus(0), 2);
  EXPECT_EQ(rep.count_minus(1), 0);
  EXPECT_EQ(rep.count_minus(2), 1);
  for (const auto& p : con.predicted) {
    double best = 1e300;
    for (double e : rep.eigenvalues) best = std::min(best, std::abs(e - p.value));
    EXPECT_LT(best, 1e-8);
  }
  // counts recomputed from the raw eigenvalues
  for (std::size_t i = 0; i < rep.windows.size(); ++i)
    EXPECT_EQ(rep.gap_counts[i],
              count_in_window(rep.eigenvalues, rep.windows[i].lo, rep.windows[i].hi, rep.levels, rep.exclusion));
  auto empty = construct_gap_potential(1.0, {0, 0, 0}, {0.8, 0.5, 0.3}, {});
  EXPECT_TRUE(empty.V.terms.empty());
  EXPECT_THROW(construct_gap_potential(1.0, {1, 1}, {0.8, 2.5}, {0.5}), std::invalid_argument);
  EXPECT_THROW(construct_gap_potential(1.0, {2}, {0.8}, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(construct_gap_potential(1.0, {1, 1}, {0.5, 0.8}, {0.5}), std::invalid_argument);
  EXPECT_NO_THROW(construct_gap_potential(1.0, {1}, {5.0}, {0.5}));
}

TEST(AssembleHV, SingleLevelBlockMatchesWeylMatrix) {
  // V_b = 2 pi Psi_{q0} (x) v with a non-radial v
  auto v = Symbol2D::generic([](double y, double eta) { return std::exp(-0.5 * (y * y + eta * eta)) * (1.0 + 0.3 * y); },
                             Symbol2D::Decay::schwartz);
  const int Q = 3, K = 6, q0 = 1;
  auto V = Symbol4D::make_separable(1.0, {{2 * oracle::pi, level_kernel_symbol(q0), v}});
  auto t = assemble_HV(V, Q, K, Sign::plus);
  auto w = weyl_matrix(v, K).entries;
  for (int q = 0; q < Q; ++q)
    for (int r = 0; r < Q; ++r)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
          cplx m = t.entries(q * K + k, r * K + l);
          if (q == r && k == l) m -= 2.0 * q + 1.0;
          if (q == q0 && r == q0) {
            const cplx ph = std::pow(cplx(0, 1), k - l);
            EXPECT_LT(std::abs(m - ph * w(k, l)), 1e-9);
          } else {
            EXPECT_LT(std::abs(m), 1e-9);
          }
        }
}

TEST(AssembleHV, PhaseInvarianceHermiticityAndScaling) {
  auto v = Symbol2D::generic([](double y, double eta) { return std::exp(-(y * y + eta * eta)) * (y + 2.0 * eta * eta); },
                             Symbol2D::Decay::schwartz);
  auto a = Symbol2D::radial(RadialProfile::make_gaussian(0.7));
  auto V = Symbol4D::make_separable(1.0, {{1.3, a, v}});
  auto with = assemble_HV(V, 3, 5, Sign::plus, true);
  auto without = assemble_HV(V, 3, 5, Sign::plus, false);
  const double h = (with.entries - with.entries.adjoint()).cwiseAbs().maxCoeff();
  EXPECT_LT(h, 1e-10 * with.entries.cwiseAbs().maxCoeff());
  auto e1 = eig_hermitian(with).eigenvalues, e2 = eig_hermitian(without).eigenvalues;
  for (std::size_t i = 0; i < e1.size(); ++i) EXPECT_NEAR(e1[i], e2[i], 1e-12);
  // scaling the coupling by t scales the shifts from the free levels
  auto V2 = Symbol4D::make_separable(1.0, {{2.6, a, v}});
  auto m1 = assemble_HV(V, 3, 5, Sign::plus).entries, m2 = assemble_HV(V2, 3, 5, Sign::plus).entries;
  for (int i = 0; i < 15; ++i) {
    m1(i, i) -= 2.0 * (i / 5) + 1.0;
    m2(i, i) -= 2.0 * (i / 5) + 1.0;
  }
  EXPECT_LT((m2 - 2.0 * m1).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(AssembleHV, GenericMatchesSeparable) {
  auto a = Symbol2D::radial(RadialProfile::make_gaussian(0.6));
  auto v = Symbol2D::generic([](double y, double eta) { return std::exp(-0.8 * (y * y + eta * eta)) * (1.0 + y * eta); },
                             Symbol2D::Decay::schwartz);
  auto sep = Symbol4D::make_separable(1.0, {{1.0, a, v}});
  auto gen = Symbol4D::make_generic(1.0, [sep](const Point4& p) { return sep.eval_lab(p); });
  auto ms = assemble_HV(sep, 2, 3, Sign::plus).entries;
  auto mg = assemble_HV(gen, 2, 3, Sign::plus).entries;
  EXPECT_LT((ms - mg).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_THROW(assemble_HV(gen, 7, 7, Sign::plus), std::invalid_argument);
}

TEST(EigHermitian, Basics) {
  TruncatedOperator t;
  t.entries = Eigen::MatrixXcd::Identity(5, 5);
  for (double e : eig_hermitian(t).eigenvalues) EXPECT_DOUBLE_EQ(e, 1.0);
  t.entries = Eigen::MatrixXcd::Zero(2, 2);
  t.entries(0, 1) = t.entries(1, 0) = 1.0;
  auto ev = eig_hermitian(t).eigenvalues;
  EXPECT_NEAR(ev[0], -1.0, 1e-15);
  EXPECT_NEAR(ev[1], 1.0, 1e-15);
  t.entries(0, 1) = 2.0;
  EXPECT_THROW(eig_hermitian(t), std::invalid_argument);
}

TEST(Banded, RadialAndAngularModes) {
  auto radial = banded_structure_check(Symbol2D::radial(RadialProfile::make_gaussian(0.5)), 16);
  EXPECT_LT(radial.max_outside, 1e-9 * radial.max_inside);
  auto g = [](double r) { return cplx(0.5 * r * std::exp(-r * r / 2), 0.0); };
  auto cos_mode = Symbol2D::angular_fourier(1, {g, [](double) { return cplx{}; }, g}, Symbol2D::Decay::schwartz);
  EXPECT_NEAR(cos_mode(0.7, 0.0), 0.7 * std::exp(-0.245), 1e-15);
  auto tri = banded_structure_check(cos_mode, 16);
  EXPECT_LT(tri.max_outside, 1e-9 * tri.max_inside);
  // exp(-s)(x + xi)^2 = r^2 e^{-r^2} (1 + sin 2t): modes 0 and +-2
  auto penta_sym = Symbol2D::generic(
      [](double x, double xi) { return std::exp(-(x * x + xi * xi)) * (x + xi) * (x + xi); }, Symbol2D::Decay::schwartz);
  auto penta = banded_structure_check(penta_sym, 16, 2);
  EXPECT_LT(penta.max_outside, 1e-9 * penta.max_inside);
  auto narrow = banded_structure_check(penta_sym, 16, 1);
  EXPECT_GT(narrow.max_outside, 1e-3 * narrow.max_inside);
}

TEST(Positivity, WeylAndAntiwick) {
  auto g1 = positivity_laguerre_weyl(RadialProfile::make_gaussian(1.0, 1.0 / oracle::pi), 20);
  EXPECT_TRUE(g1.all_nonneg);
  EXPECT_GT(g1.coefficients[0], 0.0);
  auto neg = positivity_laguerre_weyl(level_kernel_symbol(1, -2 * oracle::pi).profile, 10);
  EXPECT_FALSE(neg.all_nonneg);
  EXPECT_EQ(neg.first_negative, 1);
  EXPECT_NEAR(neg.coefficients[1], -2.0, 1e-12);
  auto conv = positivity_laguerre_weyl(antiwick_to_weyl(Symbol2D::radial(RadialProfile::make_disk(3.0))).profile, 30);
  EXPECT_TRUE(conv.all_nonneg);

  auto lin = positivity_laguerre_antiwick(RadialProfile::make_custom([](double s) { return 1.0 - s; }), 8);
  EXPECT_EQ(lin.first_negative, 0);
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(lin.coefficients[k], 1.0 - 2.0 * (k + 1), 1e-10);
  EXPECT_TRUE(positivity_laguerre_antiwick(RadialProfile::make_gaussian(1.0), 30).all_nonneg);
  EXPECT_TRUE(positivity_laguerre_antiwick(RadialProfile::make_disk(1.0), 30).all_nonneg);
}

TEST(HilbertSchmidt, Fixtures) {
  auto p = hilbert_schmidt_check(level_kernel_symbol(0, 2 * oracle::pi), 8);
  EXPECT_NEAR(p.matrix_norm_sq, 1.0, 1e-12);
  EXPECT_NEAR(p.symbol_norm_sq_scaled, 1.0, 1e-12);
  auto z = hilbert_schmidt_check(Symbol2D::radial(RadialProfile::make_gaussian(1.0, 0.0)), 4);
  EXPECT_EQ(z.matrix_norm_sq, 0.0);
  EXPECT_EQ(z.symbol_norm_sq_scaled, 0.0);
  auto g = hilbert_schmidt_check(Symbol2D::radial(RadialProfile::make_gaussian(0.5)), 64);
  EXPECT_NEAR(g.matrix_norm_sq, g.symbol_norm_sq_scaled, 1e-6);
  EXPECT_NEAR(g.symbol_norm_sq_scaled, 0.5, 1e-12);  // pi/(2a) / (2 pi)
  // truncations converge from below
  double prev = 0.0;
  for (int n : {2, 4, 8, 16}) {
    auto r = hilbert_schmidt_check(Symbol2D::radial(RadialProfile::make_gaussian(0.2)), n);
    EXPECT_GT(r.matrix_norm_sq, prev);
    EXPECT_LE(r.matrix_norm_sq, r.symbol_norm_sq_scaled + 1e-12);
    prev = r.matrix_norm_sq;
  }
}

TEST(Sandwich, GaussianFixture) {
  auto zeta = Symbol2D::radial(RadialProfile::make_gaussian(0.25));
  auto V = sandwich_fixture(zeta, 1.0, 0, 0);
  auto rep = birman_sandwich_check(V, zeta.profile, 0, 0, 0.2, 64, 5, 30);
  EXPECT_TRUE(rep.holds);
  EXPECT_LE(rep.k0, 2);
  EXPECT_LE(rep.eps, 0.2);
  // the cluster offsets are the Toeplitz eigenvalues (1 + 2a/b)^{-(k+1)}
  for (int k = 0; k <= 30; ++k) EXPECT_LT(rel_err(rep.cluster_offsets[k], std::pow(1.5, -(k + 1))), 1e-8) << k;
  auto minus = birman_sandwich_check(V, zeta.profile, 0, 0, 0.2, 64, 5, 30, 3, Sign::minus);
  EXPECT_TRUE(minus.holds);
  auto vac = birman_sandwich_check(Symbol4D::zero(1.0), zeta.profile, 0, 0, 0.2, 64, 5, 30);
  EXPECT_TRUE(vac.vacuous);
  EXPECT_THROW(birman_sandwich_check(V, zeta.profile, 0, 0, 0.2, 20, 5, 30), std::invalid_argument);
}
