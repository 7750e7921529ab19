#include <gtest/gtest.h>

#include <cmath>

#include "landau/asymptotics.hpp"
#include "oracles/oracles.hpp"

using namespace landau;

TEST(PredictCompact, Examples) {
  for (double k : {2.0, 10.0, 300.0}) {
    EXPECT_NEAR(predict_compact(k, 2.0, 1.0), -k * std::log(k) + k, 1e-12 * k * std::log(k));
    EXPECT_NEAR(predict_compact(k, 1.3, 1.4) - predict_compact(k, 1.3, 0.7), k * std::log(4.0), 1e-12 * k);
  }
  EXPECT_NEAR(predict_compact(std::exp(1.0), 2.0, 1.0), 0.0, 1e-15);
  EXPECT_THROW(predict_compact(3.0, 0.0, 1.0), std::invalid_argument);
}

TEST(CoeffsF, FirstCoefficientIsMu) {
  for (double beta : {0.2, 0.5, 0.6, 0.75, 0.8})
    for (double mu : {0.1, 1.0, 3.0}) {
      auto f = small_beta_coefficients(beta, mu);
      ASSERT_FALSE(f.empty());
      EXPECT_NEAR(f[0], mu, 1e-8 * std::max(1.0, mu)) << beta << " " << mu;
    }
}

TEST(CoeffsF, IndexRangeAndHigherOrders) {
  EXPECT_EQ(small_beta_coefficients(0.5, 1.0).size(), 1u);
  EXPECT_EQ(small_beta_coefficients(2.0 / 3.0, 1.0).size(), 2u);
  EXPECT_EQ(small_beta_coefficients(0.75, 1.0).size(), 3u);
  EXPECT_EQ(small_beta_coefficients(0.3, 1.0).size(), 1u);
  // implicit differentiation: f2 = -(beta mu)^2 / 2, f3 = (beta mu)^3 (3 beta - 1) / 6
  for (double mu : {0.5, 1.0, 2.0}) {
    const double beta = 0.75, bm = beta * mu;
    auto f = small_beta_coefficients(beta, mu);
    EXPECT_NEAR(f[1], -bm * bm / 2.0, 1e-8 * std::max(1.0, bm * bm));
    EXPECT_NEAR(f[2], bm * bm * bm * (3 * beta - 1) / 6.0, 1e-7 * std::max(1.0, bm * bm * bm));
  }
  EXPECT_DOUBLE_EQ(implicit_root_small_beta(0.0, 0.4, 2.0), 1.0);
  EXPECT_THROW(small_beta_coefficients(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(small_beta_coefficients(0.5, -1.0), std::invalid_argument);
}

TEST(CoeffsG, EnvelopeIdentity) {
  EXPECT_EQ(large_beta_coefficients(2.0, 1.0).size(), 1u);
  EXPECT_NEAR(large_beta_coefficients(2.0, 1.0)[0], 1.0 / std::sqrt(2.0), 1e-8);
  for (double beta : {1.2, 1.5, 2.0, 3.0})
    for (double mu : {0.2, 1.0, 4.0}) {
      const double s0 = std::pow(beta * mu, -1.0 / beta);
      EXPECT_LT(std::abs(large_beta_coefficients(beta, mu)[0] - s0) / s0, 1e-8) << beta << " " << mu;
      EXPECT_NEAR(beta * mu * std::pow(implicit_root_large_beta(0.0, beta, mu), beta), 1.0, 1e-14);
    }
  // g2 = s'(0)/2 = -s0^2 / (2 beta)
  const double beta = 1.5, mu = 0.8, s0 = std::pow(beta * mu, -1.0 / beta);
  auto g = large_beta_coefficients(beta, mu);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_NEAR(g[1], -s0 * s0 / (2 * beta), 1e-8);
  EXPECT_EQ(large_beta_coefficients(4.0 / 3.0, 1.0).size(), 3u);
  EXPECT_THROW(large_beta_coefficients(1.0, 1.0), std::invalid_argument);
}

TEST(Coeffs, StableUnderGridRefinement) {
  auto f = [](double eps) {
    const double d = detail::offset_small_beta(eps, 0.75, 1.3);
    return (d - std::log1p(d)) + eps * 1.3 * std::pow(1.0 + d, 0.75);
  };
  auto coarse = detail::taylor_coefficients(f, 3, 1e-2), fine = detail::taylor_coefficients(f, 3, 5e-3);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(coarse[j], fine[j], 1e-8);
  auto g = [](double eps) {
    const double d = detail::offset_large_beta(eps, 4.0 / 3.0, 0.9);
    const double s0 = std::pow(1.2, -0.75);
    return std::expm1(4.0 / 3.0 * std::log1p(d)) * 0.75 - std::log1p(d) + eps * s0 * (1.0 + d);
  };
  auto gc = detail::taylor_coefficients(g, 3, 1e-2), gf = detail::taylor_coefficients(g, 3, 5e-3);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(gc[j], gf[j], 1e-8);
}

TEST(PredictExp, Branches) {
  for (double k : {2.0, 17.0, 400.0}) {
    EXPECT_NEAR(predict_exp(k, 1.0, 1.0), -k * std::log(2.0), 1e-12 * k);
    EXPECT_NEAR(predict_exp(k, 0.5, 1.7), -1.7 * std::sqrt(k), 1e-8 * std::sqrt(k));
    const double g1 = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(predict_exp(k, 2.0, 1.0), -0.5 * k * std::log(k) + (1 - std::log(2.0)) / 2 * k - g1 * std::sqrt(k),
                1e-8 * k * std::log(k));
  }
  EXPECT_THROW(predict_exp(5.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(predict_exp(5.0, -1.0, 1.0), std::invalid_argument);
}

TEST(PredictCounting, PowerProfile) {
  auto v = Symbol2D::radial(RadialProfile::make_power(2.0));
  EXPECT_NEAR(predict_counting(1e-2, v), 49.5, 1e-6);
  EXPECT_EQ(predict_counting(1.0, v), 0.0);
  EXPECT_EQ(predict_counting(2.0, v), 0.0);
  double prev = 1e300;
  for (double lam = 1e-3; lam < 1.0; lam *= 1.7) {
    const double c = predict_counting(lam, v);
    EXPECT_LT(c, prev);
    prev = c;
  }
  EXPECT_THROW(predict_counting(0.0, v), std::invalid_argument);
}

TEST(Model, KindSelection) {
  EXPECT_EQ(AsymptoticModel::exp_weight(1.0, 0.5, 2.0).kind, AsymptoticModel::Kind::exp_small_beta);
  EXPECT_EQ(AsymptoticModel::exp_weight(1.0, 1.0, 2.0).kind, AsymptoticModel::Kind::exp_beta_one);
  auto m = AsymptoticModel::exp_weight(1.0, 2.0, 2.0);
  EXPECT_EQ(m.kind, AsymptoticModel::Kind::exp_large_beta);
  EXPECT_DOUBLE_EQ(m.mu, 1.0);
  EXPECT_DOUBLE_EQ(AsymptoticModel::exp_weight(3.0, 0.5, 1.0).mu, 3.0 * std::sqrt(2.0));
  EXPECT_NEAR(m(50.0), predict_exp(50.0, 2.0, 1.0), 1e-12);
}

TEST(CompareSeries, ExactExponentialSpectrum) {
  const double mu = 0.7;
  std::vector<LogReal> eigs;
  for (int k = 0; k <= 400; ++k) eigs.push_back({-(k + 1) * std::log1p(mu), 1});
  auto model = AsymptoticModel::exp_weight(0.7, 1.0, 2.0);
  ASSERT_DOUBLE_EQ(model.mu, mu);
  double prev = 1e300;
  for (int lo : {25, 50, 100, 200}) {
    auto r = compare_series(eigs, model, lo, 2 * lo);
    for (double res : r.residuals) EXPECT_NEAR(res, -std::log1p(mu), 1e-12);
    EXPECT_LT(r.max_abs_over_ln_k, prev);
    prev = r.max_abs_over_ln_k;
  }
}

TEST(CompareSeries, ZeroResidualAndErrors) {
  auto model = AsymptoticModel::compact(2.0, 0.8);
  std::vector<double> eigs{1.0, 1.0};
  for (int k = 2; k <= 30; ++k) eigs.push_back(std::exp(model(k)));
  auto r = compare_series(eigs, model, 2, 30);
  for (double res : r.residuals) EXPECT_NEAR(res, 0.0, 1e-12);
  EXPECT_LT(r.max_abs_over_k, 1e-12);
  eigs[10] = -1.0;
  EXPECT_THROW(compare_series(eigs, model, 2, 30), std::domain_error);
  EXPECT_THROW(compare_series(eigs, model, 2, 31), std::invalid_argument);
  EXPECT_THROW(compare_series(eigs, model, 1, 5), std::invalid_argument);
}

TEST(CompareSeries, DiskWeightApproachesCompactLaw) {
  // disk of radius 1 at b = 2: nu_k = P(k + 1, 1)
  std::vector<LogReal> eigs;
  for (int k = 0; k <= 400; ++k) eigs.push_back({oracle::log_incomplete_gamma_p(k + 1.0, 1.0), 1});
  auto model = AsymptoticModel::compact(2.0, 1.0);
  double prev = 1e300;
  for (int lo : {25, 50, 100, 200}) {
    const double stat = compare_series(eigs, model, lo, 2 * lo).max_abs_over_k;
    EXPECT_LT(stat, prev) << lo;
    prev = stat;
  }
  EXPECT_LT(prev, 0.15);
}
