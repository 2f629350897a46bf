#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scengen/tails.hpp"

using namespace scengen;

TEST(GpdFit, RecoversExponential) {
  const auto y = oracle::gpd_sample(10000, 0.0, 1.0, 101);
  const auto f = gpd::fit_exceedances(y);
  ASSERT_TRUE(f);
  EXPECT_NEAR(f->xi, 0.0, 0.05);
  EXPECT_NEAR(f->beta, 1.0, 0.05);
  EXPECT_EQ(f->method, gpd::Method::mle);
}

TEST(GpdFit, RecoversHeavyShape) {
  const auto y = oracle::gpd_sample(10000, 0.3, 2.0, 202);
  const auto f = gpd::fit_exceedances(y);
  ASSERT_TRUE(f);
  EXPECT_NEAR(f->xi, 0.3, 0.05);
  EXPECT_NEAR(f->beta, 2.0, 0.1);
}

TEST(GpdFit, PwmIsCloseToMle) {
  const auto y = oracle::gpd_sample(10000, 0.2, 1.5, 303);
  const auto f = gpd::fit_exceedances(y, gpd::Method::pwm);
  ASSERT_TRUE(f);
  EXPECT_EQ(f->method, gpd::Method::pwm);
  EXPECT_NEAR(f->xi, 0.2, 0.07);
  EXPECT_NEAR(f->beta, 1.5, 0.1);
}

TEST(GpdFit, TooFewExceedances) {
  const auto y = oracle::gpd_sample(10, 0.0, 1.0, 1);
  EXPECT_FALSE(gpd::fit_exceedances(y));
  EXPECT_TRUE(gpd::fit_exceedances(y, gpd::Method::mle, 10));
}

// The returned point beats every point of a 50 x 50 grid.
TEST(GpdFit, LikelihoodDominatesGrid) {
  for (const auto& [xi, beta, seed] : {std::tuple{0.0, 1.0, 7u}, std::tuple{0.4, 3.0, 8u}, std::tuple{-0.3, 1.0, 9u}}) {
    const auto y = oracle::gpd_sample(2000, xi, beta, seed);
    const auto f = gpd::fit_exceedances(y);
    ASSERT_TRUE(f);
    const double best = oracle::gpd_loglik(y, f->xi, f->beta);
    EXPECT_NEAR(best, f->log_likelihood, 1e-6 * std::fabs(best));
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) {
        const double gx = -0.5 + 1.5 * i / 49.0;
        const double gb = f->beta / 3.0 + (3.0 * f->beta - f->beta / 3.0) * j / 49.0;
        EXPECT_LE(oracle::gpd_loglik(y, gx, gb), best + 1e-9 * std::fabs(best)) << gx << ' ' << gb;
      }
  }
}

TEST(GpdFunctions, SurvivalAndInverse) {
  EXPECT_DOUBLE_EQ(gpd::sf(1.0, 0.0, 1.0), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(gpd::sf(2.0, 0.5, 1.0), 0.25);
  EXPECT_EQ(gpd::sf(6.0, -0.2, 1.0), 0.0);
  EXPECT_EQ(gpd::endpoint(-0.2, 1.0), 5.0);
  for (const double s : {1e-10, 0.01, 0.5, 0.99})
    for (const double xi : {-0.4, 0.0, 0.3, 0.9}) EXPECT_NEAR(gpd::sf(gpd::isf(s, xi, 2.0), xi, 2.0), s, 1e-12 * s + 1e-15);
}

namespace {

SemiParametricDist hand_built(double xi_up, double beta_up, double xi_lo = 0.0, double beta_lo = 1.0) {
  std::vector<double> interior;
  for (int i = 1; i < 100; ++i) interior.push_back(-2.0 + 4.0 * i / 100.0);
  return SemiParametricDist::semiparametric({-2.0, xi_lo, beta_lo, 0.05}, {2.0, xi_up, beta_up, 0.05}, interior,
                                            TailMode::both);
}

std::vector<double> pareto_upper_sample(std::size_t n, double alpha, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = std::pow(1.0 - u(gen), -1.0 / alpha);
  return x;
}

}  // namespace

TEST(SemiParametric, NormalSampleHasLightTails) {
  const auto x = oracle::normal_sample(17520, 2024);
  const auto d = fit_semiparametric(x);
  EXPECT_EQ(d.tail_mode(), TailMode::both);
  // At a 95% threshold the normal tail still looks slightly bounded.
  EXPECT_LE(std::fabs(d.upper().xi), 0.2);
  EXPECT_LE(std::fabs(d.lower().xi), 0.2);
  EXPECT_LT(d.upper().xi + d.lower().xi, 0.0);
  EXPECT_NEAR(d.upper().tail_prob, 0.05, 1e-3);
  EXPECT_NEAR(d.lower().tail_prob, 0.05, 1e-3);
  EXPECT_TRUE(std::is_sorted(d.interior().begin(), d.interior().end()));
}

TEST(SemiParametric, ParetoUpperTail) {
  const auto x = pareto_upper_sample(17520, 2.5, 77);
  const auto d = fit_semiparametric(x);
  EXPECT_NEAR(d.upper().xi, 0.4, 0.1);
}

TEST(SemiParametric, DegenerateSamples) {
  const std::vector<double> constant(500, 3.0);
  EXPECT_THROW(fit_semiparametric(constant), DataError);
  const auto small = oracle::normal_sample(199, 1);
  EXPECT_THROW(fit_semiparametric(small), DataError);
  TailConfig bad;
  bad.threshold_quantile = 0.4;
  EXPECT_THROW(fit_semiparametric(oracle::normal_sample(500, 1), bad), DataError);
}

TEST(SemiParametric, CdfAnchorsAndClosedForm) {
  const auto d = hand_built(0.0, 1.0);
  EXPECT_NEAR(d.cdf(2.0), 0.95, 1e-15);
  EXPECT_NEAR(d.cdf(-2.0), 0.05, 1e-15);
  EXPECT_NEAR(d.cdf(3.0), 1.0 - 0.05 * std::exp(-1.0), 1e-14);
  EXPECT_NEAR(d.cdf(3.0), 0.98161, 1e-5);
  EXPECT_EQ(d.quantile(0.95), 2.0);
  EXPECT_EQ(d.quantile_sf(0.05), 2.0);
  EXPECT_EQ(d.quantile(0.05), -2.0);
  // Continuity at both thresholds.
  for (const double th : {-2.0, 2.0}) {
    EXPECT_LT(std::fabs(d.cdf(std::nextafter(th, -10.0)) - d.cdf(th)), 1e-12);
    EXPECT_LT(std::fabs(d.cdf(std::nextafter(th, 10.0)) - d.cdf(th)), 1e-12);
  }
  EXPECT_EQ(d.cdf(-1e300), kCdfClamp);
  EXPECT_EQ(d.cdf(1e300), 1.0 - kCdfClamp);
}

TEST(SemiParametric, CdfMonotoneOnRandomPairs) {
  const auto d = fit_semiparametric(oracle::student_t_sample(5000, 3.0, 5));
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 10000; ++i) {
    double a = u(gen), b = u(gen);
    if (a > b) std::swap(a, b);
    ASSERT_LE(d.cdf(a), d.cdf(b)) << a << ' ' << b;
    ASSERT_GE(d.sf(a), d.sf(b)) << a << ' ' << b;
  }
}

TEST(SemiParametric, QuantileInvertsCdf) {
  const auto d = fit_semiparametric(oracle::student_t_sample(5000, 3.0, 6));
  for (double x = -40.0; x <= 40.0; x += 0.37) {
    const bool tail = x < d.lower().threshold || x > d.upper().threshold;
    const double back = x > 0.0 ? d.quantile_sf(d.sf(x)) : d.quantile(d.cdf(x));
    EXPECT_NEAR(back, x, tail ? 1e-9 * std::max(1.0, std::fabs(x)) : 1e-9) << x;
  }
  for (const double u : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-9}) EXPECT_NEAR(d.cdf(d.quantile(u)), u, 1e-12);
}

TEST(SemiParametric, QuantileMatchesBisection) {
  const auto d = hand_built(0.3, 2.0);
  const double q = d.quantile(0.99);
  const double ref = oracle::bisect([&](double x) { return d.cdf(x); }, 0.99, 2.0, 100.0);
  EXPECT_NEAR(q, ref, 1e-8);
  // Closed form: u_th + beta/xi ((0.01/0.05)^-xi - 1)
  EXPECT_NEAR(q, 2.0 + 2.0 / 0.3 * (std::pow(0.2, -0.3) - 1.0), 1e-12);
}

TEST(SemiParametric, BoundedTailNeverPassesEndpoint) {
  const auto d = hand_built(-0.25, 1.0, -0.4, 2.0);
  const double upper_end = 2.0 + 1.0 / 0.25;
  const double lower_end = -2.0 - 2.0 / 0.4;
  for (const double s : {0.04, 1e-3, 1e-8, 1e-12, 1e-300}) {
    EXPECT_LE(d.quantile_sf(s), upper_end);
    EXPECT_GE(d.quantile(s), lower_end);
  }
  EXPECT_EQ(d.cdf(upper_end + 1.0), 1.0 - kCdfClamp);
}

TEST(SemiParametric, FallbackTailIsExponential) {
  // Exponential tails only: too few exceedances for a GPD on either side.
  TailConfig cfg;
  cfg.min_exceedances = 1000;
  const auto x = oracle::normal_sample(2000, 17);
  const auto d = fit_semiparametric(x, cfg);
  EXPECT_EQ(d.tail_mode(), TailMode::none);
  EXPECT_EQ(d.upper().xi, 0.0);
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  double excess = 0.0;
  int k = 0;
  for (const double v : sorted)
    if (v > d.upper().threshold) {
      excess += v - d.upper().threshold;
      ++k;
    }
  EXPECT_NEAR(d.upper().beta, excess / k, 1e-12);
}

TEST(SemiParametric, GaussianFamily) {
  TailConfig cfg;
  cfg.enabled = false;
  const auto x = oracle::normal_sample(1000, 3, 10.0, 2.0);
  const auto d = fit_semiparametric(x, cfg);
  EXPECT_EQ(d.family(), Family::gaussian);
  EXPECT_NEAR(d.mean(), 10.0, 0.2);
  EXPECT_NEAR(d.sd(), 2.0, 0.15);
  EXPECT_NEAR(d.quantile(0.975), d.mean() + 1.959963984540054 * d.sd(), 1e-9);
  EXPECT_NEAR(d.to_score(d.mean() + d.sd()), 1.0, 1e-9);
}

TEST(QqGaussian, NormalSampleHugsDiagonal) {
  const auto qq = qq_gaussian(oracle::normal_sample(10000, 55));
  ASSERT_EQ(qq.size(), 10000u);
  double worst = 0.0;
  for (std::size_t i = 100; i < 9900; ++i) worst = std::max(worst, std::fabs(qq[i].first - qq[i].second));
  EXPECT_LE(worst, 0.1);
  for (std::size_t i = 1; i < qq.size(); ++i) {
    EXPECT_LE(qq[i - 1].second, qq[i].second);
    EXPECT_LT(qq[i - 1].first, qq[i].first);
  }
  EXPECT_THROW(qq_gaussian(std::vector<double>{1.0}), DataError);
}

TEST(QqGaussian, StudentTUpperTailAboveNormal) {
  const auto t = qq_gaussian(oracle::student_t_sample(10000, 3.0, 66));
  const auto z = qq_gaussian(oracle::normal_sample(10000, 66));
  for (std::size_t i = 9950; i < 10000; ++i) {
    EXPECT_GT(t[i].second, t[i].first);
    EXPECT_GT(t[i].second, z[i].second);
  }
}
