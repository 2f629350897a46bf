#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scengen/gaussianize.hpp"

using namespace scengen;

namespace {

// Two-column remainder panel: a skewed heavy-tailed series and a Student-t.
RemainderPanel heavy_panel(std::size_t n, std::uint64_t seed) {
  RemainderPanel p;
  p.variables = {{VariableKind::wind, "W"}};
  p.lags = 2;
  const auto t = oracle::student_t_sample(n, 3.0, seed);
  const auto g = oracle::gpd_sample(n, 0.35, 1.0, seed + 1);
  const auto z = oracle::normal_sample(n, seed + 2);
  p.data.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    // Lower tail heavy: mostly normal, with a GPD excursion below.
    p.data(static_cast<Eigen::Index>(i), 0) = i % 10 == 0 ? -1.5 - g[i] : z[i];
    p.data(static_cast<Eigen::Index>(i), 1) = t[i];
    p.issue_times.push_back(UtcTime{} + Hours{static_cast<long>(i)});
  }
  return p;
}

}  // namespace

TEST(Gaussianize, MedianMapsToZeroAndBack) {
  const auto p = heavy_panel(5000, 1);
  const auto m = fit_marginals(p);
  for (const auto& d : m) {
    EXPECT_NEAR(d.to_score(d.median()), 0.0, 1e-9);
    EXPECT_NEAR(d.from_score(0.0), d.median(), 1e-12);
    EXPECT_NEAR(d.from_score(normal::quantile(1.0 - d.upper().tail_prob)), d.upper().threshold,
                1e-9 * std::max(1.0, std::fabs(d.upper().threshold)));
  }
}

TEST(Gaussianize, RoundTripAndKolmogorovSmirnov) {
  const auto p = heavy_panel(17520, 2);
  const auto m = fit_marginals(p);
  const auto g = to_gaussian(p, m);
  const auto back = from_gaussian(g, m);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const auto& d = m[static_cast<std::size_t>(j)];
    std::vector<double> scores(static_cast<std::size_t>(g.data.rows()));
    for (Eigen::Index i = 0; i < g.data.rows(); ++i) {
      const double x = p.data(i, j);
      const bool tail = x < d.lower().threshold || x > d.upper().threshold;
      ASSERT_NEAR(back.data(i, j), x, tail ? 1e-9 * std::max(1.0, std::fabs(x)) : 1e-6) << i << ' ' << j;
      scores[static_cast<std::size_t>(i)] = g.data(i, j);
    }
    EXPECT_LT(oracle::ks_statistic_normal(scores), oracle::ks_critical_001(scores.size())) << "column " << j;
  }
}

TEST(Gaussianize, MonotoneAndRankPreserving) {
  const auto p = heavy_panel(3000, 3);
  const auto m = fit_marginals(p);
  const auto g = to_gaussian(p, m);
  for (Eigen::Index j = 0; j < 2; ++j) {
    std::vector<std::size_t> by_x(3000), by_z(3000);
    std::iota(by_x.begin(), by_x.end(), 0);
    std::iota(by_z.begin(), by_z.end(), 0);
    std::stable_sort(by_x.begin(), by_x.end(), [&](auto a, auto b) { return p.data(Eigen::Index(a), j) < p.data(Eigen::Index(b), j); });
    std::stable_sort(by_z.begin(), by_z.end(), [&](auto a, auto b) { return g.data(Eigen::Index(a), j) < g.data(Eigen::Index(b), j); });
    EXPECT_EQ(by_x, by_z);
  }
  const auto& d = m[0];
  double prev = d.from_score(-8.0);
  for (double z = -8.0; z <= 8.0; z += 0.01) {
    const double x = d.from_score(z);
    ASSERT_LE(prev, x) << z;
    prev = x;
  }
}

TEST(Gaussianize, UniformScoresHaveUniformMoments) {
  const auto p = heavy_panel(17520, 4);
  const auto g = to_gaussian(p, fit_marginals(p));
  for (Eigen::Index j = 0; j < 2; ++j) {
    double mean = 0.0, var = 0.0;
    for (Eigen::Index i = 0; i < g.data.rows(); ++i) mean += oracle::phi_cdf(g.data(i, j));
    mean /= static_cast<double>(g.data.rows());
    for (Eigen::Index i = 0; i < g.data.rows(); ++i) var += std::pow(oracle::phi_cdf(g.data(i, j)) - mean, 2);
    var /= static_cast<double>(g.data.rows() - 1);
    EXPECT_NEAR(mean, 0.5, 0.01);
    EXPECT_NEAR(var, 1.0 / 12.0, 0.002);
  }
}

TEST(Gaussianize, ScoresAreClamped) {
  const auto p = heavy_panel(1000, 5);
  const auto m = fit_marginals(p);
  auto extreme = p;
  extreme.data(0, 0) = -1e12;
  extreme.data(1, 1) = 1e12;
  const auto g = to_gaussian(extreme, m);
  EXPECT_TRUE(g.data.allFinite());
  const double zmax = normal::quantile_upper(kCdfClamp);
  EXPECT_NEAR(zmax, 7.034, 1e-3);
  EXPECT_NEAR(g.data(0, 0), -zmax, 1e-12);
  EXPECT_NEAR(g.data(1, 1), zmax, 1e-12);
}

TEST(Gaussianize, ShapeMismatch) {
  const auto p = heavy_panel(1000, 6);
  auto m = fit_marginals(p);
  m.pop_back();
  EXPECT_THROW(to_gaussian(p, m), DataError);
  auto g = to_gaussian(p, fit_marginals(p));
  g.data.conservativeResize(Eigen::NoChange, 1);
  EXPECT_THROW(from_gaussian(g, fit_marginals(p)), DataError);
}

TEST(Gaussianize, FitErrorsNameTheSeries) {
  auto p = heavy_panel(1000, 7);
  p.data.col(1).setConstant(2.0);
  try {
    fit_marginals(p);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("wind:W lag 1"), std::string::npos) << e.what();
  }
}
