#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scengen/seasonal.hpp"

using namespace scengen;

namespace {

const UtcTime kStart = UtcTime{std::chrono::sys_days{std::chrono::year{2018} / 1 / 1}};

// Panel with `zones` load zones, `lags` lags, n issue times every `cadence`
// hours, filled by f(t_hours, column).
DeviationPanel make_panel(std::size_t zones, std::size_t lags, std::size_t n, int cadence,
                          const std::function<double(double, std::size_t)>& f) {
  DeviationPanel p;
  for (std::size_t z = 0; z < zones; ++z) p.variables.push_back({VariableKind::load, "Z" + std::to_string(z)});
  p.lags = lags;
  p.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(zones * lags));
  for (std::size_t i = 0; i < n; ++i) {
    p.issue_times.push_back(kStart + Hours{static_cast<long>(i) * cadence});
    for (std::size_t j = 0; j < zones * lags; ++j)
      p.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(static_cast<double>(i) * cadence, j);
  }
  return p;
}

double two_pi() { return 2.0 * std::numbers::pi; }

}  // namespace

TEST(FitSeasonal, ConstantInputHasZeroRemainder) {
  const auto p = make_panel(2, 3, 400, 1, [](double, std::size_t j) { return 5.0 + static_cast<double>(j); });
  const auto m = fit_seasonal(p, {24.0, 168.0});
  const auto r = remove_seasonal(p, m);
  EXPECT_LT(r.data.cwiseAbs().maxCoeff(), 1e-10);
  for (std::size_t j = 0; j < 6; ++j) {
    EXPECT_NEAR(m.series[j].intercept, 5.0 + static_cast<double>(j), 1e-10);
    EXPECT_NEAR(m.series[j].slope, 0.0, 1e-12);
  }
}

TEST(FitSeasonal, RecoversPureHarmonic) {
  const auto p = make_panel(1, 2, 500, 1, [](double t, std::size_t) {
    return 3.0 * std::cos(two_pi() * t / 24.0) - 2.0 * std::sin(two_pi() * t / 168.0);
  });
  const auto m = fit_seasonal(p, {24.0, 168.0});
  ASSERT_EQ(m.series[0].harmonics.size(), 2u);
  EXPECT_NEAR(m.series[0].harmonics[0].cos_coef, 3.0, 1e-9);
  EXPECT_NEAR(m.series[0].harmonics[0].sin_coef, 0.0, 1e-9);
  EXPECT_NEAR(m.series[0].harmonics[1].cos_coef, 0.0, 1e-9);
  EXPECT_NEAR(m.series[0].harmonics[1].sin_coef, -2.0, 1e-9);
  EXPECT_LT(remove_seasonal(p, m).data.cwiseAbs().maxCoeff(), 1e-9);
}

// The QR solution agrees with the normal equations, and the true slope sits
// inside three standard errors in nearly every replicate.
TEST(FitSeasonal, SlopeMatchesNormalEquationsAndIsUnbiased) {
  const double true_slope = 1e-3;
  const std::size_t n = 600;
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto noise = oracle::normal_sample(n, seed);
    const auto p = make_panel(1, 1, n, 1, [&](double t, std::size_t) {
      return 0.5 + true_slope * t + std::cos(two_pi() * t / 24.0) + noise[static_cast<std::size_t>(t)];
    });
    const auto m = fit_seasonal(p, {24.0});

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 4);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i);
      x.row(static_cast<Eigen::Index>(i)) << 1.0, t, std::cos(two_pi() * t / 24.0), std::sin(two_pi() * t / 24.0);
    }
    const Eigen::VectorXd y = p.data.col(0);
    const Eigen::VectorXd b = oracle::ols_normal_equations(x, y);
    EXPECT_NEAR(m.series[0].slope, b(1), 1e-9);
    EXPECT_NEAR(m.series[0].intercept, b(0), 1e-8);

    const Eigen::VectorXd resid = y - x * b;
    const double s2 = resid.squaredNorm() / static_cast<double>(n - 4);
    const double se = std::sqrt(s2 * (x.transpose() * x).inverse()(1, 1));
    if (std::fabs(m.series[0].slope - true_slope) <= 3.0 * se) ++inside;
  }
  EXPECT_GE(inside, 97);
}

TEST(FitSeasonal, RemainderOrthogonalToDesignAndRoundTrips) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> d(0.0, 50.0);
  const auto p = make_panel(3, 4, 1200, 1, [&](double t, std::size_t j) {
    return 10.0 * static_cast<double>(j) + 0.01 * t + 20.0 * std::sin(two_pi() * t / 168.0) + d(gen);
  });
  const auto m = fit_seasonal(p, {24.0, 168.0});
  const auto r = remove_seasonal(p, m);
  const auto back = restore_seasonal(r, m);
  EXPECT_LE((back.data - p.data).cwiseAbs().maxCoeff(), 1e-12 * p.data.cwiseAbs().maxCoeff());
  EXPECT_EQ(back.issue_times, p.issue_times);

  std::vector<double> t;
  for (std::size_t i = 0; i < p.rows(); ++i) t.push_back(static_cast<double>(i));
  const Eigen::MatrixXd x = detail::seasonal_design(t, m.periods, 1199.0);
  const Eigen::MatrixXd xtr = x.transpose() * r.data;
  EXPECT_LT(xtr.cwiseAbs().maxCoeff(), 1e-7 * p.data.cwiseAbs().maxCoeff() * 1200.0);
  EXPECT_LT(r.data.colwise().mean().cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FitSeasonal, DropsUnidentifiablePeriods) {
  const auto p = make_panel(1, 2, 100, 24, [](double t, std::size_t) { return std::cos(two_pi() * t / 168.0); });
  const auto m = fit_seasonal(p);
  EXPECT_EQ(m.periods, (std::vector<double>{168.0}));
  EXPECT_EQ(m.dropped_periods, (std::vector<double>{24.0, 8766.0}));
  EXPECT_EQ(m.parameter_count(), 4u);
}

TEST(FitSeasonal, Errors) {
  const auto p = make_panel(1, 1, 100, 1, [](double t, std::size_t) { return t; });
  EXPECT_THROW(fit_seasonal(p, {0.0}), DataError);
  EXPECT_THROW(fit_seasonal(p, {24.0, 24.0}), DataError);
  // 2 + 2*4 = 10 parameters need 100 rows; 99 is one short.
  const auto short_panel = make_panel(1, 1, 99, 1, [](double t, std::size_t) { return t; });
  EXPECT_THROW(fit_seasonal(short_panel, {6.0, 8.0, 12.0, 24.0}), DataError);
  EXPECT_NO_THROW(fit_seasonal(p, {6.0, 8.0, 12.0, 24.0}));

  const auto m = fit_seasonal(p, {24.0});
  auto other = p;
  other.variables[0].zone = "elsewhere";
  EXPECT_THROW(remove_seasonal(other, m), DataError);
}

TEST(FitSeasonal, ExtrapolatesBeyondFitWindow) {
  const auto truth = [](double t) { return 1.0 + 0.002 * t + 4.0 * std::sin(two_pi() * t / 168.0); };
  const auto p = make_panel(1, 1, 1000, 1, [&](double t, std::size_t) { return truth(t); });
  const auto m = fit_seasonal(p, {168.0});
  for (const long h : {1000L, 5000L, 20000L}) EXPECT_NEAR(m.at(kStart + Hours{h})(0), truth(static_cast<double>(h)), 1e-7);
  EXPECT_NEAR(m.at(kStart - Hours{500})(0), truth(-500.0), 1e-7);
}
