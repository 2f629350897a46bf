#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scengen/error.hpp"
#include "scengen/log.hpp"
#include "scengen/panel.hpp"

namespace scengen {

inline const std::vector<double> kDefaultPeriods{24.0, 168.0, 8766.0};

struct Harmonic {
  double period = 0.0;  // hours
  double cos_coef = 0.0;
  double sin_coef = 0.0;
};

/// intercept + slope * t + sum_k [a_k cos(2 pi t / P_k) + b_k sin(2 pi t / P_k)],
/// t in hours since the model origin.
struct SeasonalTerms {
  double intercept = 0.0;
  double slope = 0.0;
  std::vector<Harmonic> harmonics;

  double operator()(double t) const {
    double v = intercept + slope * t;
    for (const auto& h : harmonics) {
      const double w = 2.0 * std::numbers::pi * t / h.period;
      v += h.cos_coef * std::cos(w) + h.sin_coef * std::sin(w);
    }
    return v;
  }
};

struct SeasonalModel {
  std::vector<Variable> variables;
  std::size_t lags = kDefaultLags;
  UtcTime origin{};
  std::vector<double> periods;          // retained
  std::vector<double> dropped_periods;  // requested but not identifiable from the data
  std::vector<SeasonalTerms> series;    // index z * lags + lag

  std::size_t parameter_count() const { return 2 + 2 * periods.size(); }

  /// Deterministic component for every (z, lag) at one issue time; extrapolates freely.
  Eigen::RowVectorXd at(UtcTime issue) const {
    const double t = hours_between(origin, issue);
    Eigen::RowVectorXd out(static_cast<Eigen::Index>(series.size()));
    for (std::size_t j = 0; j < series.size(); ++j) out(static_cast<Eigen::Index>(j)) = series[j](t);
    return out;
  }
};

namespace detail {

inline Eigen::MatrixXd seasonal_design(const std::vector<double>& t, const std::vector<double>& periods,
                                       double t_scale) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(2 + 2 * periods.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = t[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = ti / t_scale;
    for (std::size_t k = 0; k < periods.size(); ++k) {
      const double w = 2.0 * std::numbers::pi * ti / periods[k];
      x(i, static_cast<Eigen::Index>(2 + 2 * k)) = std::cos(w);
      x(i, static_cast<Eigen::Index>(3 + 2 * k)) = std::sin(w);
    }
  }
  return x;
}

inline Eigen::Index design_rank(const Eigen::MatrixXd& x) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-9);
  return qr.rank();
}

}  // namespace detail

/// Per-(zone, lag) OLS fit of trend and harmonics. Periods that the data
/// cannot identify (longer than the observed span, or collinear with the
/// columns already in the design, e.g. a 24 h harmonic sampled once a day)
/// are dropped with a warning and recorded in `dropped_periods`.
inline SeasonalModel fit_seasonal(const DeviationPanel& panel, const std::vector<double>& periods = kDefaultPeriods) {
  panel.check_shape();
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (!(periods[i] > 0.0)) throw DataError("seasonal periods must be strictly positive");
    for (std::size_t j = 0; j < i; ++j)
      if (periods[i] == periods[j]) throw DataError("seasonal periods must be distinct");
  }

  SeasonalModel model;
  model.variables = panel.variables;
  model.lags = panel.lags;
  const std::size_t n = panel.rows();
  if (n == 0) throw DataError("cannot fit seasonal model on an empty panel");
  model.origin = panel.issue_times.front();

  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = hours_between(model.origin, panel.issue_times[i]);
  const double span = t.back() - t.front();
  const double t_scale = span > 0.0 ? span : 1.0;

  std::vector<double> kept;
  for (const double p : periods) {
    if (p > span) {
      model.dropped_periods.push_back(p);
      std::ostringstream msg;
      msg << "seasonal period " << p << " h exceeds the observed span of " << span << " h; dropped";
      log::warn(msg.str());
      continue;
    }
    auto trial = kept;
    trial.push_back(p);
    const auto x = detail::seasonal_design(t, trial, t_scale);
    if (detail::design_rank(x) < x.cols()) {
      model.dropped_periods.push_back(p);
      std::ostringstream msg;
      msg << "seasonal period " << p << " h is not identifiable at this sampling cadence; dropped";
      log::warn(msg.str());
      continue;
    }
    kept = std::move(trial);
  }
  model.periods = kept;

  if (n < 10 * model.parameter_count())
    throw DataError("seasonal fit needs at least " + std::to_string(10 * model.parameter_count()) +
                    " observations, panel has " + std::to_string(n));

  const auto x = detail::seasonal_design(t, kept, t_scale);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-9);
  if (qr.rank() < x.cols()) throw NumericalError("rank-deficient seasonal design");
  const Eigen::MatrixXd coef = qr.solve(panel.data);

  model.series.resize(panel.width());
  for (std::size_t j = 0; j < panel.width(); ++j) {
    const auto c = coef.col(static_cast<Eigen::Index>(j));
    auto& s = model.series[j];
    s.intercept = c(0);
    s.slope = c(1) / t_scale;
    for (std::size_t k = 0; k < kept.size(); ++k)
      s.harmonics.push_back({kept[k], c(static_cast<Eigen::Index>(2 + 2 * k)), c(static_cast<Eigen::Index>(3 + 2 * k))});
  }
  return model;
}

namespace detail {

template <class Tag>
Eigen::MatrixXd seasonal_matrix(const Panel<Tag>& panel, const SeasonalModel& model) {
  if (panel.variables != model.variables || panel.lags != model.lags)
    throw DataError("seasonal model was fitted on a different variable list");
  Eigen::MatrixXd fitted(panel.data.rows(), panel.data.cols());
  for (std::size_t i = 0; i < panel.rows(); ++i) fitted.row(static_cast<Eigen::Index>(i)) = model.at(panel.issue_times[i]);
  return fitted;
}

}  // namespace detail

inline RemainderPanel remove_seasonal(const DeviationPanel& panel, const SeasonalModel& model) {
  panel.check_shape();
  return panel.retag<remainder_tag>(panel.data - detail::seasonal_matrix(panel, model));
}

inline DeviationPanel restore_seasonal(const RemainderPanel& panel, const SeasonalModel& model) {
  panel.check_shape();
  return panel.retag<deviation_tag>(panel.data + detail::seasonal_matrix(panel, model));
}

}  // namespace scengen
