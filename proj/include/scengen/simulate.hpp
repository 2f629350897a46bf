#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scengen/error.hpp"
#include "scengen/gemini.hpp"
#include "scengen/model.hpp"
#include "scengen/rng.hpp"
#include "scengen/stats.hpp"

namespace scengen {

namespace detail {

inline Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + " factor is not positive definite");
  return llt.matrixL();
}

}  // namespace detail

/// M draws of the Z x L matrix-normal sqrt(scale) L_A G L_B', with
/// L_A L_A' = spatial_cov, L_B L_B' = temporal_cov and G filled row-major
/// from NormalStream(seed, m) for draw m. Row m of the result is the draw
/// flattened as z * L + lag; its covariance is scale * (A (x) B).
inline Eigen::MatrixXd sample_kronecker_gaussian(const GraphicalModel& model, std::size_t m, std::uint64_t seed) {
  const Eigen::MatrixXd la = detail::cholesky_factor(model.spatial_cov, "spatial");
  const Eigen::MatrixXd lb = detail::cholesky_factor(model.temporal_cov, "temporal");
  const Eigen::Index zones = la.rows();
  const Eigen::Index lags = lb.rows();
  const double root_scale = std::sqrt(model.scale);

  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), zones * lags);
  Eigen::MatrixXd g(zones, lags);
  for (std::size_t s = 0; s < m; ++s) {
    NormalStream rng(seed, s);
    for (Eigen::Index z = 0; z < zones; ++z)
      for (Eigen::Index l = 0; l < lags; ++l) g(z, l) = rng();
    const Eigen::MatrixXd x = root_scale * (la * g * lb.transpose());
    for (Eigen::Index z = 0; z < zones; ++z)
      for (Eigen::Index l = 0; l < lags; ++l) out(static_cast<Eigen::Index>(s), z * lags + l) = x(z, l);
  }
  return out;
}

/// M sampled 24-hour paths for every variable, in physical units.
struct ScenarioBatch {
  UtcTime issue_time{};
  std::vector<Variable> variables;
  std::size_t lags = kDefaultLags;
  Eigen::MatrixXd scenarios;    // M x (Z * L)
  Eigen::RowVectorXd forecast;  // Z * L
  std::uint64_t seed = 0;

  std::size_t size() const { return static_cast<std::size_t>(scenarios.rows()); }
};

/// Gaussian scores -> marginal quantiles -> + seasonal component at
/// issue_time -> + forecast.
inline ScenarioBatch scenarios(const FittedModel& model, const Eigen::RowVectorXd& forecast, UtcTime issue_time,
                               std::size_t m, std::uint64_t seed) {
  model.check_consistency();
  const auto width = static_cast<Eigen::Index>(model.variables.size() * model.lags);
  if (forecast.size() != width)
    throw DataError("forecast has " + std::to_string(forecast.size()) + " entries, model expects " +
                    std::to_string(width));
  ScenarioBatch batch;
  batch.issue_time = issue_time;
  batch.variables = model.variables;
  batch.lags = model.lags;
  batch.forecast = forecast;
  batch.seed = seed;
  batch.scenarios = sample_kronecker_gaussian(model.graphical, m, seed);
  const Eigen::RowVectorXd seasonal = model.seasonal.at(issue_time);
  for (Eigen::Index j = 0; j < width; ++j) {
    const auto& dist = model.marginals[static_cast<std::size_t>(j)];
    const double shift = seasonal(j) + forecast(j);
    for (Eigen::Index s = 0; s < batch.scenarios.rows(); ++s)
      batch.scenarios(s, j) = dist.from_score(batch.scenarios(s, j)) + shift;
  }
  return batch;
}

/// Per-coordinate interval left after trimming `trim` of the scenarios on each side.
struct ScenarioBand {
  std::vector<Variable> variables;
  std::size_t lags = kDefaultLags;
  double trim = 0.05;
  Eigen::RowVectorXd lower;
  Eigen::RowVectorXd upper;
};

inline ScenarioBand band(const ScenarioBatch& batch, double trim = 0.05) {
  if (!(trim >= 0.0 && trim < 0.5)) throw DataError("trim must lie in [0, 0.5)");
  const auto m = batch.scenarios.rows();
  if (m == 0 || (trim > 0.0 && static_cast<double>(m) < 1.0 / trim))
    throw DataError("band with trim " + std::to_string(trim) + " needs at least " +
                    std::to_string(trim > 0.0 ? static_cast<long>(std::ceil(1.0 / trim)) : 1L) + " scenarios, got " +
                    std::to_string(m));
  ScenarioBand b;
  b.variables = batch.variables;
  b.lags = batch.lags;
  b.trim = trim;
  b.lower.resize(batch.scenarios.cols());
  b.upper.resize(batch.scenarios.cols());
  std::vector<double> col(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < batch.scenarios.cols(); ++j) {
    for (Eigen::Index s = 0; s < m; ++s) col[static_cast<std::size_t>(s)] = batch.scenarios(s, j);
    std::sort(col.begin(), col.end());
    b.lower(j) = stats::quantile_sorted(col, trim);
    b.upper(j) = stats::quantile_sorted(col, 1.0 - trim);
  }
  return b;
}

struct CoverageReport {
  std::vector<bool> inside;  // per (z, lag)
  double fraction = 0.0;
};

inline CoverageReport coverage_report(const ScenarioBand& b, const Eigen::RowVectorXd& actuals) {
  if (actuals.size() != b.lower.size())
    throw DataError("actuals have " + std::to_string(actuals.size()) + " entries, band has " +
                    std::to_string(b.lower.size()));
  if (!actuals.allFinite()) throw DataError("missing actuals for coverage report");
  CoverageReport r;
  std::size_t hits = 0;
  for (Eigen::Index j = 0; j < actuals.size(); ++j) {
    const bool in = actuals(j) >= b.lower(j) && actuals(j) <= b.upper(j);
    r.inside.push_back(in);
    hits += in ? 1 : 0;
  }
  r.fraction = static_cast<double>(hits) / static_cast<double>(actuals.size());
  return r;
}

inline CoverageReport coverage_report(const ScenarioBatch& batch, const Eigen::RowVectorXd& actuals,
                                      double trim = 0.05) {
  return coverage_report(band(batch, trim), actuals);
}

namespace detail {

inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_scenarios_csv(std::ostream& os, const ScenarioBatch& batch) {
  os << "scenario_id,variable,zone,lag,value\n";
  for (Eigen::Index s = 0; s < batch.scenarios.rows(); ++s)
    for (std::size_t z = 0; z < batch.variables.size(); ++z)
      for (std::size_t l = 0; l < batch.lags; ++l)
        os << s << ',' << to_string(batch.variables[z].kind) << ',' << batch.variables[z].zone << ',' << l << ','
           << detail::format_value(batch.scenarios(s, static_cast<Eigen::Index>(z * batch.lags + l))) << '\n';
}

inline void write_band_csv(std::ostream& os, const ScenarioBand& b) {
  os << "variable,zone,lag,lower,upper\n";
  for (std::size_t z = 0; z < b.variables.size(); ++z)
    for (std::size_t l = 0; l < b.lags; ++l) {
      const auto j = static_cast<Eigen::Index>(z * b.lags + l);
      os << to_string(b.variables[z].kind) << ',' << b.variables[z].zone << ',' << l << ','
         << detail::format_value(b.lower(j)) << ',' << detail::format_value(b.upper(j)) << '\n';
    }
}

}  // namespace scengen
