#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scengen/ingest.hpp"
#include "scengen/normal.hpp"
#include "scengen/rng.hpp"

namespace scengen::synthetic {

/// Marginal law of a synthetic deviation: N(0, sigma^2) between its 5% and
/// 95% quantiles, GPD tails beyond with the given shapes. Tail scales are
/// matched so the density is continuous at both splice points.
struct MarginalShape {
  double sigma = 1.0;
  double xi_lower = 0.0;
  double xi_upper = 0.0;

  static constexpr double kTail = 0.05;

  double quantile(double u) const {
    const double z0 = normal::quantile_upper(kTail);
    const double beta = kTail * sigma / normal::pdf(z0);
    const auto excess = [&](double s, double xi) {
      return std::fabs(xi) < 1e-12 ? -beta * std::log(s) : beta / xi * (std::pow(s, -xi) - 1.0);
    };
    if (u > 1.0 - kTail) return sigma * z0 + excess((1.0 - u) / kTail, xi_upper);
    if (u < kTail) return -sigma * z0 - excess(u / kTail, xi_lower);
    return sigma * normal::quantile(u);
  }

  /// Quantile from a standard-normal score without losing tail precision.
  double from_score(double z) const {
    return z > 0.0 ? quantile_sf(normal::sf(z)) : quantile(normal::cdf(z));
  }

  double quantile_sf(double s) const {
    if (s < kTail) {
      const double z0 = normal::quantile_upper(kTail);
      const double beta = kTail * sigma / normal::pdf(z0);
      const double t = s / kTail;
      return sigma * z0 + (std::fabs(xi_upper) < 1e-12 ? -beta * std::log(t) : beta / xi_upper * (std::pow(t, -xi_upper) - 1.0));
    }
    return quantile(1.0 - s);
  }
};

struct Spec {
  std::vector<Variable> variables;
  std::vector<MarginalShape> marginals;  // one per variable
  Eigen::MatrixXd spatial_corr;          // Z x Z
  double temporal_rho = 0.7;             // AR(1) correlation across lags
  std::size_t lags = kDefaultLags;
  std::size_t issues = 730;
  int cadence_hours = 24;
  UtcTime start = UtcTime{std::chrono::sys_days{std::chrono::year{2018} / 1 / 1}};
  double weekly_amplitude = 0.0;  // deviation seasonality, in units of sigma
  double trend_per_hour = 0.0;    // deviation trend, in units of sigma
  std::uint64_t seed = 7;
};

struct Data {
  std::map<Variable, ActualsSeries> actuals;
  std::map<Variable, ForecastPanel> forecasts;
  Eigen::MatrixXd scores;      // issues x (Z * L) latent Gaussian scores
  Eigen::MatrixXd deviations;  // issues x (Z * L)
};

inline Eigen::MatrixXd ar1_correlation(std::size_t lags, double rho) {
  Eigen::MatrixXd b(static_cast<Eigen::Index>(lags), static_cast<Eigen::Index>(lags));
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = std::pow(rho, std::abs(static_cast<double>(i - j)));
  return b;
}

/// Physical level of a variable at hour index h (diurnal shape plus offset).
inline double level(const Variable& v, std::size_t z, double h) {
  const double diurnal = std::sin(2.0 * std::numbers::pi * h / 24.0);
  return v.kind == VariableKind::load ? 10000.0 + 1000.0 * z + 2500.0 * diurnal : 1500.0 + 200.0 * z - 400.0 * diurnal;
}

/// Draws deviations from a separable Gaussian copula with the given
/// marginals, then builds actuals (a deterministic level curve) and
/// forecasts = actual - deviation for every (issue, lag).
inline Data generate(const Spec& spec) {
  const auto zones = static_cast<Eigen::Index>(spec.variables.size());
  const auto lags = static_cast<Eigen::Index>(spec.lags);
  const Eigen::MatrixXd la = Eigen::LLT<Eigen::MatrixXd>(spec.spatial_corr).matrixL();
  const Eigen::MatrixXd lb = Eigen::LLT<Eigen::MatrixXd>(ar1_correlation(spec.lags, spec.temporal_rho)).matrixL();

  Data out;
  const auto n = static_cast<Eigen::Index>(spec.issues);
  out.scores.resize(n, zones * lags);
  out.deviations.resize(n, zones * lags);
  Eigen::MatrixXd g(zones, lags);
  for (Eigen::Index t = 0; t < n; ++t) {
    NormalStream rng(spec.seed, static_cast<std::uint64_t>(t));
    for (Eigen::Index z = 0; z < zones; ++z)
      for (Eigen::Index l = 0; l < lags; ++l) g(z, l) = rng();
    const Eigen::MatrixXd x = la * g * lb.transpose();
    const double hours = static_cast<double>(t * spec.cadence_hours);
    for (Eigen::Index z = 0; z < zones; ++z) {
      const auto& shape = spec.marginals[static_cast<std::size_t>(z)];
      const double seasonal = shape.sigma * (spec.weekly_amplitude * std::cos(2.0 * std::numbers::pi * hours / 168.0) +
                                             spec.trend_per_hour * hours);
      for (Eigen::Index l = 0; l < lags; ++l) {
        out.scores(t, z * lags + l) = x(z, l);
        out.deviations(t, z * lags + l) = seasonal + shape.from_score(x(z, l));
      }
    }
  }

  const std::size_t total_hours = (spec.issues - 1) * static_cast<std::size_t>(spec.cadence_hours) + spec.lags;
  for (std::size_t z = 0; z < spec.variables.size(); ++z) {
    const auto& v = spec.variables[z];
    ActualsSeries a;
    a.zone = v.zone;
    for (std::size_t h = 0; h < total_hours; ++h) {
      a.timestamps.push_back(spec.start + Hours{static_cast<long>(h)});
      a.values.push_back(level(v, z, static_cast<double>(h)));
    }
    ForecastPanel f;
    f.zone = v.zone;
    f.lags = spec.lags;
    f.values.resize(n, lags);
    for (Eigen::Index t = 0; t < n; ++t) {
      const auto issue_hour = static_cast<std::size_t>(t * spec.cadence_hours);
      f.issue_times.push_back(spec.start + Hours{static_cast<long>(issue_hour)});
      for (Eigen::Index l = 0; l < lags; ++l)
        f.values(t, l) = a.values[issue_hour + static_cast<std::size_t>(l)] -
                         out.deviations(t, static_cast<Eigen::Index>(z) * lags + l);
    }
    out.actuals.emplace(v, std::move(a));
    out.forecasts.emplace(v, std::move(f));
  }
  return out;
}

inline void write_actuals_csv(std::ostream& os, const Data& d, VariableKind kind) {
  char buf[40];
  os << "timestamp,zone,value\n";
  for (const auto& [v, s] : d.actuals) {
    if (v.kind != kind) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.6f", s.values[i]);
      os << format_iso8601(s.timestamps[i]) << ',' << v.zone << ',' << buf << '\n';
    }
  }
}

inline void write_forecasts_csv(std::ostream& os, const Data& d, VariableKind kind) {
  char buf[40];
  os << "issue_timestamp,lag,zone,value\n";
  for (const auto& [v, f] : d.forecasts) {
    if (v.kind != kind) continue;
    for (std::size_t t = 0; t < f.issue_times.size(); ++t)
      for (std::size_t l = 0; l < f.lags; ++l) {
        std::snprintf(buf, sizeof buf, "%.6f", f.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(l)));
        os << format_iso8601(f.issue_times[t]) << ',' << l << ',' << v.zone << ',' << buf << '\n';
      }
  }
}

}  // namespace scengen::synthetic
