#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scengen/bundle.hpp"
#include "scengen/config.hpp"
#include "scengen/gaussianize.hpp"
#include "scengen/gemini.hpp"
#include "scengen/ingest.hpp"
#include "scengen/seasonal.hpp"

namespace scengen {

/// Runs `fn`, prefixing any module error with the pipeline stage name.
template <class Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(stage) + ": " + e.what());
  }
}

struct InputData {
  std::map<Variable, ActualsSeries> actuals;
  std::map<Variable, ForecastPanel> forecasts;
};

/// Reads the actuals and forecast files of every variable kind in use and
/// keys the series by (kind, zone).
inline InputData load_inputs(const RunConfig& cfg) {
  return staged("ingest", [&] {
    InputData in;
    for (const auto kind : {VariableKind::load, VariableKind::wind}) {
      bool used = false;
      for (const auto& v : cfg.variables) used = used || v.kind == kind;
      if (!used) continue;
      const auto& src = *cfg.source(kind);
      for (auto& [zone, s] : load_actuals(cfg.resolve(src.actuals), cfg.columns))
        in.actuals.emplace(Variable{kind, zone}, std::move(s));
      for (auto& [zone, f] : load_forecasts(cfg.resolve(src.forecasts), cfg.columns, cfg.lags))
        in.forecasts.emplace(Variable{kind, zone}, std::move(f));
    }
    return in;
  });
}

/// Restricts a panel to issue times in [start, end).
template <class Tag>
Panel<Tag> window(const Panel<Tag>& p, std::optional<UtcTime> start, std::optional<UtcTime> end) {
  if (!start && !end) return p;
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < p.issue_times.size(); ++i)
    if ((!start || p.issue_times[i] >= *start) && (!end || p.issue_times[i] < *end))
      keep.push_back(static_cast<Eigen::Index>(i));
  Panel<Tag> out{p.variables, p.lags, {}, Eigen::MatrixXd(static_cast<Eigen::Index>(keep.size()), p.data.cols())};
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.issue_times.push_back(p.issue_times[static_cast<std::size_t>(keep[r])]);
    out.data.row(static_cast<Eigen::Index>(r)) = p.data.row(keep[r]);
  }
  return out;
}

inline DeviationBuild build_panel(const RunConfig& cfg, const InputData& in) {
  return staged("ingest", [&] {
    auto built = build_deviation_panel(in.actuals, in.forecasts, cfg.variables);
    const auto before = built.panel.rows();
    built.panel = window(built.panel, cfg.fit_start, cfg.fit_end);
    if (built.panel.rows() == 0) throw DataError("fit window contains no complete issue times");
    log::info("deviation panel: " + std::to_string(built.panel.rows()) + " issue times in window (of " +
              std::to_string(before) + "), " + std::to_string(built.dropped) + " incomplete dropped, width " +
              std::to_string(built.panel.width()));
    return built;
  });
}

/// Seasonal fit, marginals, copula transform and GEMINI on one panel.
inline FittedModel fit_model(const DeviationPanel& panel, const RunConfig& cfg) {
  FittedModel m;
  m.variables = panel.variables;
  m.lags = panel.lags;
  m.seasonal = staged("seasonal", [&] { return fit_seasonal(panel, cfg.periods); });
  const auto remainders = staged("seasonal", [&] { return remove_seasonal(panel, m.seasonal); });
  m.marginals = staged("tails", [&] { return fit_marginals(remainders, cfg.tails); });
  const auto scores = staged("gaussianize", [&] { return to_gaussian(remainders, m.marginals); });
  m.graphical = staged("glasso", [&] { return gemini(scores, cfg.glasso); });
  return m;
}

/// Full fit from configuration; the bundle stores the config with data
/// paths resolved to absolute form.
inline ModelBundle fit_bundle(const RunConfig& cfg) {
  const auto inputs = load_inputs(cfg);
  const auto built = build_panel(cfg, inputs);
  ModelBundle b;
  b.config = cfg;
  for (auto* src : {&b.config.load, &b.config.wind}) {
    if (!*src) continue;
    (*src)->actuals = std::filesystem::absolute(cfg.resolve((*src)->actuals)).lexically_normal().string();
    (*src)->forecasts = std::filesystem::absolute(cfg.resolve((*src)->forecasts)).lexically_normal().string();
  }
  b.config.base_dir.clear();
  b.model = fit_model(built.panel, cfg);
  b.diagnostics.n_used = built.panel.rows();
  b.diagnostics.dropped_rows = built.dropped;
  b.diagnostics.spatial_iterations = b.model.graphical.spatial_iterations;
  b.diagnostics.temporal_iterations = b.model.graphical.temporal_iterations;
  b.diagnostics.spatial_converged = b.model.graphical.spatial_converged;
  b.diagnostics.temporal_converged = b.model.graphical.temporal_converged;
  return b;
}

/// Forecast vector (z * lags + lag) issued at `issue`; DataError when absent.
inline Eigen::RowVectorXd forecast_vector(const InputData& in, const std::vector<Variable>& vars, std::size_t lags,
                                          UtcTime issue) {
  Eigen::RowVectorXd out(static_cast<Eigen::Index>(vars.size() * lags));
  for (std::size_t z = 0; z < vars.size(); ++z) {
    const auto it = in.forecasts.find(vars[z]);
    if (it == in.forecasts.end()) throw DataError("no forecasts for " + label(vars[z]));
    const auto row = it->second.row_of(issue);
    if (!row || !it->second.complete(*row))
      throw DataError("issue time " + format_iso8601(issue) + " has no complete forecast for " + label(vars[z]));
    for (std::size_t l = 0; l < lags; ++l)
      out(static_cast<Eigen::Index>(z * lags + l)) =
          it->second.values(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(l));
  }
  return out;
}

/// Realized values over the 24 h after `issue`, if all are present.
inline std::optional<Eigen::RowVectorXd> actual_vector(const InputData& in, const std::vector<Variable>& vars,
                                                       std::size_t lags, UtcTime issue) {
  Eigen::RowVectorXd out(static_cast<Eigen::Index>(vars.size() * lags));
  for (std::size_t z = 0; z < vars.size(); ++z) {
    const auto it = in.actuals.find(vars[z]);
    if (it == in.actuals.end()) return std::nullopt;
    for (std::size_t l = 0; l < lags; ++l) {
      const auto v = it->second.at(issue + Hours{static_cast<long>(l)});
      if (!v) return std::nullopt;
      out(static_cast<Eigen::Index>(z * lags + l)) = *v;
    }
  }
  return out;
}

}  // namespace scengen
