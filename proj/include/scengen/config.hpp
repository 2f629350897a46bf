#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scengen/error.hpp"
#include "scengen/gemini.hpp"
#include "scengen/ingest.hpp"
#include "scengen/seasonal.hpp"
#include "scengen/tails.hpp"

namespace scengen {

struct DataSource {
  std::string actuals;
  std::string forecasts;
};

struct SimulateDefaults {
  std::size_t scenarios = 1000;
  double trim = 0.05;
  std::uint64_t seed = 42;
};

/// Parsed run configuration. Relative data paths are resolved against
/// `base_dir` (the directory holding the config file).
struct RunConfig {
  std::optional<DataSource> load;
  std::optional<DataSource> wind;
  ColumnMapping columns;
  std::vector<Variable> variables;
  std::size_t lags = kDefaultLags;
  std::vector<double> periods = kDefaultPeriods;
  TailConfig tails;
  GeminiOptions glasso;
  SimulateDefaults simulate;
  std::optional<UtcTime> fit_start;  // inclusive
  std::optional<UtcTime> fit_end;    // exclusive
  std::string base_dir;

  std::string resolve(const std::string& path) const {
    if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(base_dir) / path).lexically_normal().string();
  }

  const std::optional<DataSource>& source(VariableKind k) const { return k == VariableKind::load ? load : wind; }

  void validate() const {
    if (variables.empty()) throw DataError("config: variable list is empty");
    std::set<Variable> seen;
    for (const auto& v : variables) {
      if (!seen.insert(v).second) throw DataError("config: variable " + label(v) + " listed twice");
      if (!source(v.kind)) throw DataError("config: no " + std::string(to_string(v.kind)) + " data files configured");
    }
    if (lags == 0) throw DataError("config: lags must be positive");
    if (!(glasso.lambda_spatial >= 0.0 && glasso.lambda_temporal >= 0.0))
      throw DataError("config: glasso penalties must be non-negative");
    if (!(glasso.tol > 0.0) || glasso.max_iter <= 0) throw DataError("config: glasso tol and max_iter must be positive");
    if (!(simulate.trim > 0.0 && simulate.trim < 0.5)) throw DataError("config: trim must lie in (0, 0.5)");
    if (!(tails.threshold_quantile > 0.5 && tails.threshold_quantile < 1.0))
      throw DataError("config: threshold_quantile must lie in (0.5, 1)");
  }
};

namespace detail {

inline UtcTime json_time(const nlohmann::json& j, const char* what) {
  const auto t = parse_iso8601(j.get<std::string>());
  if (!t) throw DataError(std::string("config: unparseable ") + what + " '" + j.get<std::string>() + "'");
  return *t;
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j, std::string base_dir = {}) {
  RunConfig c;
  c.base_dir = std::move(base_dir);
  try {
    if (j.contains("data")) {
      const auto& d = j.at("data");
      for (const char* kind : {"load", "wind"}) {
        if (!d.contains(kind)) continue;
        DataSource src{d.at(kind).at("actuals").get<std::string>(), d.at(kind).at("forecasts").get<std::string>()};
        (std::string(kind) == "load" ? c.load : c.wind) = src;
      }
      if (d.contains("columns")) {
        const auto& m = d.at("columns");
        c.columns.timestamp = m.value("timestamp", c.columns.timestamp);
        c.columns.zone = m.value("zone", c.columns.zone);
        c.columns.value = m.value("value", c.columns.value);
        c.columns.issue_timestamp = m.value("issue_timestamp", c.columns.issue_timestamp);
        c.columns.lag = m.value("lag", c.columns.lag);
      }
      c.columns.utc_offset_hours = d.value("utc_offset_hours", 0);
    }
    for (const auto& v : j.at("variables"))
      c.variables.push_back({parse_kind(v.at("kind").get<std::string>()), v.at("zone").get<std::string>()});
    c.lags = j.value("lags", kDefaultLags);
    if (j.contains("seasonal")) c.periods = j.at("seasonal").value("periods", kDefaultPeriods);
    if (j.contains("tails")) {
      const auto& t = j.at("tails");
      c.tails.threshold_quantile = t.value("threshold_quantile", c.tails.threshold_quantile);
      c.tails.min_exceedances = t.value("min_exceedances", c.tails.min_exceedances);
      c.tails.enabled = t.value("enabled", c.tails.enabled);
      const auto method = t.value("method", std::string("mle"));
      if (method != "mle" && method != "pwm") throw DataError("config: tails.method must be mle or pwm");
      c.tails.method = method == "pwm" ? gpd::Method::pwm : gpd::Method::mle;
    }
    if (j.contains("glasso")) {
      const auto& g = j.at("glasso");
      c.glasso.lambda_spatial = g.value("lambda_spatial", c.glasso.lambda_spatial);
      c.glasso.lambda_temporal = g.value("lambda_temporal", c.glasso.lambda_temporal);
      c.glasso.tol = g.value("tol", c.glasso.tol);
      c.glasso.max_iter = g.value("max_iter", c.glasso.max_iter);
    }
    if (j.contains("simulate")) {
      const auto& s = j.at("simulate");
      c.simulate.scenarios = s.value("scenarios", c.simulate.scenarios);
      c.simulate.trim = s.value("trim", c.simulate.trim);
      c.simulate.seed = s.value("seed", c.simulate.seed);
    }
    if (j.contains("fit_window")) {
      const auto& w = j.at("fit_window");
      if (w.contains("start")) c.fit_start = detail::json_time(w.at("start"), "fit_window.start");
      if (w.contains("end")) c.fit_end = detail::json_time(w.at("end"), "fit_window.end");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  nlohmann::json data;
  if (c.load) data["load"] = {{"actuals", c.load->actuals}, {"forecasts", c.load->forecasts}};
  if (c.wind) data["wind"] = {{"actuals", c.wind->actuals}, {"forecasts", c.wind->forecasts}};
  data["columns"] = {{"timestamp", c.columns.timestamp},
                     {"zone", c.columns.zone},
                     {"value", c.columns.value},
                     {"issue_timestamp", c.columns.issue_timestamp},
                     {"lag", c.columns.lag}};
  data["utc_offset_hours"] = c.columns.utc_offset_hours;
  j["data"] = std::move(data);
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : c.variables) vars.push_back({{"kind", to_string(v.kind)}, {"zone", v.zone}});
  j["variables"] = std::move(vars);
  j["lags"] = c.lags;
  j["seasonal"] = {{"periods", c.periods}};
  j["tails"] = {{"threshold_quantile", c.tails.threshold_quantile},
                {"min_exceedances", c.tails.min_exceedances},
                {"enabled", c.tails.enabled},
                {"method", c.tails.method == gpd::Method::pwm ? "pwm" : "mle"}};
  j["glasso"] = {{"lambda_spatial", c.glasso.lambda_spatial},
                 {"lambda_temporal", c.glasso.lambda_temporal},
                 {"tol", c.glasso.tol},
                 {"max_iter", c.glasso.max_iter}};
  j["simulate"] = {{"scenarios", c.simulate.scenarios}, {"trim", c.simulate.trim}, {"seed", c.simulate.seed}};
  if (c.fit_start || c.fit_end) {
    nlohmann::json w = nlohmann::json::object();
    if (c.fit_start) w["start"] = format_iso8601(*c.fit_start);
    if (c.fit_end) w["end"] = format_iso8601(*c.fit_end);
    j["fit_window"] = std::move(w);
  }
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("config '" + path + "': " + e.what());
  }
  return config_from_json(j, std::filesystem::absolute(path).parent_path().string());
}

}  // namespace scengen
