#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scengen/csv.hpp"
#include "scengen/error.hpp"
#include "scengen/panel.hpp"
#include "scengen/time.hpp"

namespace scengen {

/// Column names and time convention of the input CSV files.
struct ColumnMapping {
  std::string timestamp = "timestamp";
  std::string zone = "zone";
  std::string value = "value";
  std::string issue_timestamp = "issue_timestamp";
  std::string lag = "lag";
  // Offset applied to timestamps that carry no explicit offset; 0 = already UTC.
  int utc_offset_hours = 0;
};

/// Hourly actuals of one zone, sorted by time.
struct ActualsSeries {
  std::string zone;
  std::vector<UtcTime> timestamps;
  std::vector<double> values;

  std::size_t size() const { return timestamps.size(); }

  std::optional<double> at(UtcTime t) const {
    const auto it = std::lower_bound(timestamps.begin(), timestamps.end(), t);
    if (it == timestamps.end() || *it != t) return std::nullopt;
    return values[static_cast<std::size_t>(it - timestamps.begin())];
  }

  /// Number of consecutive pairs more than one hour apart.
  std::size_t gap_count() const {
    std::size_t gaps = 0;
    for (std::size_t i = 1; i < timestamps.size(); ++i)
      if (timestamps[i] - timestamps[i - 1] != Hours{1}) ++gaps;
    return gaps;
  }
};

/// Rolling-horizon point forecasts of one zone: one row per issue time,
/// one column per lag. Missing cells are NaN.
struct ForecastPanel {
  std::string zone;
  std::size_t lags = kDefaultLags;
  std::vector<UtcTime> issue_times;
  Eigen::MatrixXd values;

  std::optional<std::size_t> row_of(UtcTime issue) const {
    const auto it = std::lower_bound(issue_times.begin(), issue_times.end(), issue);
    if (it == issue_times.end() || *it != issue) return std::nullopt;
    return static_cast<std::size_t>(it - issue_times.begin());
  }

  bool complete(std::size_t row) const {
    return values.row(static_cast<Eigen::Index>(row)).array().isFinite().all();
  }
};

inline bool is_missing(double v) { return std::isnan(v); }

inline std::map<std::string, ActualsSeries> load_actuals(std::istream& in, const std::string& source,
                                                         const ColumnMapping& schema = {}) {
  csv::Reader reader(in, source);
  const auto c_ts = reader.column(schema.timestamp);
  const auto c_zone = reader.column(schema.zone);
  const auto c_val = reader.column(schema.value);

  struct Row {
    UtcTime t;
    double v;
    std::size_t line;
  };
  std::map<std::string, std::vector<Row>> by_zone;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto t = parse_iso8601(f[c_ts], schema.utc_offset_hours);
    if (!t) throw DataError(reader.where() + ": unparseable timestamp '" + f[c_ts] + "'");
    double v = 0.0;
    if (!csv::parse_double(f[c_val], v) || !std::isfinite(v))
      throw DataError(reader.where() + ": non-numeric value '" + f[c_val] + "'");
    by_zone[f[c_zone]].push_back({*t, v, reader.line_number()});
  }

  std::map<std::string, ActualsSeries> out;
  for (auto& [zone, rows] : by_zone) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    ActualsSeries s;
    s.zone = zone;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].t == rows[i - 1].t) {
        const auto [first, second] = std::minmax(rows[i - 1].line, rows[i].line);
        throw DataError(source + " row " + std::to_string(second) + ": duplicate (timestamp, zone) = (" +
                        format_iso8601(rows[i].t) + ", " + zone + "), first seen at row " +
                        std::to_string(first));
      }
      s.timestamps.push_back(rows[i].t);
      s.values.push_back(rows[i].v);
    }
    out.emplace(zone, std::move(s));
  }
  return out;
}

inline std::map<std::string, ActualsSeries> load_actuals(const std::string& path, const ColumnMapping& schema = {}) {
  auto in = csv::open_input(path);
  return load_actuals(in, path, schema);
}

inline std::map<std::string, ForecastPanel> load_forecasts(std::istream& in, const std::string& source,
                                                           const ColumnMapping& schema = {},
                                                           std::size_t lags = kDefaultLags) {
  csv::Reader reader(in, source);
  const auto c_issue = reader.column(schema.issue_timestamp);
  const auto c_lag = reader.column(schema.lag);
  const auto c_zone = reader.column(schema.zone);
  const auto c_val = reader.column(schema.value);

  struct Cell {
    double v;
    std::size_t line;
  };
  // zone -> issue -> lag -> cell
  std::map<std::string, std::map<UtcTime, std::map<std::size_t, Cell>>> cells;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto t = parse_iso8601(f[c_issue], schema.utc_offset_hours);
    if (!t) throw DataError(reader.where() + ": unparseable issue timestamp '" + f[c_issue] + "'");
    long long lag = 0;
    if (!csv::parse_int(f[c_lag], lag))
      throw DataError(reader.where() + ": lag '" + f[c_lag] + "' is not a base-10 integer");
    if (lag < 0 || static_cast<std::size_t>(lag) >= lags)
      throw DataError(reader.where() + ": lag " + std::to_string(lag) + " outside 0.." + std::to_string(lags - 1));
    double v = 0.0;
    if (!csv::parse_double(f[c_val], v) || !std::isfinite(v))
      throw DataError(reader.where() + ": non-numeric value '" + f[c_val] + "'");
    auto& slot = cells[f[c_zone]][*t];
    const auto [it, inserted] = slot.emplace(static_cast<std::size_t>(lag), Cell{v, reader.line_number()});
    if (!inserted)
      throw DataError(reader.where() + ": duplicate (issue, lag, zone) = (" + format_iso8601(*t) + ", " +
                      std::to_string(lag) + ", " + f[c_zone] + "), first seen at row " +
                      std::to_string(it->second.line));
  }

  std::map<std::string, ForecastPanel> out;
  for (const auto& [zone, issues] : cells) {
    ForecastPanel p;
    p.zone = zone;
    p.lags = lags;
    p.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(issues.size()), static_cast<Eigen::Index>(lags),
                                         std::numeric_limits<double>::quiet_NaN());
    Eigen::Index row = 0;
    for (const auto& [issue, by_lag] : issues) {
      p.issue_times.push_back(issue);
      for (const auto& [lag, cell] : by_lag) p.values(row, static_cast<Eigen::Index>(lag)) = cell.v;
      ++row;
    }
    out.emplace(zone, std::move(p));
  }
  return out;
}

inline std::map<std::string, ForecastPanel> load_forecasts(const std::string& path, const ColumnMapping& schema = {},
                                                           std::size_t lags = kDefaultLags) {
  auto in = csv::open_input(path);
  return load_forecasts(in, path, schema, lags);
}

/// Deviation panel plus the count of candidate issue times that were
/// excluded because some actual or forecast cell was missing.
struct DeviationBuild {
  DeviationPanel panel;
  std::size_t dropped = 0;
};

/// data[t, z, l] = actual(issue_times[t] + l h) - forecast(issue_times[t], l).
/// Candidate issue times are the union over variables; any issue time with a
/// missing cell in any variable is dropped.
inline DeviationBuild build_deviation_panel(const std::map<Variable, ActualsSeries>& actuals,
                                            const std::map<Variable, ForecastPanel>& forecasts,
                                            const std::vector<Variable>& variables) {
  if (variables.empty()) throw DataError("empty variable list");
  std::set<Variable> seen;
  std::size_t lags = 0;
  for (const auto& v : variables) {
    if (!seen.insert(v).second) throw DataError("variable " + label(v) + " listed twice");
    if (!actuals.contains(v)) throw DataError("zone requested but absent from actuals: " + label(v));
    const auto it = forecasts.find(v);
    if (it == forecasts.end()) throw DataError("zone requested but absent from forecasts: " + label(v));
    if (lags == 0) lags = it->second.lags;
    if (it->second.lags != lags) throw DataError("forecast lag counts differ across variables");
  }

  std::set<UtcTime> candidates;
  for (const auto& v : variables)
    candidates.insert(forecasts.at(v).issue_times.begin(), forecasts.at(v).issue_times.end());

  DeviationBuild out;
  out.panel.variables = variables;
  out.panel.lags = lags;
  std::vector<double> buffer;
  const std::size_t width = variables.size() * lags;
  std::vector<double> row(width);
  for (const UtcTime issue : candidates) {
    bool complete = true;
    for (std::size_t z = 0; z < variables.size() && complete; ++z) {
      const auto& fc = forecasts.at(variables[z]);
      const auto& act = actuals.at(variables[z]);
      const auto r = fc.row_of(issue);
      if (!r) {
        complete = false;
        break;
      }
      for (std::size_t l = 0; l < lags; ++l) {
        const double f = fc.values(static_cast<Eigen::Index>(*r), static_cast<Eigen::Index>(l));
        const auto a = act.at(issue + Hours{static_cast<long>(l)});
        if (is_missing(f) || !a) {
          complete = false;
          break;
        }
        row[z * lags + l] = *a - f;
      }
    }
    if (!complete) {
      ++out.dropped;
      continue;
    }
    out.panel.issue_times.push_back(issue);
    buffer.insert(buffer.end(), row.begin(), row.end());
  }
  if (out.panel.issue_times.empty()) throw DataError("no issue time has complete actuals and forecasts for all variables");

  const auto n = static_cast<Eigen::Index>(out.panel.issue_times.size());
  out.panel.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      buffer.data(), n, static_cast<Eigen::Index>(width));
  return out;
}

}  // namespace scengen
