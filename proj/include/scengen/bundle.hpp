#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scengen/config.hpp"
#include "scengen/model.hpp"

namespace scengen {

inline constexpr int kBundleVersion = 1;

struct FitDiagnostics {
  std::size_t n_used = 0;
  std::size_t dropped_rows = 0;
  int spatial_iterations = 0;
  int temporal_iterations = 0;
  bool spatial_converged = true;
  bool temporal_converged = true;
};

/// Persisted result of `fit`: config snapshot, fitted model, diagnostics.
struct ModelBundle {
  int version = kBundleVersion;
  RunConfig config;
  FittedModel model;
  FitDiagnostics diagnostics;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(r.size()) != cols) throw DataError("bundle: ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = r.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

inline nlohmann::json tail_to_json(const GpdTail& t) {
  return {{"threshold", t.threshold}, {"xi", t.xi}, {"beta", t.beta}, {"tail_prob", t.tail_prob}};
}

inline GpdTail tail_from_json(const nlohmann::json& j) {
  return {j.at("threshold").get<double>(), j.at("xi").get<double>(), j.at("beta").get<double>(),
          j.at("tail_prob").get<double>()};
}

inline nlohmann::json variables_to_json(const std::vector<Variable>& vars) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& v : vars) a.push_back({{"kind", to_string(v.kind)}, {"zone", v.zone}});
  return a;
}

inline std::vector<Variable> variables_from_json(const nlohmann::json& j) {
  std::vector<Variable> out;
  for (const auto& v : j) out.push_back({parse_kind(v.at("kind").get<std::string>()), v.at("zone").get<std::string>()});
  return out;
}

}  // namespace detail

/// Bundle layout (version 1). Matrices are arrays of rows. Per-series
/// arrays ("seasonal.series", "marginals") are indexed z * lags + lag in the
/// order of "variables"; each marginal also repeats its variable, zone, lag.
inline nlohmann::json bundle_to_json(const ModelBundle& b) {
  const auto& m = b.model;
  nlohmann::json j;
  j["format"] = "scengen-model-bundle";
  j["version"] = b.version;
  j["config"] = config_to_json(b.config);
  j["variables"] = detail::variables_to_json(m.variables);
  j["lags"] = m.lags;

  nlohmann::json series = nlohmann::json::array();
  for (const auto& s : m.seasonal.series) {
    std::vector<double> cs, ss;
    for (const auto& h : s.harmonics) {
      cs.push_back(h.cos_coef);
      ss.push_back(h.sin_coef);
    }
    series.push_back({{"intercept", s.intercept}, {"slope", s.slope}, {"cos", cs}, {"sin", ss}});
  }
  j["seasonal"] = {{"origin", format_iso8601(m.seasonal.origin)},
                   {"periods", m.seasonal.periods},
                   {"dropped_periods", m.seasonal.dropped_periods},
                   {"series", std::move(series)}};

  nlohmann::json marg = nlohmann::json::array();
  for (std::size_t k = 0; k < m.marginals.size(); ++k) {
    const auto& d = m.marginals[k];
    const auto& v = m.variables[k / m.lags];
    nlohmann::json e = {{"variable", to_string(v.kind)}, {"zone", v.zone}, {"lag", k % m.lags}};
    if (d.family() == Family::gaussian) {
      e["family"] = "gaussian";
      e["mean"] = d.mean();
      e["sd"] = d.sd();
    } else {
      e["family"] = "semiparametric";
      e["tail_mode"] = to_string(d.tail_mode());
      e["lower"] = detail::tail_to_json(d.lower());
      e["upper"] = detail::tail_to_json(d.upper());
      e["interior"] = d.interior();
    }
    marg.push_back(std::move(e));
  }
  j["marginals"] = std::move(marg);

  const auto& g = m.graphical;
  j["graphical"] = {{"scale", g.scale},
                    {"spatial_precision", detail::matrix_to_json(g.spatial_precision)},
                    {"spatial_cov", detail::matrix_to_json(g.spatial_cov)},
                    {"temporal_precision", detail::matrix_to_json(g.temporal_precision)},
                    {"temporal_cov", detail::matrix_to_json(g.temporal_cov)}};
  const auto& dg = b.diagnostics;
  j["diagnostics"] = {{"n_used", dg.n_used},
                      {"dropped_rows", dg.dropped_rows},
                      {"spatial_iterations", dg.spatial_iterations},
                      {"temporal_iterations", dg.temporal_iterations},
                      {"spatial_converged", dg.spatial_converged},
                      {"temporal_converged", dg.temporal_converged}};
  return j;
}

inline ModelBundle bundle_from_json(const nlohmann::json& j) {
  ModelBundle b;
  try {
    if (j.value("format", std::string{}) != "scengen-model-bundle") throw DataError("bundle: not a model bundle");
    b.version = j.at("version").get<int>();
    if (b.version != kBundleVersion) throw DataError("bundle: unsupported version " + std::to_string(b.version));
    b.config = config_from_json(j.at("config"));
    auto& m = b.model;
    m.variables = detail::variables_from_json(j.at("variables"));
    m.lags = j.at("lags").get<std::size_t>();

    const auto& s = j.at("seasonal");
    m.seasonal.variables = m.variables;
    m.seasonal.lags = m.lags;
    const auto origin = parse_iso8601(s.at("origin").get<std::string>());
    if (!origin) throw DataError("bundle: bad seasonal origin");
    m.seasonal.origin = *origin;
    m.seasonal.periods = s.at("periods").get<std::vector<double>>();
    m.seasonal.dropped_periods = s.at("dropped_periods").get<std::vector<double>>();
    for (const auto& e : s.at("series")) {
      SeasonalTerms t;
      t.intercept = e.at("intercept").get<double>();
      t.slope = e.at("slope").get<double>();
      const auto cs = e.at("cos").get<std::vector<double>>();
      const auto ss = e.at("sin").get<std::vector<double>>();
      if (cs.size() != m.seasonal.periods.size() || ss.size() != cs.size())
        throw DataError("bundle: harmonic count does not match the period list");
      for (std::size_t k = 0; k < cs.size(); ++k) t.harmonics.push_back({m.seasonal.periods[k], cs[k], ss[k]});
      m.seasonal.series.push_back(std::move(t));
    }

    for (const auto& e : j.at("marginals")) {
      if (e.at("family").get<std::string>() == "gaussian") {
        m.marginals.push_back(SemiParametricDist::gaussian(e.at("mean").get<double>(), e.at("sd").get<double>()));
      } else {
        m.marginals.push_back(SemiParametricDist::semiparametric(
            detail::tail_from_json(e.at("lower")), detail::tail_from_json(e.at("upper")),
            e.at("interior").get<std::vector<double>>(), parse_tail_mode(e.at("tail_mode").get<std::string>())));
      }
    }

    const auto& g = j.at("graphical");
    m.graphical.variables = m.variables;
    m.graphical.lags = m.lags;
    m.graphical.scale = g.at("scale").get<double>();
    m.graphical.spatial_precision = detail::matrix_from_json(g.at("spatial_precision"));
    m.graphical.spatial_cov = detail::matrix_from_json(g.at("spatial_cov"));
    m.graphical.temporal_precision = detail::matrix_from_json(g.at("temporal_precision"));
    m.graphical.temporal_cov = detail::matrix_from_json(g.at("temporal_cov"));

    const auto& dg = j.at("diagnostics");
    b.diagnostics.n_used = dg.at("n_used").get<std::size_t>();
    b.diagnostics.dropped_rows = dg.at("dropped_rows").get<std::size_t>();
    b.diagnostics.spatial_iterations = dg.at("spatial_iterations").get<int>();
    b.diagnostics.temporal_iterations = dg.at("temporal_iterations").get<int>();
    b.diagnostics.spatial_converged = dg.at("spatial_converged").get<bool>();
    b.diagnostics.temporal_converged = dg.at("temporal_converged").get<bool>();
    m.graphical.spatial_iterations = b.diagnostics.spatial_iterations;
    m.graphical.temporal_iterations = b.diagnostics.temporal_iterations;
    m.graphical.spatial_converged = b.diagnostics.spatial_converged;
    m.graphical.temporal_converged = b.diagnostics.temporal_converged;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bundle: ") + e.what());
  }
  b.model.check_consistency();
  return b;
}

inline void save_bundle(const ModelBundle& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write bundle '" + path + "'");
  out << bundle_to_json(b).dump(1) << '\n';
  if (!out) throw DataError("error writing bundle '" + path + "'");
}

inline ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open bundle '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bundle '" + path + "': " + e.what());
  }
  return bundle_from_json(j);
}

}  // namespace scengen
