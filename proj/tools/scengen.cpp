// scengen: fit / simulate / diagnose / graph front end.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scengen/scengen.hpp"

namespace fs = std::filesystem;
using namespace scengen;

namespace {

struct Options {
  std::string config;
  std::string bundle;
  std::string issue_time;
  std::optional<std::size_t> scenarios;
  std::optional<std::uint64_t> seed;
  std::optional<double> trim;
  double edge_threshold = 0.01;
  std::string tails;
  std::string out = ".";
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

UtcTime parse_issue_time(const std::string& s) {
  const auto t = parse_iso8601(s);
  if (!t) throw DataError("unparseable --issue-time '" + s + "'");
  return *t;
}

void apply_tails_flag(RunConfig& cfg, const std::string& flag) {
  if (flag.empty()) return;
  if (flag != "on" && flag != "off") throw DataError("--tails expects on or off");
  cfg.tails.enabled = flag == "on";
}

std::string fmt(double v, const char* f = "%.4g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void print_fit_summary(const ModelBundle& b) {
  const auto& m = b.model;
  std::cout << "variables: " << m.variables.size() << ", lags: " << m.lags
            << ", dimension: " << m.variables.size() * m.lags << "\n";
  std::cout << "issue times used: " << b.diagnostics.n_used << ", dropped (incomplete): " << b.diagnostics.dropped_rows
            << "\n";
  std::cout << "seasonal periods:";
  for (const double p : m.seasonal.periods) std::cout << ' ' << p;
  if (!m.seasonal.dropped_periods.empty()) {
    std::cout << " (dropped:";
    for (const double p : m.seasonal.dropped_periods) std::cout << ' ' << p;
    std::cout << ')';
  }
  std::cout << "\nmarginal tail shapes (lower xi / upper xi, mode):\n";
  for (std::size_t k = 0; k < m.marginals.size(); ++k) {
    const auto& d = m.marginals[k];
    std::cout << "  " << label(m.variables[k / m.lags]) << " lag " << k % m.lags << ": ";
    if (d.family() == Family::gaussian)
      std::cout << "gaussian mean " << fmt(d.mean()) << " sd " << fmt(d.sd()) << "\n";
    else
      std::cout << fmt(d.lower().xi) << " / " << fmt(d.upper().xi) << ", " << to_string(d.tail_mode()) << "\n";
  }
  const auto& g = m.graphical;
  const auto pairs = [](Eigen::Index p) { return p * (p - 1) / 2; };
  std::cout << "spatial factor: " << g.spatial_precision.rows() << "x" << g.spatial_precision.cols() << ", "
            << b.diagnostics.spatial_iterations << " glasso sweeps" << (b.diagnostics.spatial_converged ? "" : " (NOT converged)")
            << ", " << count_edges(g.spatial_precision) << "/" << pairs(g.spatial_precision.rows())
            << " nonzero off-diagonal pairs\n";
  std::cout << "temporal factor: " << g.temporal_precision.rows() << "x" << g.temporal_precision.cols() << ", "
            << b.diagnostics.temporal_iterations << " glasso sweeps" << (b.diagnostics.temporal_converged ? "" : " (NOT converged)")
            << ", " << count_edges(g.temporal_precision) << "/" << pairs(g.temporal_precision.rows())
            << " nonzero off-diagonal pairs\n";
  std::cout << "scale: " << fmt(g.scale, "%.6g") << "\n";
}

int cmd_fit(const Options& o) {
  if (o.config.empty()) throw DataError("fit requires --config");
  auto cfg = load_config(o.config);
  apply_tails_flag(cfg, o.tails);
  const auto bundle = fit_bundle(cfg);
  const fs::path path = o.bundle.empty() ? fs::path(o.out) / "bundle.json" : fs::path(o.bundle);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_bundle(bundle, path.string());
  print_fit_summary(bundle);
  std::cout << "bundle written to " << path.string() << "\n";
  return 0;
}

int cmd_simulate(const Options& o) {
  if (o.bundle.empty()) throw DataError("simulate requires --bundle");
  if (o.issue_time.empty()) throw DataError("simulate requires --issue-time");
  const auto b = load_bundle(o.bundle);
  RunConfig cfg = o.config.empty() ? b.config : load_config(o.config);
  const auto issue = parse_issue_time(o.issue_time);
  const std::size_t m = o.scenarios.value_or(b.config.simulate.scenarios);
  const std::uint64_t seed = o.seed.value_or(b.config.simulate.seed);
  const double trim = o.trim.value_or(b.config.simulate.trim);
  if (!(trim > 0.0 && trim < 0.5)) throw DataError("--trim must lie in (0, 0.5)");

  cfg.variables = b.model.variables;
  const auto inputs = load_inputs(cfg);
  const auto forecast = staged("simulate", [&] { return forecast_vector(inputs, b.model.variables, b.model.lags, issue); });
  const auto batch = staged("simulate", [&] { return scenarios(b.model, forecast, issue, m, seed); });

  fs::create_directories(o.out);
  {
    auto f = open_output(fs::path(o.out) / "scenarios.csv");
    write_scenarios_csv(f, batch);
  }
  const bool can_band = static_cast<double>(m) >= 1.0 / trim;
  if (can_band) {
    const auto bnd = band(batch, trim);
    auto f = open_output(fs::path(o.out) / "band.csv");
    write_band_csv(f, bnd);
    if (const auto actual = actual_vector(inputs, b.model.variables, b.model.lags, issue)) {
      const auto cov = coverage_report(bnd, *actual);
      std::cout << "coverage of realized values by the " << fmt(100.0 * (1.0 - 2.0 * trim), "%.0f")
                << "% band: " << fmt(cov.fraction) << "\n";
    }
  } else {
    log::warn("band not written: " + std::to_string(m) + " scenarios are too few for trim " + fmt(trim));
  }
  std::cout << m << " scenarios for " << format_iso8601(issue) << " written to " << o.out << "\n";
  return 0;
}

int cmd_diagnose(const Options& o) {
  RunConfig cfg;
  if (!o.bundle.empty()) cfg = load_bundle(o.bundle).config;
  else if (!o.config.empty()) cfg = load_config(o.config);
  else throw DataError("diagnose requires --config or --bundle");

  const auto inputs = load_inputs(cfg);
  const auto built = build_panel(cfg, inputs);
  auto heavy_cfg = cfg;
  heavy_cfg.tails.enabled = true;
  auto gauss_cfg = cfg;
  gauss_cfg.tails.enabled = false;
  const auto heavy = fit_model(built.panel, heavy_cfg);
  const auto gauss = fit_model(built.panel, gauss_cfg);

  const fs::path out = o.out;
  fs::create_directories(out / "qq");
  const auto remainders = remove_seasonal(built.panel, heavy.seasonal);
  std::vector<double> col(remainders.rows());
  for (std::size_t z = 0; z < remainders.zones(); ++z)
    for (std::size_t l = 0; l < remainders.lags; ++l) {
      const auto c = remainders.data.col(static_cast<Eigen::Index>(remainders.column(z, l)));
      for (std::size_t i = 0; i < col.size(); ++i) col[i] = c(static_cast<Eigen::Index>(i));
      const auto& v = remainders.variables[z];
      char name[256];
      std::snprintf(name, sizeof name, "qq_%s_%s_lag%02zu.csv", std::string(to_string(v.kind)).c_str(), v.zone.c_str(), l);
      auto f = open_output(out / "qq" / name);
      f << "theoretical,empirical\n";
      for (const auto& [th, em] : qq_gaussian(col)) f << detail::format_value(th) << ',' << detail::format_value(em) << '\n';
    }

  const UtcTime issue = o.issue_time.empty() ? built.panel.issue_times.back() : parse_issue_time(o.issue_time);
  const std::size_t m = o.scenarios.value_or(cfg.simulate.scenarios);
  const std::uint64_t seed = o.seed.value_or(cfg.simulate.seed);
  const double trim = o.trim.value_or(cfg.simulate.trim);
  const auto forecast = staged("simulate", [&] { return forecast_vector(inputs, cfg.variables, cfg.lags, issue); });
  const auto heavy_band = band(scenarios(heavy, forecast, issue, m, seed), trim);
  const auto gauss_band = band(scenarios(gauss, forecast, issue, m, seed), trim);
  {
    auto f = open_output(out / "band_heavy.csv");
    write_band_csv(f, heavy_band);
  }
  {
    auto f = open_output(out / "band_gaussian.csv");
    write_band_csv(f, gauss_band);
  }
  std::cout << "diagnostics for " << format_iso8601(issue) << " (" << m << " scenarios, seed " << seed << ")\n";
  if (const auto actual = actual_vector(inputs, cfg.variables, cfg.lags, issue)) {
    const auto ch = coverage_report(heavy_band, *actual);
    const auto cg = coverage_report(gauss_band, *actual);
    auto f = open_output(out / "coverage.csv");
    f << "variable,zone,lag,actual,heavy_lower,heavy_upper,heavy_inside,gaussian_lower,gaussian_upper,gaussian_inside\n";
    for (std::size_t z = 0; z < cfg.variables.size(); ++z)
      for (std::size_t l = 0; l < cfg.lags; ++l) {
        const auto j = static_cast<Eigen::Index>(z * cfg.lags + l);
        f << to_string(cfg.variables[z].kind) << ',' << cfg.variables[z].zone << ',' << l << ','
          << detail::format_value((*actual)(j)) << ',' << detail::format_value(heavy_band.lower(j)) << ','
          << detail::format_value(heavy_band.upper(j)) << ',' << (ch.inside[static_cast<std::size_t>(j)] ? 1 : 0) << ','
          << detail::format_value(gauss_band.lower(j)) << ',' << detail::format_value(gauss_band.upper(j)) << ','
          << (cg.inside[static_cast<std::size_t>(j)] ? 1 : 0) << '\n';
      }
    std::cout << "coverage heavy-tail: " << fmt(ch.fraction) << ", gaussian: " << fmt(cg.fraction) << "\n";
  } else {
    std::cout << "no realized values for this issue time; coverage skipped\n";
  }
  std::cout << "outputs written to " << out.string() << "\n";
  return 0;
}

int cmd_graph(const Options& o) {
  if (o.bundle.empty()) throw DataError("graph requires --bundle");
  const auto b = load_bundle(o.bundle);
  const auto& g = b.model.graphical;
  std::vector<std::string> spatial_labels, temporal_labels;
  for (const auto& v : b.model.variables) spatial_labels.push_back(label(v));
  for (std::size_t l = 0; l < b.model.lags; ++l) temporal_labels.push_back("lag" + std::to_string(l));

  const fs::path out = o.out;
  fs::create_directories(out);
  const auto emit = [&](const char* name, const Eigen::MatrixXd& theta, std::vector<std::string> labels) {
    const auto graph = dependency_graph(theta, std::move(labels), o.edge_threshold);
    {
      auto f = open_output(out / (std::string(name) + ".dot"));
      write_dot(f, graph, name);
    }
    {
      auto f = open_output(out / (std::string(name) + ".json"));
      f << to_json(graph).dump(2) << '\n';
    }
    std::cout << name << ": " << graph.nodes.size() << " nodes, " << graph.edges.size() << " edges, "
              << component_count(graph) << " connected components\n";
  };
  emit("spatial", g.spatial_precision, spatial_labels);
  emit("temporal", g.temporal_precision, temporal_labels);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario generation for load and wind forecast deviations"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "fit a model bundle from data");
  fit->add_option("--config", o.config, "run configuration (JSON)")->required();
  fit->add_option("--bundle", o.bundle, "bundle output path (default <out>/bundle.json)");
  fit->add_option("--tails", o.tails, "heavy-tail marginals: on|off");
  fit->add_option("--out", o.out, "output directory");

  auto* sim = app.add_subcommand("simulate", "draw scenarios for one issue time");
  sim->add_option("--bundle", o.bundle, "fitted model bundle")->required();
  sim->add_option("--config", o.config, "override the data paths stored in the bundle");
  sim->add_option("--issue-time", o.issue_time, "forecast issue time (ISO-8601)")->required();
  sim->add_option("--scenarios", o.scenarios, "number of scenarios");
  sim->add_option("--seed", o.seed, "random seed");
  sim->add_option("--trim", o.trim, "band trim fraction per side");
  sim->add_option("--out", o.out, "output directory");

  auto* diag = app.add_subcommand("diagnose", "Q-Q data and heavy-tail vs Gaussian bands");
  diag->add_option("--config", o.config, "run configuration (JSON)");
  diag->add_option("--bundle", o.bundle, "take the configuration from a bundle");
  diag->add_option("--issue-time", o.issue_time, "issue time for the band comparison (default: last fitted)");
  diag->add_option("--scenarios", o.scenarios, "number of scenarios");
  diag->add_option("--seed", o.seed, "random seed");
  diag->add_option("--trim", o.trim, "band trim fraction per side");
  diag->add_option("--tails", o.tails, "accepted for symmetry; both modes are always run");
  diag->add_option("--out", o.out, "output directory");

  auto* graph = app.add_subcommand("graph", "export dependency graphs");
  graph->add_option("--bundle", o.bundle, "fitted model bundle")->required();
  graph->add_option("--edge-threshold", o.edge_threshold, "minimum |partial correlation| for an edge");
  graph->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit->parsed()) return cmd_fit(o);
    if (sim->parsed()) return cmd_simulate(o);
    if (diag->parsed()) return cmd_diagnose(o);
    if (graph->parsed()) return cmd_graph(o);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
