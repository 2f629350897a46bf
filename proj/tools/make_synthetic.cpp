// Writes the bundled synthetic dataset: two load zones and one wind zone,
// two years of daily (midnight UTC) 24-lag forecasts with heavy-tailed,
// spatially and temporally correlated deviations.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scengen/synthetic.hpp"

namespace fs = std::filesystem;
using namespace scengen;

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic load/wind dataset"};
  std::string out = "data/synthetic";
  std::uint64_t seed = 2018;
  std::size_t days = 730;
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--days", days, "number of daily issue times");
  CLI11_PARSE(app, argc, argv);

  synthetic::Spec spec;
  spec.variables = {{VariableKind::load, "North"}, {VariableKind::load, "South"}, {VariableKind::wind, "West"}};
  spec.marginals = {{300.0, 0.05, 0.3}, {250.0, 0.05, 0.25}, {150.0, 0.3, 0.0}};
  spec.spatial_corr.resize(3, 3);
  spec.spatial_corr << 1.0, 0.6, 0.1,  //
      0.6, 1.0, 0.1,                   //
      0.1, 0.1, 1.0;
  spec.temporal_rho = 0.8;
  spec.issues = days;
  spec.cadence_hours = 24;
  spec.weekly_amplitude = 0.3;
  spec.trend_per_hour = 1e-5;
  spec.seed = seed;
  const auto data = synthetic::generate(spec);

  fs::create_directories(out);
  const auto write = [&](const std::string& name, auto&& fn) {
    std::ofstream f(fs::path(out) / name);
    if (!f) {
      std::cerr << "cannot write " << (fs::path(out) / name).string() << '\n';
      std::exit(1);
    }
    fn(f);
  };
  write("load_actuals.csv", [&](std::ostream& f) { synthetic::write_actuals_csv(f, data, VariableKind::load); });
  write("load_forecasts.csv", [&](std::ostream& f) { synthetic::write_forecasts_csv(f, data, VariableKind::load); });
  write("wind_actuals.csv", [&](std::ostream& f) { synthetic::write_actuals_csv(f, data, VariableKind::wind); });
  write("wind_forecasts.csv", [&](std::ostream& f) { synthetic::write_forecasts_csv(f, data, VariableKind::wind); });
  std::cout << "wrote " << days << " issue times for " << spec.variables.size() << " variables to " << out << '\n';
  return 0;
}
