#pragma once

// Small on-disk datasets and a process runner for end-to-end tests.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "scengen/synthetic.hpp"

namespace fixture {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("scengen_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

inline scengen::synthetic::Spec small_spec(std::size_t load_zones, std::size_t wind_zones, std::size_t issues,
                                           std::uint64_t seed = 3) {
  using namespace scengen;
  synthetic::Spec spec;
  for (std::size_t z = 0; z < load_zones; ++z) {
    spec.variables.push_back({VariableKind::load, "L" + std::to_string(z)});
    spec.marginals.push_back({200.0 + 10.0 * static_cast<double>(z), 0.05, 0.3});
  }
  for (std::size_t z = 0; z < wind_zones; ++z) {
    spec.variables.push_back({VariableKind::wind, "W" + std::to_string(z)});
    spec.marginals.push_back({100.0, 0.3, 0.0});
  }
  const auto n = static_cast<Eigen::Index>(spec.variables.size());
  spec.spatial_corr = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && spec.variables[static_cast<std::size_t>(i)].kind == spec.variables[static_cast<std::size_t>(j)].kind)
        spec.spatial_corr(i, j) = 0.5;
  spec.temporal_rho = 0.7;
  spec.issues = issues;
  spec.weekly_amplitude = 0.2;
  spec.seed = seed;
  return spec;
}

/// Writes the four CSVs and a config.json; returns the config path.
inline fs::path write_dataset(const fs::path& dir, const scengen::synthetic::Spec& spec,
                              const nlohmann::json& overrides = nlohmann::json::object()) {
  using namespace scengen;
  const auto data = synthetic::generate(spec);
  bool has_load = false, has_wind = false;
  for (const auto& v : spec.variables) (v.kind == VariableKind::load ? has_load : has_wind) = true;
  nlohmann::json cfg;
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : spec.variables) vars.push_back({{"kind", to_string(v.kind)}, {"zone", v.zone}});
  cfg["variables"] = vars;
  for (const auto kind : {VariableKind::load, VariableKind::wind}) {
    if (!(kind == VariableKind::load ? has_load : has_wind)) continue;
    const std::string k(to_string(kind));
    std::ofstream a(dir / (k + "_actuals.csv"));
    synthetic::write_actuals_csv(a, data, kind);
    std::ofstream f(dir / (k + "_forecasts.csv"));
    synthetic::write_forecasts_csv(f, data, kind);
    cfg["data"][k] = {{"actuals", k + "_actuals.csv"}, {"forecasts", k + "_forecasts.csv"}};
  }
  cfg.merge_patch(overrides);
  const fs::path path = dir / "config.json";
  std::ofstream(path) << cfg.dump(2);
  return path;
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline RunResult run(const std::string& args) {
  RunResult r;
  const std::string cmd = std::string(SCENGEN_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace fixture
