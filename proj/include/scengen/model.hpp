#pragma once

#include <string>
#include <vector>

#include "scengen/gaussianize.hpp"
#include "scengen/gemini.hpp"
#include "scengen/panel.hpp"
#include "scengen/seasonal.hpp"

namespace scengen {

/// Everything needed to simulate: seasonal component, marginals and the
/// separable Gaussian dependence model, all on the same variable order.
struct FittedModel {
  std::vector<Variable> variables;
  std::size_t lags = kDefaultLags;
  SeasonalModel seasonal;
  Marginals marginals;
  GraphicalModel graphical;

  void check_consistency() const {
    if (seasonal.variables != variables || graphical.variables != variables)
      throw DataError("model parts disagree on the variable order");
    if (seasonal.lags != lags || graphical.lags != lags) throw DataError("model parts disagree on the lag count");
    const auto width = variables.size() * lags;
    if (marginals.size() != width || seasonal.series.size() != width)
      throw DataError("model parts disagree on the number of series");
    if (static_cast<std::size_t>(graphical.spatial_cov.rows()) != variables.size() ||
        static_cast<std::size_t>(graphical.temporal_cov.rows()) != lags)
      throw DataError("graphical model factor sizes do not match the variable list");
  }
};

}  // namespace scengen
