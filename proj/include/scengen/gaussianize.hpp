#pragma once

#include <string>
#include <vector>

#include "scengen/error.hpp"
#include "scengen/log.hpp"
#include "scengen/panel.hpp"
#include "scengen/tails.hpp"

namespace scengen {

/// One marginal per panel column (index z * lags + lag).
using Marginals = std::vector<SemiParametricDist>;

inline Marginals fit_marginals(const RemainderPanel& panel, const TailConfig& cfg = {}) {
  panel.check_shape();
  Marginals out;
  out.reserve(panel.width());
  std::vector<double> col(panel.rows());
  std::size_t fallback_sides = 0;
  for (std::size_t j = 0; j < panel.width(); ++j) {
    const auto c = panel.data.col(static_cast<Eigen::Index>(j));
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = c(static_cast<Eigen::Index>(i));
    try {
      out.push_back(fit_semiparametric(col, cfg));
    } catch (const DataError& e) {
      const auto z = j / panel.lags;
      throw DataError(label(panel.variables[z]) + " lag " + std::to_string(j % panel.lags) + ": " + e.what());
    }
    if (cfg.enabled) fallback_sides += !has_lower(out.back().tail_mode()) + !has_upper(out.back().tail_mode());
  }
  if (fallback_sides > 0)
    log::warn(std::to_string(fallback_sides) + " of " + std::to_string(2 * panel.width()) +
              " marginal tails use the exponential fallback instead of a fitted GPD");
  return out;
}

namespace detail {

inline void require_marginals(std::size_t width, const Marginals& dists) {
  if (dists.size() != width)
    throw DataError("expected " + std::to_string(width) + " marginals, got " + std::to_string(dists.size()));
}

}  // namespace detail

/// z = Phi^{-1}(F(x)) entrywise.
inline GaussianPanel to_gaussian(const RemainderPanel& panel, const Marginals& dists) {
  panel.check_shape();
  detail::require_marginals(panel.width(), dists);
  Eigen::MatrixXd z(panel.data.rows(), panel.data.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const auto& d = dists[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = d.to_score(panel.data(i, j));
  }
  return panel.retag<gaussian_tag>(std::move(z));
}

/// x = F^{-1}(Phi(z)) entrywise.
inline RemainderPanel from_gaussian(const GaussianPanel& panel, const Marginals& dists) {
  panel.check_shape();
  detail::require_marginals(panel.width(), dists);
  Eigen::MatrixXd x(panel.data.rows(), panel.data.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto& d = dists[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = d.from_score(panel.data(i, j));
  }
  return panel.retag<remainder_tag>(std::move(x));
}

}  // namespace scengen
