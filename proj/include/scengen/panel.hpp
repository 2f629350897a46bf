#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "scengen/error.hpp"
#include "scengen/time.hpp"

namespace scengen {

enum class VariableKind { load, wind };

inline std::string_view to_string(VariableKind k) { return k == VariableKind::load ? "load" : "wind"; }

inline VariableKind parse_kind(std::string_view s) {
  if (s == "load") return VariableKind::load;
  if (s == "wind") return VariableKind::wind;
  throw DataError("unknown variable kind '" + std::string(s) + "' (expected load or wind)");
}

/// One modelled quantity: a (kind, zone) pair such as (load, North).
struct Variable {
  VariableKind kind = VariableKind::load;
  std::string zone;

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

inline std::string label(const Variable& v) { return std::string(to_string(v.kind)) + ":" + v.zone; }

inline constexpr std::size_t kDefaultLags = 24;

struct deviation_tag {};
struct remainder_tag {};
struct gaussian_tag {};

/// n issue times x (Z variables x L lags). Row t holds the flattened Z x L
/// matrix for issue_times[t]; column index is z * lags + lag.
///
/// The tag keeps deviations, deseasonalized remainders and Gaussian scores
/// from being mixed up at call sites; the layout is identical.
template <class Tag>
struct Panel {
  std::vector<Variable> variables;
  std::size_t lags = kDefaultLags;
  std::vector<UtcTime> issue_times;
  Eigen::MatrixXd data;

  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t zones() const { return variables.size(); }
  std::size_t width() const { return variables.size() * lags; }
  std::size_t column(std::size_t zone, std::size_t lag) const { return zone * lags + lag; }

  double operator()(std::size_t t, std::size_t zone, std::size_t lag) const {
    return data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(column(zone, lag)));
  }

  /// Observation t as a Z x L matrix.
  Eigen::MatrixXd observation(std::size_t t) const {
    Eigen::MatrixXd m(zones(), lags);
    for (std::size_t z = 0; z < zones(); ++z)
      for (std::size_t l = 0; l < lags; ++l) m(z, l) = (*this)(t, z, l);
    return m;
  }

  /// Same metadata, different tag and payload.
  template <class Other>
  Panel<Other> retag(Eigen::MatrixXd payload) const {
    return Panel<Other>{variables, lags, issue_times, std::move(payload)};
  }

  void check_shape() const {
    if (static_cast<std::size_t>(data.cols()) != width() ||
        static_cast<std::size_t>(data.rows()) != issue_times.size())
      throw DataError("panel shape mismatch: data is " + std::to_string(data.rows()) + "x" +
                      std::to_string(data.cols()) + ", expected " + std::to_string(issue_times.size()) +
                      "x" + std::to_string(width()));
  }
};

using DeviationPanel = Panel<deviation_tag>;
using RemainderPanel = Panel<remainder_tag>;
using GaussianPanel = Panel<gaussian_tag>;

template <class A, class B>
void require_same_layout(const Panel<A>& a, const Panel<B>& b) {
  if (a.variables != b.variables || a.lags != b.lags)
    throw DataError("variable list or lag count mismatch between panels");
}

}  // namespace scengen
