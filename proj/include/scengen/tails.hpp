#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scengen/error.hpp"
#include "scengen/gpd.hpp"
#include "scengen/normal.hpp"
#include "scengen/stats.hpp"

namespace scengen {

inline constexpr double kCdfClamp = 1e-12;

/// Generalized Pareto tail beyond `threshold`. For the lower tail the
/// parameters describe the negated values, i.e. excesses threshold - x.
struct GpdTail {
  double threshold = 0.0;
  double xi = 0.0;
  double beta = 1.0;
  double tail_prob = 0.05;
};

/// Which sides carry a fitted GPD. A side that is not fitted keeps an
/// exponential tail (xi = 0, beta = mean excess) matched at its threshold.
enum class TailMode { both, upper_only, lower_only, none };

inline std::string_view to_string(TailMode m) {
  switch (m) {
    case TailMode::both: return "both";
    case TailMode::upper_only: return "upper-only";
    case TailMode::lower_only: return "lower-only";
    case TailMode::none: return "none";
  }
  return "none";
}

inline TailMode parse_tail_mode(std::string_view s) {
  if (s == "both") return TailMode::both;
  if (s == "upper-only") return TailMode::upper_only;
  if (s == "lower-only") return TailMode::lower_only;
  if (s == "none") return TailMode::none;
  throw DataError("unknown tail_mode '" + std::string(s) + "'");
}

inline bool has_upper(TailMode m) { return m == TailMode::both || m == TailMode::upper_only; }
inline bool has_lower(TailMode m) { return m == TailMode::both || m == TailMode::lower_only; }

inline TailMode make_tail_mode(bool lower, bool upper) {
  if (lower && upper) return TailMode::both;
  if (upper) return TailMode::upper_only;
  if (lower) return TailMode::lower_only;
  return TailMode::none;
}

enum class Family { semiparametric, gaussian };

/// Marginal law of one (zone, lag) remainder series.
///
/// Semi-parametric family: empirical interior between the two thresholds,
/// spliced continuously with a tail law on each side. Interior knots are the
/// distinct interior sample values at plotting positions (i - 0.5) / k,
/// rescaled to [lower.tail_prob, 1 - upper.tail_prob]; the thresholds anchor
/// both ends. The CDF is piecewise linear there, hence strictly increasing
/// and exactly invertible.
///
/// Gaussian family: N(mean, sd), used when heavy-tail fitting is switched off.
class SemiParametricDist {
 public:
  SemiParametricDist() = default;

  static SemiParametricDist semiparametric(GpdTail lower, GpdTail upper, std::vector<double> interior,
                                           TailMode mode) {
    SemiParametricDist d;
    d.family_ = Family::semiparametric;
    d.mode_ = mode;
    d.lower_ = lower;
    d.upper_ = upper;
    d.interior_ = std::move(interior);
    std::sort(d.interior_.begin(), d.interior_.end());
    d.build_knots();
    return d;
  }

  static SemiParametricDist gaussian(double mean, double sd) {
    if (!(sd > 0.0)) throw DataError("gaussian marginal needs a positive standard deviation");
    SemiParametricDist d;
    d.family_ = Family::gaussian;
    d.mode_ = TailMode::none;
    d.mean_ = mean;
    d.sd_ = sd;
    return d;
  }

  Family family() const { return family_; }
  TailMode tail_mode() const { return mode_; }
  const GpdTail& lower() const { return lower_; }
  const GpdTail& upper() const { return upper_; }
  const std::vector<double>& interior() const { return interior_; }
  double mean() const { return mean_; }
  double sd() const { return sd_; }

  /// P(X <= x), clamped to [1e-12, 1 - 1e-12].
  double cdf(double x) const { return std::clamp(raw_cdf(x), kCdfClamp, 1.0 - kCdfClamp); }

  /// P(X > x), clamped the same way; accurate deep in the upper tail.
  double sf(double x) const { return std::clamp(raw_sf(x), kCdfClamp, 1.0 - kCdfClamp); }

  /// Inverse of cdf on (0, 1).
  double quantile(double u) const {
    if (family_ == Family::gaussian) return mean_ + sd_ * normal::quantile(u);
    if (u <= lower_.tail_prob) return lower_quantile(u);
    if (u >= 1.0 - upper_.tail_prob) return upper_quantile(1.0 - u);
    return interpolate_inverse(u);
  }

  /// x with P(X > x) = s; the upper-tail twin of quantile().
  double quantile_sf(double s) const {
    if (family_ == Family::gaussian) return mean_ - sd_ * normal::quantile(s);
    if (s <= upper_.tail_prob) return upper_quantile(s);
    const double u = 1.0 - s;
    if (u <= lower_.tail_prob) return lower_quantile(u);
    return interpolate_inverse(u);
  }

  /// Gaussian-copula forward map Phi^{-1}(F(x)), routed through the survival
  /// function above the median to keep precision.
  double to_score(double x) const {
    const double u = cdf(x);
    if (u <= 0.5) return normal::quantile(u);
    return normal::quantile_upper(sf(x));
  }

  /// Inverse copula map F^{-1}(Phi(z)).
  double from_score(double z) const {
    if (z <= 0.0) return quantile(std::max(normal::cdf(z), kCdfClamp));
    return quantile_sf(std::max(normal::sf(z), kCdfClamp));
  }

  double median() const { return quantile(0.5); }

  /// Interior knots (x, F(x)) including both threshold anchors.
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  // Tail inverses; the ratio is capped at 1 so rounding at the threshold
  // lands exactly on it.
  double lower_quantile(double u) const {
    return lower_.threshold - gpd::isf(std::min(u / lower_.tail_prob, 1.0), lower_.xi, lower_.beta);
  }
  double upper_quantile(double s) const {
    return upper_.threshold + gpd::isf(std::min(s / upper_.tail_prob, 1.0), upper_.xi, upper_.beta);
  }

  double raw_cdf(double x) const {
    if (family_ == Family::gaussian) return normal::cdf((x - mean_) / sd_);
    if (x <= lower_.threshold) return lower_.tail_prob * gpd::sf(lower_.threshold - x, lower_.xi, lower_.beta);
    if (x >= upper_.threshold) return 1.0 - upper_.tail_prob * gpd::sf(x - upper_.threshold, upper_.xi, upper_.beta);
    return interpolate(x);
  }

  double raw_sf(double x) const {
    if (family_ == Family::gaussian) return normal::sf((x - mean_) / sd_);
    if (x >= upper_.threshold) return upper_.tail_prob * gpd::sf(x - upper_.threshold, upper_.xi, upper_.beta);
    return 1.0 - raw_cdf(x);
  }

  void build_knots() {
    knots_.clear();
    const double lo = lower_.tail_prob;
    const double hi = 1.0 - upper_.tail_prob;
    knots_.emplace_back(lower_.threshold, lo);
    std::vector<double> inside;
    for (const double v : interior_)
      if (v > lower_.threshold && v < upper_.threshold) inside.push_back(v);
    const double k = static_cast<double>(inside.size());
    for (std::size_t i = 0; i < inside.size();) {
      std::size_t j = i;
      while (j + 1 < inside.size() && inside[j + 1] == inside[i]) ++j;
      // Tied values share their mean rank.
      const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
      knots_.emplace_back(inside[i], lo + (hi - lo) * (rank - 0.5) / k);
      i = j + 1;
    }
    knots_.emplace_back(upper_.threshold, hi);
  }

  double interpolate(double x) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                     [](double v, const std::pair<double, double>& k) { return v < k.first; });
    if (it == knots_.begin()) return knots_.front().second;
    if (it == knots_.end()) return knots_.back().second;
    const auto& [x1, p1] = *it;
    const auto& [x0, p0] = *(it - 1);
    return p0 + (p1 - p0) * (x - x0) / (x1 - x0);
  }

  double interpolate_inverse(double u) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), u,
                                     [](double v, const std::pair<double, double>& k) { return v < k.second; });
    if (it == knots_.begin()) return knots_.front().first;
    if (it == knots_.end()) return knots_.back().first;
    const auto& [x1, p1] = *it;
    const auto& [x0, p0] = *(it - 1);
    return x0 + (x1 - x0) * (u - p0) / (p1 - p0);
  }

  Family family_ = Family::semiparametric;
  TailMode mode_ = TailMode::none;
  GpdTail lower_;
  GpdTail upper_;
  std::vector<double> interior_;
  std::vector<std::pair<double, double>> knots_;
  double mean_ = 0.0;
  double sd_ = 1.0;
};

struct TailConfig {
  double threshold_quantile = 0.95;
  std::size_t min_exceedances = 30;
  gpd::Method method = gpd::Method::mle;
  bool enabled = true;  // false: Gaussian marginals (mean / sd of the sample)
};

inline constexpr std::size_t kMinMarginalSample = 200;

namespace detail {

// Fits one side given its excesses. Falls back to an exponential tail when
// the GPD is not retained.
inline std::pair<GpdTail, bool> fit_side(double threshold, std::vector<double> excesses, std::size_t n,
                                         const TailConfig& cfg, double fallback_scale) {
  GpdTail tail;
  tail.threshold = threshold;
  tail.tail_prob = excesses.empty() ? 0.5 / static_cast<double>(n)
                                    : static_cast<double>(excesses.size()) / static_cast<double>(n);
  const auto fit = gpd::fit_exceedances(excesses, cfg.method, cfg.min_exceedances);
  if (fit && fit->xi > gpd::kXiMin) {
    tail.xi = fit->xi;
    tail.beta = fit->beta;
    return {tail, true};
  }
  tail.xi = 0.0;
  tail.beta = excesses.empty() ? fallback_scale : stats::mean(excesses);
  if (!(tail.beta > 0.0)) tail.beta = fallback_scale;
  return {tail, false};
}

}  // namespace detail

/// Fits the marginal of one remainder series: thresholds at the empirical
/// threshold_quantile and 1 - threshold_quantile (type 7), GPD on each side.
inline SemiParametricDist fit_semiparametric(std::span<const double> sample, const TailConfig& cfg = {}) {
  if (sample.size() < kMinMarginalSample)
    throw DataError("marginal fit needs at least " + std::to_string(kMinMarginalSample) + " observations, got " +
                    std::to_string(sample.size()));
  if (!(cfg.threshold_quantile > 0.5 && cfg.threshold_quantile < 1.0))
    throw DataError("threshold_quantile must lie in (0.5, 1)");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw DataError("degenerate sample: zero variance");

  if (!cfg.enabled) return SemiParametricDist::gaussian(stats::mean(sorted), stats::stddev(sorted));

  const std::size_t n = sorted.size();
  const double upper_th = stats::quantile_sorted(sorted, cfg.threshold_quantile);
  const double lower_th = stats::quantile_sorted(sorted, 1.0 - cfg.threshold_quantile);
  std::vector<double> up_exc, lo_exc, interior;
  for (const double v : sorted) {
    if (v > upper_th) up_exc.push_back(v - upper_th);
    else if (v < lower_th) lo_exc.push_back(lower_th - v);
    else if (v > lower_th && v < upper_th) interior.push_back(v);
  }
  const double scale = std::max(stats::stddev(sorted) * 0.1, 1e-12);
  const auto [lower, lower_fitted] = detail::fit_side(lower_th, std::move(lo_exc), n, cfg, scale);
  const auto [upper, upper_fitted] = detail::fit_side(upper_th, std::move(up_exc), n, cfg, scale);
  if (lower_th == upper_th) throw DataError("degenerate sample: thresholds coincide");
  return SemiParametricDist::semiparametric(lower, upper, std::move(interior),
                                            make_tail_mode(lower_fitted, upper_fitted));
}

/// Normal Q-Q pairs (Phi^{-1}((i - 0.5) / n), x_(i)).
inline std::vector<std::pair<double, double>> qq_gaussian(std::span<const double> sample) {
  if (sample.size() < 2) throw DataError("Q-Q plot needs at least two points");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    out.emplace_back(normal::quantile((static_cast<double>(i) + 0.5) / n), sorted[i]);
  return out;
}

}  // namespace scengen
