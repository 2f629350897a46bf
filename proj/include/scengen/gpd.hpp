#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace scengen::gpd {

// |xi| below this is treated as the exponential limit.
inline constexpr double kXiZero = 1e-12;

inline constexpr double kXiMin = -0.5;
inline constexpr double kXiMax = 1.0;

/// Survival function of the GPD excess law: P(Y > y).
inline double sf(double y, double xi, double beta) {
  if (y <= 0.0) return 1.0;
  if (std::fabs(xi) < kXiZero) return std::exp(-y / beta);
  const double a = 1.0 + xi * y / beta;
  if (a <= 0.0) return 0.0;  // beyond the finite endpoint (xi < 0)
  return std::exp(-std::log(a) / xi);
}

/// Excess y with P(Y > y) = s, s in (0, 1].
inline double isf(double s, double xi, double beta) {
  if (std::fabs(xi) < kXiZero) return -beta * std::log(s);
  return beta / xi * std::expm1(-xi * std::log(s));
}

/// Finite right endpoint of the excess law (infinity for xi >= 0).
inline double endpoint(double xi, double beta) {
  return xi < 0.0 ? beta / -xi : std::numeric_limits<double>::infinity();
}

inline double log_likelihood(std::span<const double> y, double xi, double beta) {
  if (!(beta > 0.0)) return -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(y.size());
  double acc = -n * std::log(beta);
  if (std::fabs(xi) < kXiZero) {
    for (const double v : y) acc -= v / beta;
    return acc;
  }
  const double k = 1.0 + 1.0 / xi;
  for (const double v : y) {
    const double a = xi * v / beta;
    if (a <= -1.0) return -std::numeric_limits<double>::infinity();
    acc -= k * std::log1p(a);
  }
  return acc;
}

enum class Method { mle, pwm };

struct Fit {
  double xi = 0.0;
  double beta = 1.0;
  double log_likelihood = 0.0;
  bool converged = true;
  Method method = Method::mle;
};

/// Probability-weighted-moment estimator (Hosking and Wallis), plotting
/// positions (i - 0.35) / n.
inline Fit fit_pwm(std::span<const double> excesses) {
  std::vector<double> y(excesses.begin(), excesses.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(y.size());
  double a0 = 0.0, a1 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = (static_cast<double>(i + 1) - 0.35) / n;
    a0 += y[i];
    a1 += (1.0 - p) * y[i];
  }
  a0 /= n;
  a1 /= n;
  Fit f;
  f.method = Method::pwm;
  const double denom = a0 - 2.0 * a1;
  if (denom > 0.0) {
    f.xi = 2.0 - a0 / denom;
    f.beta = 2.0 * a0 * a1 / denom;
  }
  if (!(f.beta > 0.0) || !std::isfinite(f.xi)) {
    f.xi = 0.0;
    f.beta = a0;
  }
  f.xi = std::clamp(f.xi, kXiMin, kXiMax);
  // A clamped shape can leave the largest excess outside the support.
  const double ymax = y.empty() ? 0.0 : y.back();
  if (f.xi < 0.0) f.beta = std::max(f.beta, -f.xi * ymax * (1.0 + 1e-9));
  f.log_likelihood = log_likelihood(excesses, f.xi, f.beta);
  return f;
}

namespace detail {

// For fixed xi, the likelihood in beta has a unique stationary point where
//   g(beta) = sum y / (beta + xi y) - n / (1 + xi) = 0,
// g decreasing on beta > max(0, -xi * ymax). Safeguarded Newton.
inline std::optional<double> profile_beta(std::span<const double> y, double xi, double mean, double ymax) {
  const double n = static_cast<double>(y.size());
  const auto g = [&](double b, double& dg) {
    double s = 0.0;
    dg = 0.0;
    for (const double v : y) {
      const double d = b + xi * v;
      s += v / d;
      dg -= v / (d * d);
    }
    return s - n / (1.0 + xi);
  };
  double lo = std::max(0.0, -xi * ymax);
  double hi = std::max(mean, lo) * 2.0 + 1e-300;
  double dg = 0.0;
  for (int i = 0; i < 200 && g(hi, dg) > 0.0; ++i) hi *= 2.0;
  if (g(hi, dg) > 0.0) return std::nullopt;

  double b = mean * (1.0 - xi);
  if (!(b > lo && b < hi)) b = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double val = g(b, dg);
    if (val > 0.0) lo = b; else hi = b;
    double next = b - val / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - b) <= 1e-14 * b || hi - lo <= 1e-15 * hi) return next;
    b = next;
  }
  return std::nullopt;
}

}  // namespace detail

/// Maximum-likelihood GPD fit of positive excesses: profile likelihood over
/// xi in [-0.5, 1] (coarse grid, then golden-section refinement), beta solved
/// per xi. Falls back to PWM when the profile cannot be evaluated.
/// Returns nullopt when fewer than `min_exceedances` excesses are supplied,
/// which tells the caller to disable that tail.
inline std::optional<Fit> fit_exceedances(std::span<const double> excesses, Method method = Method::mle,
                                          std::size_t min_exceedances = 30) {
  if (excesses.size() < min_exceedances || excesses.empty()) return std::nullopt;
  if (method == Method::pwm) return fit_pwm(excesses);

  const double mean = std::accumulate(excesses.begin(), excesses.end(), 0.0) / static_cast<double>(excesses.size());
  const double ymax = *std::max_element(excesses.begin(), excesses.end());
  if (!(mean > 0.0)) return fit_pwm(excesses);

  bool ok = true;
  const auto profile = [&](double xi, double* beta_out = nullptr) {
    const auto b = detail::profile_beta(excesses, xi, mean, ymax);
    if (!b) {
      ok = false;
      return -std::numeric_limits<double>::infinity();
    }
    if (beta_out) *beta_out = *b;
    return log_likelihood(excesses, xi, *b);
  };

  constexpr int kGrid = 60;
  const double step = (kXiMax - kXiMin) / kGrid;
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double ll = profile(kXiMin + step * i);
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }
  if (!ok || !std::isfinite(best_ll)) {
    auto f = fit_pwm(excesses);
    f.converged = false;
    return f;
  }

  // Golden-section search on the bracket around the best grid point.
  double a = kXiMin + step * std::max(best - 1, 0);
  double b = kXiMin + step * std::min(best + 1, kGrid);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = profile(c), fd = profile(d);
  for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = profile(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = profile(d);
    }
  }
  Fit f;
  f.method = Method::mle;
  double beta = 0.0;
  const double xi_mid = 0.5 * (a + b);
  const double ll_mid = profile(xi_mid, &beta);
  f.xi = xi_mid;
  f.beta = beta;
  f.log_likelihood = ll_mid;
  // The grid point itself may still be better (flat or boundary optimum).
  double grid_beta = 0.0;
  const double grid_ll = profile(kXiMin + step * best, &grid_beta);
  if (grid_ll > ll_mid) {
    f.xi = kXiMin + step * best;
    f.beta = grid_beta;
    f.log_likelihood = grid_ll;
  }
  if (!ok || !std::isfinite(f.log_likelihood)) {
    auto p = fit_pwm(excesses);
    p.converged = false;
    return p;
  }
  return f;
}

}  // namespace scengen::gpd
