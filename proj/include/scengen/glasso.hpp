#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "scengen/error.hpp"
#include "scengen/log.hpp"

namespace scengen {

/// Pearson correlation of the columns of an n x p data matrix; unit diagonal.
inline Eigen::MatrixXd empirical_correlation(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw DataError("correlation needs at least two observations");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::VectorXd ss = centered.colwise().squaredNorm();
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (!(ss(j) > 0.0)) throw DataError("constant column " + std::to_string(j) + " has no correlation");
  const Eigen::VectorXd inv = ss.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd r = inv.asDiagonal() * (centered.transpose() * centered) * inv.asDiagonal();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    r(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = std::clamp(0.5 * (r(i, j) + r(j, i)), -1.0, 1.0);
      r(i, j) = r(j, i) = v;
    }
  }
  return r;
}

/// Rescales a covariance-like matrix to unit diagonal.
inline Eigen::MatrixXd to_correlation(const Eigen::MatrixXd& s) {
  const Eigen::VectorXd inv = s.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd r = inv.asDiagonal() * s * inv.asDiagonal();
  r.diagonal().setOnes();
  return 0.5 * (r + r.transpose());
}

struct GlassoOptions {
  double lambda = 0.1;
  double tol = 1e-4;
  int max_iter = 200;
};

struct GlassoResult {
  Eigen::MatrixXd theta;  // sparse precision estimate
  Eigen::MatrixXd w;      // covariance estimate, inverse of theta
  Eigen::MatrixXd s;      // input after any diagonal regularization
  double regularization = 0.0;
  int iterations = 0;
  bool converged = false;
  // -log det W after every sweep; non-increasing (W maximizes log det over
  // the box |W_ij - S_ij| <= lambda, one column block at a time).
  std::vector<double> neg_logdet_history;
};

/// -log det(theta) + tr(S theta) + lambda * sum_{i != j} |theta_ij|.
inline double glasso_objective(const Eigen::MatrixXd& s, const Eigen::MatrixXd& theta, double lambda) {
  Eigen::LLT<Eigen::MatrixXd> llt(theta);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double l1 = theta.cwiseAbs().sum() - theta.diagonal().cwiseAbs().sum();
  return -logdet + (s.cwiseProduct(theta)).sum() + lambda * l1;
}

struct KktReport {
  double box_violation = 0.0;   // max over i != j of |W_ij - S_ij| - lambda (clipped at 0)
  double sign_violation = 0.0;  // max over active theta_ij of |W_ij - S_ij - lambda sign(theta_ij)|
  bool holds(double tol) const { return box_violation <= tol && sign_violation <= tol; }
};

/// Stationarity certificate: W = S + lambda * Gamma, Gamma_ij in sign(theta_ij).
inline KktReport glasso_kkt(const Eigen::MatrixXd& s, double lambda, const Eigen::MatrixXd& theta,
                            const Eigen::MatrixXd& w, double active_tol = 1e-10) {
  KktReport r;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (i == j) continue;
      const double d = w(i, j) - s(i, j);
      r.box_violation = std::max(r.box_violation, std::fabs(d) - lambda);
      if (std::fabs(theta(i, j)) > active_tol) {
        const double sign = theta(i, j) > 0.0 ? 1.0 : -1.0;
        r.sign_violation = std::max(r.sign_violation, std::fabs(d - lambda * sign));
      }
    }
  }
  return r;
}

namespace detail {

inline double neg_logdet(const Eigen::MatrixXd& w) {
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return -2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// One block update for column j: solves the lasso
//   min_b 0.5 b' W11 b - b' s12 + lambda |b|_1
// by coordinate descent (warm start from `beta`), then writes W11 b into W.
// Returns the sum of absolute changes to the off-diagonal entries of column j.
inline double update_column(Eigen::MatrixXd& w, const Eigen::MatrixXd& s, Eigen::MatrixXd& beta, Eigen::Index j,
                            double lambda, Eigen::VectorXd& u) {
  const Eigen::Index p = w.rows();
  u.setZero();
  for (Eigen::Index k = 0; k < p; ++k) {
    if (k == j || beta(k, j) == 0.0) continue;
    for (Eigen::Index m = 0; m < p; ++m)
      if (m != j) u(m) += w(m, k) * beta(k, j);
  }
  for (int pass = 0; pass < 10000; ++pass) {
    double max_delta = 0.0, max_beta = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (k == j) continue;
      const double old = beta(k, j);
      const double r = s(k, j) - (u(k) - w(k, k) * old);
      const double next = soft_threshold(r, lambda) / w(k, k);
      const double delta = next - old;
      if (delta != 0.0) {
        beta(k, j) = next;
        for (Eigen::Index m = 0; m < p; ++m)
          if (m != j) u(m) += delta * w(m, k);
      }
      max_delta = std::max(max_delta, std::fabs(delta));
      max_beta = std::max(max_beta, std::fabs(next));
    }
    if (max_delta <= 1e-13 * std::max(max_beta, 1.0)) break;
  }
  double change = 0.0;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (k == j) continue;
    change += std::fabs(u(k) - w(k, j));
    w(k, j) = u(k);
    w(j, k) = u(k);
  }
  return change;
}

}  // namespace detail

/// Graphical lasso by block coordinate descent over columns with an inner
/// coordinate-descent lasso (Friedman, Hastie and Tibshirani form). The
/// diagonal is unpenalized, so W_ii = S_ii.
///
/// Convergence: the mean absolute change of the off-diagonal entries of W in
/// one sweep falls below tol * mean |S_ij| (i != j). The iterate is then
/// polished with further sweeps until changes reach round-off so that
/// theta and W are inverses of each other to working precision.
inline GlassoResult glasso(Eigen::MatrixXd s, const GlassoOptions& opt = {}) {
  const Eigen::Index p = s.rows();
  if (p == 0 || s.cols() != p) throw DataError("glasso needs a square, non-empty matrix");
  if (!(opt.lambda >= 0.0)) throw DataError("glasso penalty must be non-negative");
  if (!s.allFinite()) throw DataError("glasso input has non-finite entries");
  const double scale = s.cwiseAbs().maxCoeff();
  if (!((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1.0)))
    throw DataError("glasso input is not symmetric");
  s = 0.5 * (s + s.transpose());
  if (!(s.diagonal().minCoeff() > 0.0)) throw NumericalError("glasso input has a non-positive diagonal");

  GlassoResult res;
  const Eigen::VectorXd spectrum = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues();
  const double lmin = spectrum(0);
  const double lmax = spectrum(p - 1);
  if (lmin < 0.0) {
    res.regularization = -1.1 * lmin;
    s.diagonal().array() += res.regularization;
    std::ostringstream msg;
    msg << "glasso input not positive semi-definite (min eigenvalue " << lmin << "); added " << res.regularization
        << " to the diagonal";
    log::warn(msg.str());
  }
  if (opt.lambda == 0.0 && lmin + res.regularization <= 1e-12 * (lmax + res.regularization))
    throw NumericalError("unpenalized glasso on a singular matrix has no precision estimate");
  res.s = s;

  Eigen::MatrixXd w = s;
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd u(p);
  const double off_count = static_cast<double>(p * (p - 1));
  const double s_off_mean =
      p > 1 ? (s.cwiseAbs().sum() - s.diagonal().cwiseAbs().sum()) / off_count : 0.0;

  const auto sweep = [&]() {
    double change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) change += detail::update_column(w, s, beta, j, opt.lambda, u);
    return p > 1 ? 2.0 * change / off_count : 0.0;
  };

  res.neg_logdet_history.push_back(detail::neg_logdet(w));
  for (int it = 1; it <= opt.max_iter; ++it) {
    const double mean_change = sweep();
    res.iterations = it;
    res.neg_logdet_history.push_back(detail::neg_logdet(w));
    if (mean_change <= opt.tol * s_off_mean) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    std::ostringstream msg;
    msg << "glasso did not converge in " << opt.max_iter << " sweeps (lambda " << opt.lambda << ")";
    log::warn(msg.str());
  } else {
    for (int it = 0; it < 500; ++it) {
      const double mean_change = sweep();
      if (mean_change <= 1e-15 * std::max(s_off_mean, scale)) break;
    }
  }

  // Precision from the final regression coefficients:
  //   theta_jj = 1 / (W_jj - w12' beta), theta_12 = -beta theta_jj.
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double dot = 0.0;
    for (Eigen::Index k = 0; k < p; ++k)
      if (k != j) dot += w(k, j) * beta(k, j);
    const double tjj = 1.0 / (w(j, j) - dot);
    theta(j, j) = tjj;
    for (Eigen::Index k = 0; k < p; ++k)
      if (k != j) theta(k, j) = -beta(k, j) * tjj;
  }
  res.theta = 0.5 * (theta + theta.transpose());
  res.w = w;
  return res;
}

/// Number of off-diagonal entries (counted once per pair) above `eps` in magnitude.
inline int count_edges(const Eigen::MatrixXd& theta, double eps = 1e-8) {
  int n = 0;
  for (Eigen::Index i = 0; i < theta.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::fabs(theta(i, j)) > eps) ++n;
  return n;
}

}  // namespace scengen
