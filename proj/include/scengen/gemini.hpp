#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scengen/error.hpp"
#include "scengen/glasso.hpp"
#include "scengen/panel.hpp"

namespace scengen {

/// Separable (Kronecker) Gaussian model of a Z x L score matrix:
///   cov(vec) = scale * spatial_cov (x) temporal_cov,
/// with both factors in correlation form (unit diagonal).
struct GraphicalModel {
  Eigen::MatrixXd spatial_precision;
  Eigen::MatrixXd spatial_cov;
  Eigen::MatrixXd temporal_precision;
  Eigen::MatrixXd temporal_cov;
  double scale = 1.0;
  std::vector<Variable> variables;
  std::size_t lags = kDefaultLags;

  // fit diagnostics
  int spatial_iterations = 0;
  int temporal_iterations = 0;
  bool spatial_converged = true;
  bool temporal_converged = true;

  std::size_t zones() const { return variables.size(); }
};

struct GeminiOptions {
  double lambda_spatial = 0.1;
  double lambda_temporal = 0.1;
  double tol = 1e-4;
  int max_iter = 200;
};

/// GEMINI estimator. Each observation is a Z x L matrix X_t (columns of the
/// panel standardized first). Spatial Gram S_A = (1/(nL)) sum X_t X_t' and
/// temporal Gram S_B = (1/(nZ)) sum X_t' X_t are put in correlation form and
/// each passed through glasso with its own penalty. A degenerate axis (Z = 1
/// or L = 1) gets a 1 x 1 identity factor. `scale` is the mean column
/// variance of the input, which is what the separable model implies per entry
/// once both factors have unit diagonal.
inline GraphicalModel gemini(const GaussianPanel& panel, const GeminiOptions& opt = {}) {
  panel.check_shape();
  const auto n = panel.data.rows();
  if (n < 2) throw DataError("gemini needs at least two observations");
  const auto zones = static_cast<Eigen::Index>(panel.zones());
  const auto lags = static_cast<Eigen::Index>(panel.lags);

  const Eigen::RowVectorXd mean = panel.data.colwise().mean();
  const Eigen::MatrixXd centered = panel.data.rowwise() - mean;
  const Eigen::RowVectorXd var = centered.colwise().squaredNorm() / static_cast<double>(n - 1);
  for (Eigen::Index j = 0; j < var.size(); ++j)
    if (!(var(j) > 0.0)) throw DataError("gemini: panel column " + std::to_string(j) + " is constant");
  const Eigen::MatrixXd x = centered * var.cwiseSqrt().cwiseInverse().asDiagonal();

  Eigen::MatrixXd sa = Eigen::MatrixXd::Zero(zones, zones);
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(lags, lags);
  for (Eigen::Index t = 0; t < n; ++t) {
    // Row t reshaped to Z x L (row-major flattening z * L + l).
    const Eigen::RowVectorXd row = x.row(t);
    const Eigen::MatrixXd m =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(row.data(), zones, lags);
    sa.noalias() += m * m.transpose();
    sb.noalias() += m.transpose() * m;
  }
  sa /= static_cast<double>(n * lags);
  sb /= static_cast<double>(n * zones);

  GraphicalModel model;
  model.variables = panel.variables;
  model.lags = panel.lags;
  model.scale = var.mean();

  const auto solve = [&](const Eigen::MatrixXd& gram, double lambda, Eigen::MatrixXd& precision,
                         Eigen::MatrixXd& cov, int& iterations, bool& converged) {
    if (gram.rows() == 1) {
      precision = cov = Eigen::MatrixXd::Identity(1, 1);
      iterations = 0;
      converged = true;
      return;
    }
    const auto r = glasso(to_correlation(gram), {lambda, opt.tol, opt.max_iter});
    precision = r.theta;
    cov = r.w;
    iterations = r.iterations;
    converged = r.converged;
  };
  solve(sa, opt.lambda_spatial, model.spatial_precision, model.spatial_cov, model.spatial_iterations,
        model.spatial_converged);
  solve(sb, opt.lambda_temporal, model.temporal_precision, model.temporal_cov, model.temporal_iterations,
        model.temporal_converged);
  return model;
}

/// Kronecker product a (x) b; entry [(i, k), (j, l)] at row i * b.rows() + k.
inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// scale * spatial_cov (x) temporal_cov, indexed like the flattened panel.
inline Eigen::MatrixXd kron_covariance(const GraphicalModel& model) {
  return model.scale * kron(model.spatial_cov, model.temporal_cov);
}

}  // namespace scengen
