#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scengen/gemini.hpp"
#include "scengen/graph.hpp"
#include "scengen/simulate.hpp"
#include "scengen/synthetic.hpp"

using namespace scengen;

namespace {

GraphicalModel truth(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double scale = 1.0) {
  GraphicalModel m;
  m.spatial_cov = a;
  m.temporal_cov = b;
  m.spatial_precision = a.inverse();
  m.temporal_precision = b.inverse();
  m.scale = scale;
  for (Eigen::Index z = 0; z < a.rows(); ++z) m.variables.push_back({VariableKind::load, "Z" + std::to_string(z)});
  m.lags = static_cast<std::size_t>(b.rows());
  return m;
}

GaussianPanel as_panel(const GraphicalModel& m, const Eigen::MatrixXd& draws) {
  GaussianPanel p;
  p.variables = m.variables;
  p.lags = m.lags;
  p.data = draws;
  for (Eigen::Index i = 0; i < draws.rows(); ++i) p.issue_times.push_back(UtcTime{} + Hours{24 * i});
  return p;
}

}  // namespace

TEST(Gemini, RecoversKroneckerFactors) {
  std::mt19937_64 gen(21);
  const auto a = oracle::random_correlation(3, gen);
  const auto b = synthetic::ar1_correlation(6, 0.7);
  const auto m = truth(a, b, 2.5);
  const auto fit = gemini(as_panel(m, sample_kronecker_gaussian(m, 20000, 1)), {0.0, 0.0, 1e-4, 200});
  EXPECT_LT((fit.spatial_cov - a).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_LT((fit.temporal_cov - b).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_NEAR(fit.scale, 2.5, 0.05);
  EXPECT_LT((fit.spatial_precision * fit.spatial_cov - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-6);
  EXPECT_LT((fit.temporal_precision * fit.temporal_cov - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-6);
  EXPECT_TRUE(fit.spatial_converged && fit.temporal_converged);
  EXPECT_EQ(fit.spatial_cov.diagonal(), Eigen::VectorXd::Ones(3));
}

TEST(Gemini, SingleZoneHasIdentitySpatialFactor) {
  const auto m = truth(Eigen::MatrixXd::Identity(1, 1), synthetic::ar1_correlation(24, 0.5));
  const auto fit = gemini(as_panel(m, sample_kronecker_gaussian(m, 500, 2)));
  EXPECT_EQ(fit.spatial_cov, Eigen::MatrixXd::Identity(1, 1));
  EXPECT_EQ(fit.spatial_precision, Eigen::MatrixXd::Identity(1, 1));
  EXPECT_EQ(fit.temporal_cov.rows(), 24);
  EXPECT_EQ(fit.spatial_iterations, 0);
}

TEST(Gemini, BlockDiagonalSpatialSplitsIntoTwoComponents) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
  a.topLeftCorner(3, 3).setConstant(0.7);
  a.bottomRightCorner(2, 2).setConstant(0.6);
  a.diagonal().setOnes();
  const auto m = truth(a, synthetic::ar1_correlation(24, 0.8));
  const auto fit = gemini(as_panel(m, sample_kronecker_gaussian(m, 1000, 3)), {0.2, 0.1, 1e-4, 200});
  const auto g = dependency_graph(fit.spatial_precision, {"l0", "l1", "l2", "w0", "w1"});
  EXPECT_EQ(component_count(g), 2u);
  const auto ids = connected_components(g);
  EXPECT_EQ(ids, (std::vector<std::size_t>{0, 0, 0, 1, 1}));
}

TEST(Gemini, Errors) {
  const auto m = truth(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3));
  auto p = as_panel(m, sample_kronecker_gaussian(m, 50, 4));
  p.data.col(2).setConstant(1.0);
  EXPECT_THROW(gemini(p), DataError);
  EXPECT_THROW(gemini(as_panel(m, sample_kronecker_gaussian(m, 1, 4))), DataError);
}

TEST(Kron, Identities) {
  std::mt19937_64 gen(5);
  const auto a = oracle::random_spd(3, gen);
  const auto b = oracle::random_spd(4, gen);
  const auto k = kron(a, b);
  EXPECT_EQ(k.rows(), 12);
  EXPECT_EQ(k(1 * 4 + 2, 2 * 4 + 3), a(1, 2) * b(2, 3));
  EXPECT_LT((kron(a, b).inverse() - kron(a.inverse(), b.inverse())).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(kron(a, b).trace(), a.trace() * b.trace(), 1e-10);
  const auto m = truth(a, b, 3.0);
  EXPECT_LT((kron_covariance(m) - 3.0 * k).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Graph, DiagonalChainAndThreshold) {
  const auto empty = dependency_graph(Eigen::MatrixXd::Identity(4, 4), {});
  EXPECT_TRUE(empty.edges.empty());
  EXPECT_EQ(component_count(empty), 4u);
  EXPECT_EQ(empty.nodes, (std::vector<std::string>{"0", "1", "2", "3"}));

  // AR(1) precision is tridiagonal: the graph is the lag chain.
  const Eigen::MatrixXd theta = synthetic::ar1_correlation(6, 0.6).inverse();
  const auto chain = dependency_graph(theta, {}, 1e-8);
  ASSERT_EQ(chain.edges.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(chain.edges[k].i, k);
    EXPECT_EQ(chain.edges[k].j, k + 1);
    // Precision diagonal is 1 at the ends and 1 + rho^2 inside.
    const bool end = k == 0 || k == 4;
    EXPECT_NEAR(chain.edges[k].weight, 0.6 / (end ? std::sqrt(1.36) : 1.36), 1e-12);
  }
  EXPECT_EQ(component_count(chain), 1u);
  EXPECT_TRUE(dependency_graph(theta, {}, 1.0).edges.empty());
}

TEST(Graph, PartialCorrelationMatchesDefinition) {
  std::mt19937_64 gen(6);
  const auto theta = oracle::random_spd(4, gen);
  const auto g = dependency_graph(theta, {"a", "b", "c", "d"}, 0.0);
  ASSERT_EQ(g.edges.size(), 6u);
  for (const auto& e : g.edges) {
    const auto i = static_cast<Eigen::Index>(e.i), j = static_cast<Eigen::Index>(e.j);
    EXPECT_DOUBLE_EQ(e.weight, -theta(i, j) / std::sqrt(theta(i, i) * theta(j, j)));
    EXPECT_LT(e.i, e.j);
  }
}

TEST(Graph, DotAndJsonOutput) {
  Eigen::MatrixXd theta = Eigen::MatrixXd::Identity(3, 3);
  theta(0, 1) = theta(1, 0) = -0.5;
  const auto g = dependency_graph(theta, {"load:North", "load:\"S\"", "wind:W"});
  std::ostringstream dot;
  write_dot(dot, g, "spatial");
  EXPECT_EQ(dot.str(),
            "graph \"spatial\" {\n"
            "  \"load:North\";\n"
            "  \"load:\\\"S\\\"\";\n"
            "  \"wind:W\";\n"
            "  \"load:North\" -- \"load:\\\"S\\\"\" [weight=0.5];\n"
            "}\n");
  const auto j = to_json(g);
  EXPECT_EQ(j["nodes"].size(), 3u);
  ASSERT_EQ(j["edges"].size(), 1u);
  EXPECT_EQ(j["edges"][0]["i"], 0);
  EXPECT_EQ(j["edges"][0]["j"], 1);
  EXPECT_EQ(j["edges"][0]["weight"], 0.5);
}
