#pragma once

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace scengen {

struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0;  // partial correlation
};

/// Conditional-dependence graph read off a precision matrix.
struct DependencyGraph {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;  // i < j
};

inline DependencyGraph dependency_graph(const Eigen::MatrixXd& theta, std::vector<std::string> labels,
                                        double edge_threshold = 0.01) {
  DependencyGraph g;
  g.nodes = std::move(labels);
  g.nodes.resize(static_cast<std::size_t>(theta.rows()));
  for (Eigen::Index i = 0; i < theta.rows(); ++i) {
    if (g.nodes[static_cast<std::size_t>(i)].empty()) g.nodes[static_cast<std::size_t>(i)] = std::to_string(i);
    for (Eigen::Index j = i + 1; j < theta.cols(); ++j) {
      const double pc = -theta(i, j) / std::sqrt(theta(i, i) * theta(j, j));
      if (std::fabs(pc) > edge_threshold)
        g.edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), pc});
    }
  }
  return g;
}

/// Component id per node (union-find), ids dense from 0 in node order.
inline std::vector<std::size_t> connected_components(const DependencyGraph& g) {
  std::vector<std::size_t> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges) parent[find(e.i)] = find(e.j);
  std::vector<std::size_t> id(g.nodes.size(), g.nodes.size()), out(g.nodes.size());
  std::size_t next = 0;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const auto r = find(v);
    if (id[r] == g.nodes.size()) id[r] = next++;
    out[v] = id[r];
  }
  return out;
}

inline std::size_t component_count(const DependencyGraph& g) {
  const auto ids = connected_components(g);
  std::size_t n = 0;
  for (const auto c : ids) n = std::max(n, c + 1);
  return n;
}

inline void write_dot(std::ostream& os, const DependencyGraph& g, const std::string& name = "G") {
  const auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (const char c : s) {
      if (c == '"' || c == '\\') q.push_back('\\');
      q.push_back(c);
    }
    return q + "\"";
  };
  os << "graph " << quote(name) << " {\n";
  for (const auto& n : g.nodes) os << "  " << quote(n) << ";\n";
  char buf[64];
  for (const auto& e : g.edges) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    os << "  " << quote(g.nodes[e.i]) << " -- " << quote(g.nodes[e.j]) << " [weight=" << buf << "];\n";
  }
  os << "}\n";
}

inline nlohmann::json to_json(const DependencyGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({{"i", e.i}, {"j", e.j}, {"weight", e.weight}});
  return {{"nodes", g.nodes}, {"edges", std::move(edges)}};
}

}  // namespace scengen
