#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pef/data.hpp"
#include "pef/graph.hpp"

namespace pef::testing {

struct WeightedEdge {
  int from;
  int to;
  double weight;
};

inline std::vector<std::string> names(int n, const std::string& prefix = "V") {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Linear SEM with unit-variance Gaussian noise. Nodes must be listed so that
// every edge goes from a lower to a higher position in `order`.
inline Eigen::MatrixXd simulate_sem(int n, const std::vector<WeightedEdge>& edges,
                                    const std::vector<int>& order, int m, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd x(m, n);
  for (int r = 0; r < m; ++r) {
    for (int v : order) {
      double value = noise(gen);
      for (const auto& e : edges) {
        if (e.to == v) value += e.weight * x(r, e.from);
      }
      x(r, v) = value;
    }
  }
  return x;
}

inline std::vector<int> identity_order(int n) {
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

inline StaticDataset dataset(const Eigen::MatrixXd& x) {
  return StaticDataset(x, names(static_cast<int>(x.cols())));
}

inline Pdag directed_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  Pdag g(n);
  for (auto [a, b] : edges) g.add_directed(a, b);
  return g;
}

// Random DAG whose edges all point from lower to higher index.
inline Pdag random_forward_dag(int n, double density, std::mt19937& gen) {
  std::bernoulli_distribution coin(density);
  Pdag g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(gen)) g.add_directed(i, j);
    }
  }
  return g;
}

// Every DAG over the skeleton of g that keeps g's v-structures, then the
// edges on which all of them agree become directed. Brute force over
// 2^|edges| orientations, so only for small graphs.
inline Pdag cpdag_by_enumeration(const Pdag& dag) {
  const int n = dag.node_count();
  std::vector<NodePair> pairs;
  for (const NodePair& p : skeleton(dag)) pairs.push_back(p);
  auto vstructs = [&](const Pdag& g) {
    std::set<std::tuple<int, int, int>> out;
    for (int k = 0; k < n; ++k) {
      const NodeSet& pa = g.parents(k);
      for (int a : pa) {
        for (int b : pa) {
          if (a < b && !g.adjacent(a, b)) out.insert({a, k, b});
        }
      }
    }
    return out;
  };
  const auto target = vstructs(dag);
  std::vector<int> forward(pairs.size(), 0), backward(pairs.size(), 0);
  for (unsigned long mask = 0; mask < (1UL << pairs.size()); ++mask) {
    Pdag g(n);
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (mask >> e & 1UL) {
        g.add_directed(pairs[e].b, pairs[e].a);
      } else {
        g.add_directed(pairs[e].a, pairs[e].b);
      }
    }
    if (!is_acyclic(g) || vstructs(g) != target) continue;
    for (std::size_t e = 0; e < pairs.size(); ++e) ++(mask >> e & 1UL ? backward : forward)[e];
  }
  Pdag out(n);
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    if (backward[e] == 0) {
      out.add_directed(pairs[e].a, pairs[e].b);
    } else if (forward[e] == 0) {
      out.add_directed(pairs[e].b, pairs[e].a);
    } else {
      out.add_undirected(pairs[e].a, pairs[e].b);
    }
  }
  return out;
}

// k independent blocks of `size` variables. Inside a block node 0 is a hub
// feeding every other node, and each later node also feeds its successor.
inline Eigen::MatrixXd block_sem(int k, int size, int m, unsigned seed,
                                 std::vector<int>* labels = nullptr) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> w(0.7, 1.2);
  std::vector<WeightedEdge> edges;
  for (int b = 0; b < k; ++b) {
    const int base = b * size;
    for (int v = 1; v < size; ++v) edges.push_back({base, base + v, w(gen)});
    for (int v = 1; v + 1 < size; ++v) edges.push_back({base + v, base + v + 1, 0.5 * w(gen)});
  }
  if (labels) {
    labels->assign(k * size, 0);
    for (int v = 0; v < k * size; ++v) (*labels)[v] = v / size;
  }
  return simulate_sem(k * size, edges, identity_order(k * size), m, seed + 1);
}

// Two label vectors describe the same partition.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

}  // namespace pef::testing
