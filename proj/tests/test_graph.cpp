#include <gtest/gtest.h>

#include <random>

#include "pef/graph.hpp"
#include "test_util.hpp"

namespace pef {
namespace {

// Counts acyclic digraphs on n labelled nodes by enumerating every subset of
// the n(n-1) ordered pairs.
long long brute_force_dag_count(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  long long count = 0;
  for (unsigned long mask = 0; mask < (1UL << pairs.size()); ++mask) {
    // Kahn's algorithm over an adjacency matrix, independent of Pdag.
    std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
    bool two_cycle = false;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (mask >> k & 1UL) {
        auto [a, b] = pairs[k];
        if (adj[b][a]) two_cycle = true;
        adj[a][b] = 1;
      }
    }
    if (two_cycle) continue;
    std::vector<int> indeg(n, 0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) indeg[b] += adj[a][b];
    }
    std::vector<int> ready;
    for (int v = 0; v < n; ++v) {
      if (indeg[v] == 0) ready.push_back(v);
    }
    int seen = 0;
    while (!ready.empty()) {
      const int v = ready.back();
      ready.pop_back();
      ++seen;
      for (int w = 0; w < n; ++w) {
        if (adj[v][w] && --indeg[w] == 0) ready.push_back(w);
      }
    }
    if (seen == n) ++count;
  }
  return count;
}

TEST(Pdag, MutatorsKeepRelationsInSync) {
  Pdag g(4);
  g.add_directed(0, 1);
  g.add_undirected(1, 2);
  EXPECT_TRUE(g.adjacent(1, 0));
  EXPECT_TRUE(g.has_directed(0, 1));
  EXPECT_FALSE(g.has_directed(1, 0));
  EXPECT_TRUE(g.has_undirected(2, 1));
  EXPECT_EQ(g.parents(1), NodeSet({0}));
  EXPECT_EQ(g.children(0), NodeSet({1}));
  EXPECT_EQ(g.undirected(1), NodeSet({2}));
  EXPECT_EQ(g.adjacents(1), NodeSet({0, 2}));
  EXPECT_EQ(g.edge_count(), 2u);

  g.orient(2, 1);
  EXPECT_TRUE(g.has_directed(2, 1));
  EXPECT_EQ(g.undirected_count(), 0u);
  EXPECT_TRUE(g.remove_edge(1, 2));
  EXPECT_FALSE(g.remove_edge(1, 2));
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(Pdag, RejectsBadInput) {
  Pdag g(3);
  EXPECT_THROW(g.add_directed(0, 0), std::invalid_argument);
  EXPECT_THROW(g.add_directed(0, 3), std::out_of_range);
  g.add_directed(0, 1);
  EXPECT_THROW(g.add_directed(1, 0), std::invalid_argument);
  EXPECT_THROW(g.add_undirected(0, 1), std::invalid_argument);
}

TEST(Pdag, NeighborsExcludeChildren) {
  Pdag g(4);
  g.add_directed(0, 1);
  g.add_undirected(1, 2);
  g.add_directed(1, 3);
  EXPECT_EQ(neighbors(g, 1), NodeSet({0, 2}));
}

TEST(Pdag, CreatesCycle) {
  Pdag g(3);
  g.add_directed(0, 1);
  g.add_directed(1, 2);
  EXPECT_TRUE(creates_cycle(g, 2, 0));
  EXPECT_THROW(creates_cycle(g, 1, 0), std::invalid_argument);

  // Undirected edges do not take part in cycle detection.
  Pdag h(3);
  h.add_directed(0, 1);
  h.add_undirected(1, 2);
  EXPECT_FALSE(creates_cycle(h, 2, 0));
  const Pdag before = h;
  creates_cycle(h, 2, 0);
  EXPECT_EQ(h, before);
}

TEST(Pdag, TopologicalOrder) {
  const Pdag g = testing::directed_graph(4, {{2, 0}, {0, 1}, {3, 1}});
  const auto order = topological_order(g);
  ASSERT_TRUE(order.has_value());
  std::vector<int> pos(4);
  for (int k = 0; k < 4; ++k) pos[(*order)[k]] = k;
  for (const Edge& e : g.directed_edges()) EXPECT_LT(pos[e.from], pos[e.to]);

  Pdag cyc(3);
  cyc.add_directed(0, 1);
  cyc.add_directed(1, 2);
  cyc.add_directed(2, 0);
  EXPECT_FALSE(topological_order(cyc).has_value());
  EXPECT_FALSE(is_acyclic(cyc));
}

TEST(Dag, FromPdagValidates) {
  Pdag u(2);
  u.add_undirected(0, 1);
  EXPECT_THROW(Dag::from_pdag(u), std::invalid_argument);
  Pdag cyc(2);
  cyc.add_directed(0, 1);
  Dag d = Dag::from_pdag(cyc);
  EXPECT_FALSE(d.try_add_edge(1, 0));
  EXPECT_EQ(d.edge_count(), 1u);
}

TEST(Dag, TryAddEdgeRejectsCycles) {
  Dag d(3);
  EXPECT_TRUE(d.try_add_edge(0, 1));
  EXPECT_TRUE(d.try_add_edge(1, 2));
  EXPECT_FALSE(d.try_add_edge(2, 0));
  EXPECT_FALSE(d.try_add_edge(0, 1));
  EXPECT_TRUE(is_acyclic(d.graph()));
}

TEST(CountDags, MatchesBruteForce) {
  EXPECT_EQ(count_dags(0), 1);
  for (int n = 1; n <= 5; ++n) {
    EXPECT_EQ(count_dags(n), brute_force_dag_count(n)) << "n=" << n;
  }
  EXPECT_EQ(count_dags(1), 1);
  EXPECT_EQ(count_dags(2), 3);
  EXPECT_EQ(count_dags(3), 25);
  EXPECT_EQ(count_dags(4), 543);
  EXPECT_EQ(count_dags(5), 29281);
  // Exceeds 64 bits well before n = 20.
  EXPECT_GT(count_dags(20), boost::multiprecision::cpp_int(1) << 64);
}

TEST(ComposeDisjoint, RelabelsAndNeverCrossesClusters) {
  const ClusterAssignment c({1, 0, 1, 0, 1});
  Pdag g0(2);  // members {1, 3}
  g0.add_directed(1, 0);
  Pdag g1(3);  // members {0, 2, 4}
  g1.add_undirected(0, 2);
  g1.add_directed(1, 2);
  const std::vector<Pdag> subs{g0, g1};
  const Pdag g = compose_disjoint(subs, c);
  EXPECT_TRUE(g.has_directed(3, 1));
  EXPECT_TRUE(g.has_undirected(0, 4));
  EXPECT_TRUE(g.has_directed(2, 4));
  EXPECT_EQ(g.edge_count(), 3u);
  for (const NodePair& p : skeleton(g)) EXPECT_EQ(c.label(p.a), c.label(p.b));

  EXPECT_EQ(induced_subgraph(g, c.members(1)), g1);
  EXPECT_EQ(induced_subgraph(g, c.members(0)), g0);
}

TEST(ComposeDisjoint, RejectsSizeMismatch) {
  const ClusterAssignment c({0, 0, 1});
  const std::vector<Pdag> subs{Pdag(1), Pdag(1)};
  EXPECT_THROW(compose_disjoint(subs, c), std::invalid_argument);
}

TEST(ClusterAssignment, Validates) {
  EXPECT_THROW(ClusterAssignment({0, 2}), std::invalid_argument);
  EXPECT_THROW(ClusterAssignment({-1}), std::invalid_argument);
  const ClusterAssignment c({1, 0, 1});
  EXPECT_EQ(c.members(1), std::vector<int>({0, 2}));
  EXPECT_EQ(c.local_index(2), 1);
  EXPECT_EQ(c.sizes(), std::vector<int>({1, 2}));
  EXPECT_EQ(ClusterAssignment::single(3).cluster_count(), 1);
}

TEST(Pdag, RandomGraphsRoundTripThroughSkeleton) {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Pdag g = testing::random_forward_dag(12, 0.3, gen);
    EXPECT_TRUE(is_acyclic(g));
    EXPECT_EQ(skeleton(g).size(), g.edge_count());
  }
}

}  // namespace
}  // namespace pef
