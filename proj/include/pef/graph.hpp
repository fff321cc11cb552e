#pragma once

#include <compare>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pef/clusters.hpp"

namespace pef {

using NodeSet = std::set<int>;

// Directed edge from -> to.
struct Edge {
  int from = 0;
  int to = 0;
  auto operator<=>(const Edge&) const = default;
};

// Unordered node pair, stored with a < b.
struct NodePair {
  int a = 0;
  int b = 0;
  NodePair() = default;
  NodePair(int i, int j) : a(i < j ? i : j), b(i < j ? j : i) {}
  auto operator<=>(const NodePair&) const = default;
};

// Partially directed graph over dense node indices [0, n).
//
// Each node keeps its parents, children and undirected neighbours; the three
// relations are kept in sync by every mutator so that a pair of nodes carries
// at most one edge. Mutators throw std::out_of_range for bad indices and
// std::invalid_argument for self-loops or already-adjacent pairs.
class Pdag {
 public:
  explicit Pdag(int node_count = 0);

  int node_count() const { return static_cast<int>(parents_.size()); }

  bool adjacent(int i, int j) const;
  bool has_directed(int from, int to) const;
  bool has_undirected(int i, int j) const;

  void add_directed(int from, int to);
  void add_undirected(int i, int j);
  // Removes whatever edge joins i and j; returns false if there was none.
  bool remove_edge(int i, int j);
  // Turns the undirected edge {from, to} into from -> to.
  void orient(int from, int to);

  const NodeSet& parents(int i) const;
  const NodeSet& children(int i) const;
  const NodeSet& undirected(int i) const;
  NodeSet adjacents(int i) const;

  std::vector<Edge> directed_edges() const;
  std::vector<NodePair> undirected_edges() const;
  std::size_t directed_count() const { return directed_count_; }
  std::size_t undirected_count() const { return undirected_count_; }
  std::size_t edge_count() const { return directed_count_ + undirected_count_; }

  bool operator==(const Pdag& other) const;

 private:
  void check_node(int i) const;
  void check_pair(int i, int j) const;

  std::vector<NodeSet> parents_;
  std::vector<NodeSet> children_;
  std::vector<NodeSet> undirected_;
  std::size_t directed_count_ = 0;
  std::size_t undirected_count_ = 0;
};

// Parents of i plus undirected neighbours of i; children are excluded.
NodeSet neighbors(const Pdag& g, int i);

std::vector<NodePair> skeleton(const Pdag& g);

// True iff adding from -> to closes a directed cycle, i.e. `to` already
// reaches `from` along directed edges. Undirected edges are ignored.
// Throws std::invalid_argument if the pair is already adjacent.
bool creates_cycle(const Pdag& g, int from, int to);

// Topological order of the directed part, or nullopt if it has a cycle.
std::optional<std::vector<int>> topological_order(const Pdag& g);
bool is_acyclic(const Pdag& g);

// Relabels subgraph k (over cluster k's local indices) into global indices.
Pdag compose_disjoint(std::span<const Pdag> subgraphs, const ClusterAssignment& clusters);

// Restriction of g to the given nodes, relabelled to positions in `nodes`.
Pdag induced_subgraph(const Pdag& g, std::span<const int> nodes);

// A Pdag with no undirected edges and an acyclic directed part.
class Dag {
 public:
  explicit Dag(int node_count = 0) : g_(node_count) {}
  // Throws std::invalid_argument if g has undirected edges or a cycle.
  static Dag from_pdag(Pdag g);

  const Pdag& graph() const { return g_; }
  int node_count() const { return g_.node_count(); }
  std::size_t edge_count() const { return g_.directed_count(); }
  std::vector<Edge> edges() const { return g_.directed_edges(); }

  // Adds from -> to unless the pair is adjacent or the edge closes a cycle.
  bool try_add_edge(int from, int to);

  bool operator==(const Dag& other) const { return g_ == other.g_; }

 private:
  Pdag g_;
};

// Number of labelled DAGs on n nodes (Robinson's recurrence).
boost::multiprecision::cpp_int count_dags(int n);

}  // namespace pef
