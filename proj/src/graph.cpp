#include "pef/graph.hpp"

#include <stdexcept>
#include <string>

namespace pef {

Pdag::Pdag(int node_count) {
  if (node_count < 0) throw std::invalid_argument("negative node count");
  parents_.resize(node_count);
  children_.resize(node_count);
  undirected_.resize(node_count);
}

void Pdag::check_node(int i) const {
  if (i < 0 || i >= node_count()) {
    throw std::out_of_range("node index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(node_count()) + ")");
  }
}

void Pdag::check_pair(int i, int j) const {
  check_node(i);
  check_node(j);
  if (i == j) throw std::invalid_argument("self-loop on node " + std::to_string(i));
}

bool Pdag::adjacent(int i, int j) const {
  check_node(i);
  check_node(j);
  return children_[i].contains(j) || parents_[i].contains(j) || undirected_[i].contains(j);
}

bool Pdag::has_directed(int from, int to) const {
  check_node(from);
  check_node(to);
  return children_[from].contains(to);
}

bool Pdag::has_undirected(int i, int j) const {
  check_node(i);
  check_node(j);
  return undirected_[i].contains(j);
}

void Pdag::add_directed(int from, int to) {
  check_pair(from, to);
  if (adjacent(from, to)) throw std::invalid_argument("pair already adjacent");
  children_[from].insert(to);
  parents_[to].insert(from);
  ++directed_count_;
}

void Pdag::add_undirected(int i, int j) {
  check_pair(i, j);
  if (adjacent(i, j)) throw std::invalid_argument("pair already adjacent");
  undirected_[i].insert(j);
  undirected_[j].insert(i);
  ++undirected_count_;
}

bool Pdag::remove_edge(int i, int j) {
  check_pair(i, j);
  if (undirected_[i].erase(j) > 0) {
    undirected_[j].erase(i);
    --undirected_count_;
    return true;
  }
  if (children_[i].erase(j) > 0) {
    parents_[j].erase(i);
    --directed_count_;
    return true;
  }
  if (children_[j].erase(i) > 0) {
    parents_[i].erase(j);
    --directed_count_;
    return true;
  }
  return false;
}

void Pdag::orient(int from, int to) {
  check_pair(from, to);
  if (!undirected_[from].contains(to)) throw std::invalid_argument("edge is not undirected");
  undirected_[from].erase(to);
  undirected_[to].erase(from);
  --undirected_count_;
  children_[from].insert(to);
  parents_[to].insert(from);
  ++directed_count_;
}

const NodeSet& Pdag::parents(int i) const {
  check_node(i);
  return parents_[i];
}

const NodeSet& Pdag::children(int i) const {
  check_node(i);
  return children_[i];
}

const NodeSet& Pdag::undirected(int i) const {
  check_node(i);
  return undirected_[i];
}

NodeSet Pdag::adjacents(int i) const {
  check_node(i);
  NodeSet out = parents_[i];
  out.insert(children_[i].begin(), children_[i].end());
  out.insert(undirected_[i].begin(), undirected_[i].end());
  return out;
}

std::vector<Edge> Pdag::directed_edges() const {
  std::vector<Edge> out;
  out.reserve(directed_count_);
  for (int i = 0; i < node_count(); ++i) {
    for (int j : children_[i]) out.push_back({i, j});
  }
  return out;
}

std::vector<NodePair> Pdag::undirected_edges() const {
  std::vector<NodePair> out;
  out.reserve(undirected_count_);
  for (int i = 0; i < node_count(); ++i) {
    for (auto it = undirected_[i].upper_bound(i); it != undirected_[i].end(); ++it) {
      out.emplace_back(i, *it);
    }
  }
  return out;
}

bool Pdag::operator==(const Pdag& other) const {
  return children_ == other.children_ && undirected_ == other.undirected_;
}

NodeSet neighbors(const Pdag& g, int i) {
  NodeSet out = g.parents(i);
  const auto& und = g.undirected(i);
  out.insert(und.begin(), und.end());
  return out;
}

std::vector<NodePair> skeleton(const Pdag& g) {
  std::set<NodePair> pairs;
  for (const auto& e : g.directed_edges()) pairs.emplace(e.from, e.to);
  for (const auto& p : g.undirected_edges()) pairs.insert(p);
  return {pairs.begin(), pairs.end()};
}

bool creates_cycle(const Pdag& g, int from, int to) {
  if (from == to) throw std::invalid_argument("self-loop");
  if (g.adjacent(from, to)) throw std::invalid_argument("pair already adjacent");
  // Does `to` reach `from` along directed edges?
  std::vector<char> seen(g.node_count(), 0);
  std::vector<int> stack{to};
  seen[to] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : g.children(u)) {
      if (v == from) return true;
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return false;
}

std::optional<std::vector<int>> topological_order(const Pdag& g) {
  const int n = g.node_count();
  std::vector<int> indegree(n);
  for (int i = 0; i < n; ++i) indegree[i] = static_cast<int>(g.parents(i).size());
  // Smallest-index-first keeps the order deterministic.
  std::set<int> ready;
  for (int i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int u = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(u);
    for (int v : g.children(u)) {
      if (--indegree[v] == 0) ready.insert(v);
    }
  }
  if (static_cast<int>(order.size()) != n) return std::nullopt;
  return order;
}

bool is_acyclic(const Pdag& g) { return topological_order(g).has_value(); }

Pdag compose_disjoint(std::span<const Pdag> subgraphs, const ClusterAssignment& clusters) {
  if (static_cast<int>(subgraphs.size()) != clusters.cluster_count()) {
    throw std::invalid_argument("subgraph count does not match cluster count");
  }
  Pdag g(clusters.node_count());
  for (int k = 0; k < clusters.cluster_count(); ++k) {
    const auto& members = clusters.members(k);
    const Pdag& sub = subgraphs[k];
    if (sub.node_count() != static_cast<int>(members.size())) {
      throw std::invalid_argument("subgraph " + std::to_string(k) + " has " +
                                  std::to_string(sub.node_count()) + " nodes, cluster has " +
                                  std::to_string(members.size()));
    }
    for (const auto& e : sub.directed_edges()) g.add_directed(members[e.from], members[e.to]);
    for (const auto& p : sub.undirected_edges()) g.add_undirected(members[p.a], members[p.b]);
  }
  return g;
}

Pdag induced_subgraph(const Pdag& g, std::span<const int> nodes) {
  std::vector<int> local(g.node_count(), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) local[nodes[k]] = static_cast<int>(k);
  Pdag out(static_cast<int>(nodes.size()));
  for (const auto& e : g.directed_edges()) {
    if (local[e.from] >= 0 && local[e.to] >= 0) out.add_directed(local[e.from], local[e.to]);
  }
  for (const auto& p : g.undirected_edges()) {
    if (local[p.a] >= 0 && local[p.b] >= 0) out.add_undirected(local[p.a], local[p.b]);
  }
  return out;
}

Dag Dag::from_pdag(Pdag g) {
  if (g.undirected_count() != 0) throw std::invalid_argument("graph has undirected edges");
  if (!is_acyclic(g)) throw std::invalid_argument("graph has a directed cycle");
  Dag d;
  d.g_ = std::move(g);
  return d;
}

bool Dag::try_add_edge(int from, int to) {
  if (from == to || g_.adjacent(from, to) || creates_cycle(g_, from, to)) return false;
  g_.add_directed(from, to);
  return true;
}

boost::multiprecision::cpp_int count_dags(int n) {
  using boost::multiprecision::cpp_int;
  if (n < 0) throw std::invalid_argument("negative node count");
  std::vector<cpp_int> counts(n + 1);
  counts[0] = 1;
  for (int k = 1; k <= n; ++k) {
    cpp_int total = 0;
    cpp_int binom = 1;  // C(k, i), built incrementally
    for (int i = 1; i <= k; ++i) {
      binom = binom * (k - i + 1) / i;
      cpp_int term = binom * (cpp_int(1) << (i * (k - i))) * counts[k - i];
      if (i % 2 == 1) {
        total += term;
      } else {
        total -= term;
      }
    }
    counts[k] = total;
  }
  return counts[n];
}

}  // namespace pef
