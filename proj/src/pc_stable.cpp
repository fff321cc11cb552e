#include <algorithm>
#include <numeric>

#include "pef/errors.hpp"
#include "pef/estimation.hpp"

namespace pef {

namespace {

// Visits every size-k subset of `pool` in lexicographic order until the
// visitor returns true.
template <typename Visit>
bool for_each_subset(const std::vector<int>& pool, int k, Visit visit) {
  const int n = static_cast<int>(pool.size());
  if (k > n) return false;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> subset(k);
  while (true) {
    for (int a = 0; a < k; ++a) subset[a] = pool[idx[a]];
    if (visit(subset)) return true;
    int a = k - 1;
    while (a >= 0 && idx[a] == n - k + a) --a;
    if (a < 0) return false;
    ++idx[a];
    for (int b = a + 1; b < k; ++b) idx[b] = idx[b - 1] + 1;
  }
}

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

void validate(const LearnerConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (cfg.max_cond_size && *cfg.max_cond_size < 0) {
    throw std::invalid_argument("max_cond_size must be non-negative");
  }
}

PcSkeleton pc_stable_skeleton(const CorrelationMatrix& corr, int samples, const LearnerConfig& cfg) {
  validate(cfg);
  const int n = corr.size();
  const auto& tc = cfg.constraints;
  if (tc.active() && static_cast<int>(tc.size()) != n) {
    throw std::invalid_argument("constraint tiers do not match the dataset width");
  }
  int depth_cap = cfg.max_cond_size.value_or(n > kLargeClusterWidth ? kLargeClusterDepth : n);
  // The Fisher z-test needs samples - |S| - 3 >= 1.
  depth_cap = std::min(depth_cap, samples - 4);

  PcSkeleton out;
  out.skeleton = Pdag(n);
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (tc.forbids_pair(i, j)) continue;
      adj[i][j] = adj[j][i] = 1;
    }
  }

  for (int depth = 0; depth <= depth_cap; ++depth) {
    // Frozen adjacency for this depth.
    std::vector<std::vector<int>> frozen(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (adj[i][j]) frozen[i].push_back(j);
      }
    }
    bool tested = false;
    std::vector<int> pool;
    for (int i = 0; i < n; ++i) {
      cfg.deadline.check();
      for (int j : frozen[i]) {
        if (!adj[i][j]) continue;
        if (static_cast<int>(frozen[i].size()) - 1 < depth) continue;
        tested = true;
        if (depth > 0) {
          pool.clear();
          for (int k : frozen[i]) {
            if (k != j) pool.push_back(k);
          }
        }
        for_each_subset(pool, depth, [&](const std::vector<int>& s) {
          const auto r = partial_correlation(corr, i, j, s);
          const bool dependent = r && fisher_z_test(*r, samples, depth, cfg.alpha).reject;
          if (dependent) return false;
          adj[i][j] = adj[j][i] = 0;
          out.sepsets[NodePair(i, j)] = s;
          return true;
        });
      }
    }
    if (!tested) break;
    out.max_depth_reached = depth;
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (adj[i][j]) out.skeleton.add_undirected(i, j);
    }
  }
  return out;
}

void apply_meek_rules(Pdag& g) {
  // Rule 1: c -> a, a - b, c not adjacent to b.
  auto rule1 = [&](int a, int b) {
    for (int c : g.parents(a)) {
      if (c != b && !g.adjacent(c, b)) return true;
    }
    return false;
  };
  // Rule 2: a -> c -> b with a - b.
  auto rule2 = [&](int a, int b) {
    for (int c : g.children(a)) {
      if (g.has_directed(c, b)) return true;
    }
    return false;
  };
  // Rule 3: a - c -> b and a - d -> b with c, d non-adjacent.
  auto rule3 = [&](int a, int b) {
    std::vector<int> mids;
    for (int c : g.undirected(a)) {
      if (c != b && g.has_directed(c, b)) mids.push_back(c);
    }
    for (std::size_t x = 0; x < mids.size(); ++x) {
      for (std::size_t y = x + 1; y < mids.size(); ++y) {
        if (!g.adjacent(mids[x], mids[y])) return true;
      }
    }
    return false;
  };
  // Rule 4: a - c -> d -> b with a adjacent to d and c not adjacent to b.
  auto rule4 = [&](int a, int b) {
    for (int c : g.undirected(a)) {
      if (c == b || g.adjacent(c, b)) continue;
      for (int d : g.children(c)) {
        if (d != a && d != b && g.has_directed(d, b) && g.adjacent(a, d)) return true;
      }
    }
    return false;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : g.undirected_edges()) {
      if (!g.has_undirected(e.a, e.b)) continue;
      for (auto [a, b] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
        if (rule1(a, b) || rule2(a, b) || rule3(a, b) || rule4(a, b)) {
          g.orient(a, b);
          changed = true;
          break;
        }
      }
    }
  }
}

Pdag orient_pc(const PcSkeleton& skel, const TemporalConstraints& constraints) {
  Pdag g = skel.skeleton;
  const int n = g.node_count();

  // Background knowledge first: every allowed cross-tier edge points forward.
  if (constraints.active()) {
    for (const auto& e : g.undirected_edges()) {
      if (constraints.forbids_edge(e.b, e.a)) {
        g.orient(e.a, e.b);
      } else if (constraints.forbids_edge(e.a, e.b)) {
        g.orient(e.b, e.a);
      }
    }
  }

  auto point_into = [&](int from, int to) {
    if (g.has_undirected(from, to) && !constraints.forbids_edge(from, to)) g.orient(from, to);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (g.adjacent(i, j)) continue;
      // Pairs excluded up front by the constraints were never tested.
      const auto sep = skel.sepsets.find(NodePair(i, j));
      if (sep == skel.sepsets.end()) continue;
      for (int k : g.adjacents(i)) {
        if (!g.adjacent(j, k) || contains(sep->second, k)) continue;
        point_into(i, k);
        point_into(j, k);
      }
    }
  }
  apply_meek_rules(g);
  return g;
}

Pdag pc_stable(const StaticDataset& ds, const LearnerConfig& cfg) {
  if (ds.rows() < 10) throw DataError("pc-stable needs at least 10 rows");
  if (ds.cols() == 0) return Pdag(0);
  if (cfg.correlation && cfg.correlation->size() != ds.cols()) {
    throw std::invalid_argument("precomputed correlation does not match the dataset width");
  }
  const PcSkeleton skel =
      cfg.correlation ? pc_stable_skeleton(*cfg.correlation, ds.rows(), cfg)
                      : pc_stable_skeleton(correlation_matrix(ds), ds.rows(), cfg);
  return orient_pc(skel, cfg.constraints);
}

}  // namespace pef
