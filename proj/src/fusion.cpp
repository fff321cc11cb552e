#include "pef/fusion.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace pef {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Conditioning set for testing i against j: z without i and j, cut down to
// the `cap` members most correlated with either endpoint when it is larger
// (and always small enough for the z-test to have a positive dof).
std::vector<int> conditioning_set(const CorrelationMatrix& corr, int i, int j, const NodeSet& z,
                                  int cap, int samples) {
  std::vector<int> out;
  out.reserve(z.size());
  for (int k : z) {
    if (k != i && k != j) out.push_back(k);
  }
  const int limit = std::max(0, std::min(cap, samples - 4));
  if (static_cast<int>(out.size()) > limit) {
    auto strength = [&](int k) { return std::max(std::abs(corr(i, k)), std::abs(corr(j, k))); };
    std::stable_sort(out.begin(), out.end(),
                     [&](int a, int b) { return strength(a) > strength(b); });
    out.resize(limit);
    std::sort(out.begin(), out.end());
  }
  return out;
}

struct Screened {
  NodePair pair;
  double p_value;
  double statistic;
};

}  // namespace

std::vector<NodePair> CandidateEdgeSet::sweep_order() const {
  std::vector<NodePair> out = between;
  out.insert(out.end(), within.begin(), within.end());
  return out;
}

CandidateEdgeSet find_candidate_edges(const StaticDataset& ds, std::span<const Pdag> subgraphs,
                                      const ClusterAssignment& clusters, double alpha,
                                      const TemporalConstraints& tc) {
  return find_candidate_edges(ds, correlation_matrix(ds), subgraphs, clusters, alpha, tc);
}

CandidateEdgeSet find_candidate_edges(const StaticDataset& ds, const CorrelationMatrix& corr,
                                      std::span<const Pdag> subgraphs,
                                      const ClusterAssignment& clusters, double alpha,
                                      const TemporalConstraints& tc, int max_conditioning) {
  const int n = ds.cols();
  const int m = ds.rows();
  if (clusters.node_count() != n || corr.size() != n) {
    throw std::invalid_argument("dataset, correlation and clusters disagree on the node count");
  }
  if (tc.active() && static_cast<int>(tc.size()) != n) {
    throw std::invalid_argument("constraint tiers do not match the dataset width");
  }
  const Pdag composed = compose_disjoint(subgraphs, clusters);
  std::vector<NodeSet> own(n);
  for (int i = 0; i < n; ++i) own[i] = neighbors(composed, i);

  // Phase 1: residual-correlation screen over cross-cluster pairs.
  std::vector<Screened> screened;
  if (clusters.cluster_count() > 1) {
    std::vector<std::vector<int>> regressors(n);
    for (int i = 0; i < n; ++i) regressors[i].assign(own[i].begin(), own[i].end());
    const Eigen::MatrixXd rho = residual_correlation_matrix(corr, regressors, ds.constant_flags());
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < j; ++i) {
        if (clusters.label(i) == clusters.label(j) || tc.forbids_pair(i, j)) continue;
        const int cond = static_cast<int>(own[i].size() + own[j].size());
        if (m - cond - 3 < 1) continue;
        const double r = rho(j, i);
        const CiTestResult t = fisher_z_test(r, m, cond, alpha);
        if (t.reject) screened.push_back({NodePair(i, j), t.p_value, std::abs(t.statistic)});
      }
    }
    std::sort(screened.begin(), screened.end(), [](const Screened& a, const Screened& b) {
      return std::tie(a.p_value, b.statistic, a.pair) < std::tie(b.p_value, a.statistic, b.pair);
    });
  }

  // Phase 2: sequential refinement; P_ij grows as pairs are accepted.
  CandidateEdgeSet out;
  std::vector<NodeSet> linked(n);
  for (const Screened& s : screened) {
    const int i = s.pair.a;
    const int j = s.pair.b;
    NodeSet z = own[i];
    z.insert(own[j].begin(), own[j].end());
    z.insert(linked[i].begin(), linked[i].end());
    z.insert(linked[j].begin(), linked[j].end());
    const std::vector<int> cond = conditioning_set(corr, i, j, z, max_conditioning, m);
    const auto r = partial_correlation(corr, i, j, cond);
    if (!r) continue;
    if (!fisher_z_test(*r, m, static_cast<int>(cond.size()), alpha).reject) continue;
    out.between.push_back(s.pair);
    out.p_values.push_back(s.p_value);
    linked[i].insert(j);
    linked[j].insert(i);
  }

  for (const NodePair& p : skeleton(composed)) {
    if (!tc.forbids_pair(p.a, p.b)) out.within.push_back(p);
  }
  return out;
}

PairModels evaluate_pair_models(const GaussianScorer& scorer, const Pdag& g, int i, int j,
                                double lambda, const TemporalConstraints& tc) {
  if (g.adjacent(i, j)) throw std::invalid_argument("pair is already adjacent");
  const std::vector<int> pi(g.parents(i).begin(), g.parents(i).end());
  const std::vector<int> pj(g.parents(j).begin(), g.parents(j).end());
  std::vector<int> pi_plus = pi;
  pi_plus.push_back(j);
  std::vector<int> pj_plus = pj;
  pj_plus.push_back(i);

  const double si = scorer.local_score(i, pi, lambda);
  const double sj = scorer.local_score(j, pj, lambda);
  PairModels out;
  out.m0 = si + sj;
  out.m1 = tc.forbids_edge(i, j) ? kInf : si + scorer.local_score(j, pj_plus, lambda);
  out.m2 = tc.forbids_edge(j, i) ? kInf : scorer.local_score(i, pi_plus, lambda) + sj;
  return out;
}

PairModels evaluate_pair_models(const StaticDataset& ds, const Pdag& g, int i, int j,
                                double lambda, const TemporalConstraints& tc) {
  return evaluate_pair_models(GaussianScorer(ds), g, i, j, lambda, tc);
}

std::optional<Edge> choose_edge(const Pdag& g, int i, int j, const PairModels& models,
                                EdgeRule rule) {
  const bool allow_ij = std::isfinite(models.m1);
  const bool allow_ji = std::isfinite(models.m2);
  if (!allow_ij && !allow_ji) return std::nullopt;

  double decisive;
  if (allow_ij && allow_ji) {
    decisive = rule == EdgeRule::Max ? std::max(models.m1, models.m2) : std::min(models.m1, models.m2);
  } else {
    decisive = allow_ij ? models.m1 : models.m2;
  }
  if (!(decisive < models.m0)) return std::nullopt;

  const bool viable_ij = allow_ij && models.m1 < models.m0 && !creates_cycle(g, i, j);
  const bool viable_ji = allow_ji && models.m2 < models.m0 && !creates_cycle(g, j, i);
  if (viable_ij && viable_ji) {
    if (models.m1 < models.m2) return Edge{i, j};
    if (models.m2 < models.m1) return Edge{j, i};
    return Edge{std::min(i, j), std::max(i, j)};
  }
  if (viable_ij) return Edge{i, j};
  if (viable_ji) return Edge{j, i};
  return std::nullopt;
}

void resolve_undirected(const GaussianScorer& scorer, Pdag& g, double lambda,
                        const TemporalConstraints& tc) {
  for (const NodePair& e : g.undirected_edges()) {
    g.remove_edge(e.a, e.b);
    const PairModels models = evaluate_pair_models(scorer, g, e.a, e.b, lambda, tc);
    const bool ok_ab = std::isfinite(models.m1) && !creates_cycle(g, e.a, e.b);
    const bool ok_ba = std::isfinite(models.m2) && !creates_cycle(g, e.b, e.a);
    if (ok_ab && (!ok_ba || models.m1 <= models.m2)) {
      g.add_directed(e.a, e.b);
    } else if (ok_ba) {
      g.add_directed(e.b, e.a);
    }
  }
}

FusionResult fuse(const StaticDataset& ds, std::span<const Pdag> subgraphs,
                  const ClusterAssignment& clusters, const FusionConfig& cfg,
                  const TemporalConstraints& tc) {
  return fuse(ds, GaussianScorer(ds), subgraphs, clusters, cfg, tc);
}

FusionResult fuse(const StaticDataset& ds, const GaussianScorer& scorer,
                  std::span<const Pdag> subgraphs, const ClusterAssignment& clusters,
                  const FusionConfig& cfg, const TemporalConstraints& tc) {
  if (scorer.cols() != ds.cols() || scorer.rows() != ds.rows()) {
    throw std::invalid_argument("scorer was built over different data");
  }
  if (cfg.max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const int m = ds.rows();
  const CorrelationMatrix corr = scorer.correlation();

  FusionResult result;
  result.candidates =
      find_candidate_edges(ds, corr, subgraphs, clusters, cfg.alpha, tc, cfg.max_conditioning);
  cfg.deadline.check();

  Pdag g = compose_disjoint(subgraphs, clusters);
  if (tc.active()) {
    for (const NodePair& p : skeleton(g)) {
      if (tc.forbids_pair(p.a, p.b)) g.remove_edge(p.a, p.b);
    }
  }

  const std::vector<NodePair> order = result.candidates.sweep_order();
  std::vector<char> alive(order.size(), 1);
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const Pdag before = g;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (!alive[k]) continue;
      if (k % 256 == 0) cfg.deadline.check();
      const int i = order[k].a;
      const int j = order[k].b;
      g.remove_edge(i, j);

      NodeSet z = neighbors(g, i);
      const NodeSet zj = neighbors(g, j);
      z.insert(zj.begin(), zj.end());
      const std::vector<int> cond = conditioning_set(corr, i, j, z, cfg.max_conditioning, m);
      const auto r = partial_correlation(corr, i, j, cond);
      const CiTestResult test =
          r ? fisher_z_test(*r, m, static_cast<int>(cond.size()), cfg.alpha) : CiTestResult{};

      FusionAuditRecord record{sweep, order[k], test.p_value, std::nullopt, "drop", std::nullopt};
      if (!test.reject) {
        alive[k] = 0;
      } else {
        const PairModels models = evaluate_pair_models(scorer, g, i, j, cfg.lambda, tc);
        record.ric = models;
        record.action = "none";
        if (auto e = choose_edge(g, i, j, models, cfg.edge_rule)) {
          assert((e->from == i ? models.m1 : models.m2) < models.m0);
          g.add_directed(e->from, e->to);
          record.action = "add";
          record.edge = e;
        }
      }
      if (cfg.audit) cfg.audit(record);
    }
    result.sweeps = sweep;
    if (g == before) {
      result.converged = true;
      break;
    }
  }

  resolve_undirected(scorer, g, cfg.lambda, tc);
  result.dag = Dag::from_pdag(std::move(g));
  return result;
}

}  // namespace pef
