#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pef/clusters.hpp"
#include "pef/data.hpp"
#include "pef/deadline.hpp"
#include "pef/graph.hpp"
#include "pef/stats.hpp"
#include "pef/temporal.hpp"

namespace pef {

// Candidate pairs for fusion. `between` holds the screened cross-cluster
// pairs in ascending order of their screening p-value (parallel to
// `p_values`); `within` holds the skeleton of the composed subgraphs in
// lexical order.
struct CandidateEdgeSet {
  std::vector<NodePair> between;
  std::vector<double> p_values;
  std::vector<NodePair> within;

  // between followed by within: the order fusion sweeps in.
  std::vector<NodePair> sweep_order() const;
};

// Scores of the three local models for a pair (i, j): no edge, i -> j,
// j -> i. A model excluded by temporal constraints scores +infinity.
struct PairModels {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

// Acceptance rule for adding an edge: `Max` requires both allowed
// orientations to beat the empty model, `Min` only the better one.
enum class EdgeRule { Max, Min };

inline constexpr int kMaxConditioning = 20;

// Alg. 2-style candidate search. Phase 1 screens every cross-cluster pair
// with a Fisher-z test on the correlation of residuals after regressing each
// node on its own subgraph neighbourhood; phase 2 walks the survivors by
// ascending p-value and keeps those still dependent given both
// neighbourhoods plus the neighbours already linked to either node by kept
// pairs. Past-past pairs are dropped under active constraints.
CandidateEdgeSet find_candidate_edges(const StaticDataset& ds, std::span<const Pdag> subgraphs,
                                      const ClusterAssignment& clusters, double alpha,
                                      const TemporalConstraints& tc);
CandidateEdgeSet find_candidate_edges(const StaticDataset& ds, const CorrelationMatrix& corr,
                                      std::span<const Pdag> subgraphs,
                                      const ClusterAssignment& clusters, double alpha,
                                      const TemporalConstraints& tc,
                                      int max_conditioning = kMaxConditioning);

// Scores families of i and j only, parents being directed in-neighbours in
// g. Throws std::invalid_argument if i and j are adjacent.
PairModels evaluate_pair_models(const GaussianScorer& scorer, const Pdag& g, int i, int j,
                                double lambda, const TemporalConstraints& tc);
PairModels evaluate_pair_models(const StaticDataset& ds, const Pdag& g, int i, int j,
                                double lambda, const TemporalConstraints& tc);

// Applies the acceptance rule and picks the orientation: a direction is
// viable when its model is finite, beats m0 and keeps g acyclic; the lower
// score wins and exact ties go from the lower to the higher index.
std::optional<Edge> choose_edge(const Pdag& g, int i, int j, const PairModels& models,
                                EdgeRule rule);

// Re-decides every undirected edge of g (in lexical order) as a directed one,
// oriented by the lower of the two single-direction scores and guarded
// against cycles. Edges that cannot be oriented are dropped.
void resolve_undirected(const GaussianScorer& scorer, Pdag& g, double lambda,
                        const TemporalConstraints& tc);

struct FusionAuditRecord {
  int sweep = 0;
  NodePair pair;
  double p_value = 1.0;
  std::optional<PairModels> ric;
  std::string action;  // "drop", "none", or "add"
  std::optional<Edge> edge;
};

struct FusionConfig {
  double alpha = 0.05;
  double lambda = 0.0;
  EdgeRule edge_rule = EdgeRule::Max;
  int max_sweeps = 10;
  int max_conditioning = kMaxConditioning;
  Deadline deadline;
  std::function<void(const FusionAuditRecord&)> audit;
};

struct FusionResult {
  Dag dag;
  CandidateEdgeSet candidates;
  int sweeps = 0;
  bool converged = false;
};

// Fuses per-cluster subgraphs into one DAG: each candidate pair is cleared,
// dropped from the candidate set for good if a CI test given the current
// neighbourhoods does not reject, and otherwise re-added when the edge rule
// prefers it. Sweeps repeat until the graph stops changing or max_sweeps is
// hit (reported through `converged`).
FusionResult fuse(const StaticDataset& ds, std::span<const Pdag> subgraphs,
                  const ClusterAssignment& clusters, const FusionConfig& cfg,
                  const TemporalConstraints& tc);
// Same, reusing a scorer already built over ds.
FusionResult fuse(const StaticDataset& ds, const GaussianScorer& scorer,
                  std::span<const Pdag> subgraphs, const ClusterAssignment& clusters,
                  const FusionConfig& cfg, const TemporalConstraints& tc);

}  // namespace pef
