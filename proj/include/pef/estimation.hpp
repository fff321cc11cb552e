#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pef/clusters.hpp"
#include "pef/data.hpp"
#include "pef/deadline.hpp"
#include "pef/graph.hpp"
#include "pef/stats.hpp"
#include "pef/temporal.hpp"

namespace pef {

struct LearnerConfig {
  double alpha = 0.05;
  // Largest conditioning-set size tried; unset means unlimited, except that
  // pc-stable caps clusters wider than kLargeClusterWidth at
  // kLargeClusterDepth.
  std::optional<int> max_cond_size;
  std::uint64_t seed = 0;
  // Optional 2-TBN prior inside the learner (off by default). Must have one
  // tier per column of the dataset handed to the learner when active.
  TemporalConstraints constraints;
  Deadline deadline;
  // Correlations of the columns handed to the learner, when already known.
  // Learners may use them instead of recomputing; estimate_all expects them
  // over the full dataset and passes each cluster its block.
  std::shared_ptr<const CorrelationMatrix> correlation;
};

inline constexpr int kLargeClusterWidth = 200;
inline constexpr int kLargeClusterDepth = 3;

// Throws std::invalid_argument for alpha outside (0, 1) or a negative depth.
void validate(const LearnerConfig& cfg);

// Structure learner applied to one cluster. Implementations must be
// deterministic given data, config and seed, and return a graph with one node
// per dataset column.
class SubgraphLearner {
 public:
  virtual ~SubgraphLearner() = default;
  virtual std::string name() const = 0;
  virtual Pdag learn(const StaticDataset& ds, const LearnerConfig& cfg) const = 0;
};

// Name -> factory table. "pc-stable" is always registered.
class LearnerRegistry {
 public:
  using Factory = std::function<std::unique_ptr<SubgraphLearner>()>;

  static LearnerRegistry& global();

  void add(const std::string& name, Factory factory);
  // Throws pef::ConfigError for unknown names.
  std::unique_ptr<SubgraphLearner> create(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Factory> factories_;
};

// Order-independent PC: adjacency sets are frozen at the start of every
// conditioning depth, edges are removed on the first non-rejected Fisher-z
// test of the partial correlation, then v-structures and Meek's rules 1-4
// orient what they can.
Pdag pc_stable(const StaticDataset& ds, const LearnerConfig& cfg);

// Skeleton phase of pc_stable on a correlation matrix. sepsets maps every
// removed pair to the set that separated it.
struct PcSkeleton {
  Pdag skeleton;  // undirected edges only
  std::map<NodePair, std::vector<int>> sepsets;
  int max_depth_reached = 0;
};
PcSkeleton pc_stable_skeleton(const CorrelationMatrix& corr, int samples, const LearnerConfig& cfg);

// Orients v-structures i -> k <- j (k outside sepset(i, j)) over the
// skeleton, first writer wins in (i, j, k) order, then closes under Meek's
// rules.
Pdag orient_pc(const PcSkeleton& skel, const TemporalConstraints& constraints = {});

// Meek rules 1-4 applied to fixpoint over the undirected edges of g.
void apply_meek_rules(Pdag& g);

class PcStableLearner final : public SubgraphLearner {
 public:
  std::string name() const override { return "pc-stable"; }
  Pdag learn(const StaticDataset& ds, const LearnerConfig& cfg) const override {
    return pc_stable(ds, cfg);
  }
};

// Failure of the learner on one cluster.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(int cluster, const std::string& what)
      : std::runtime_error("learner failed on cluster " + std::to_string(cluster) + ": " + what),
        cluster_(cluster) {}
  int cluster() const { return cluster_; }

 private:
  int cluster_;
};

// Runs the learner on each cluster's column restriction, using up to
// `workers` threads. The result does not depend on the worker count.
// Constraints in cfg, when active, are given over the full dataset and
// restricted per cluster.
std::vector<Pdag> estimate_all(const StaticDataset& ds, const ClusterAssignment& clusters,
                               const SubgraphLearner& learner, const LearnerConfig& cfg,
                               int workers);

}  // namespace pef
