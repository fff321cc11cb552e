#pragma once

#include <vector>

#include <Eigen/Core>

#include "pef/clusters.hpp"
#include "pef/data.hpp"
#include "pef/stats.hpp"

namespace pef {

// One agglomeration step. Cluster ids follow the usual convention: 0..n-1
// are the singletons and merge k creates cluster n + k.
struct Merge {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;
};

// Merge history of a bottom-up clustering over n points. Level h of the
// dendrogram is the partition left after the first h merges.
class Dendrogram {
 public:
  Dendrogram() = default;
  // Throws std::invalid_argument unless there are exactly n - 1 merges, each
  // combining two live clusters, with non-decreasing heights.
  Dendrogram(int n, std::vector<Merge> merges);

  int point_count() const { return n_; }
  const std::vector<Merge>& merges() const { return merges_; }

  // Cluster label of every point at `level`, labels in order of first
  // appearance by point index.
  std::vector<int> labels_at(int level) const;
  // Number of clusters with at least `min_size` points at every level 0..n-1.
  std::vector<int> big_cluster_counts(int min_size) const;

 private:
  int n_ = 0;
  std::vector<Merge> merges_;
};

// Agglomerative clustering with average linkage. Among equal distances the
// pair with the lowest (i, j) wins, where a cluster is identified by its
// smallest member.
Dendrogram average_linkage_hclust(const Eigen::MatrixXd& dissimilarity);

struct ClusterCount {
  int p = 1;      // number of clusters to keep
  int level = 0;  // highest dendrogram level holding exactly p big clusters
};

inline constexpr int kDefaultMaxClusters = 20;

// ceil(0.05 n): smallest size that makes a cluster "big".
int big_cluster_threshold(int n);

// p = min(p_max, max_i p_i) and the highest level with p_i = p, where p_i
// counts big clusters at level i.
ClusterCount choose_p(const Dendrogram& dendrogram, int n, int p_max);

// Modified hierarchical clustering from a dissimilarity matrix: cut at the
// chosen level, order clusters by decreasing size, then absorb the small
// clusters by repeated closest-pair (average linkage) merges in which the
// higher-indexed member of the pair is always a small cluster. Cluster k of
// the result is the k-th largest big cluster.
ClusterAssignment modified_hclust(const Eigen::MatrixXd& dissimilarity, int p_max);

// Correlation -> dissimilarity -> modified_hclust.
ClusterAssignment mhc(const StaticDataset& ds, int p_max = kDefaultMaxClusters);
ClusterAssignment mhc(const CorrelationMatrix& corr, int p_max = kDefaultMaxClusters);

}  // namespace pef
