#pragma once

#include <vector>

namespace pef {

// Node -> cluster map. Labels are dense in [0, p); members of each cluster
// are kept in ascending global index order, which also defines the local
// index of a node inside its cluster's subgraph.
class ClusterAssignment {
 public:
  ClusterAssignment() = default;
  // Throws std::invalid_argument unless labels cover [0, p) with every
  // cluster non-empty.
  explicit ClusterAssignment(std::vector<int> labels);

  static ClusterAssignment single(int n);

  int cluster_count() const { return static_cast<int>(members_.size()); }
  int node_count() const { return static_cast<int>(labels_.size()); }
  int label(int node) const { return labels_.at(node); }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& members(int cluster) const { return members_.at(cluster); }
  int local_index(int node) const { return local_.at(node); }
  std::vector<int> sizes() const;

  bool operator==(const ClusterAssignment& other) const { return labels_ == other.labels_; }

 private:
  std::vector<int> labels_;
  std::vector<std::vector<int>> members_;
  std::vector<int> local_;
};

}  // namespace pef
