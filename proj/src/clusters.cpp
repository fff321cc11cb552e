#include "pef/clusters.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pef {

ClusterAssignment::ClusterAssignment(std::vector<int> labels) : labels_(std::move(labels)) {
  int p = 0;
  for (int z : labels_) {
    if (z < 0) throw std::invalid_argument("negative cluster label");
    p = std::max(p, z + 1);
  }
  members_.assign(p, {});
  local_.resize(labels_.size());
  for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
    local_[i] = static_cast<int>(members_[labels_[i]].size());
    members_[labels_[i]].push_back(i);
  }
  for (int k = 0; k < p; ++k) {
    if (members_[k].empty()) {
      throw std::invalid_argument("cluster " + std::to_string(k) + " is empty");
    }
  }
}

ClusterAssignment ClusterAssignment::single(int n) {
  return ClusterAssignment(std::vector<int>(n, 0));
}

std::vector<int> ClusterAssignment::sizes() const {
  std::vector<int> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(static_cast<int>(m.size()));
  return out;
}

}  // namespace pef
