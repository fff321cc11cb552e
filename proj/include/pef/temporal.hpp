#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pef {

enum class Tier { None, Past, Future };

// 2-TBN prior knowledge over a transition dataset: nodes are either in the
// earlier slice X[t] (Past) or the later slice X[t+1] (Future). When active,
// no edge may join two Past nodes and no edge may point from Future to Past.
class TemporalConstraints {
 public:
  // Inactive: every pair and every orientation is allowed.
  TemporalConstraints() = default;
  // Active; throws std::invalid_argument if any tier is Tier::None.
  explicit TemporalConstraints(std::vector<Tier> tiers);

  // Active constraints when every name ends in "_t" or "_t1", else nullopt.
  static std::optional<TemporalConstraints> from_names(std::span<const std::string> names);
  // Active constraints from explicit past/future name lists; throws
  // pef::DataError if a column is missing from both or listed in both.
  static TemporalConstraints from_lists(std::span<const std::string> names,
                                        std::span<const std::string> past,
                                        std::span<const std::string> future);

  bool active() const { return active_; }
  Tier tier(int node) const { return active_ ? tiers_.at(node) : Tier::None; }
  std::size_t size() const { return tiers_.size(); }

  // Both endpoints in the past slice: the pair may carry no edge at all.
  bool forbids_pair(int i, int j) const {
    return active_ && tiers_[i] == Tier::Past && tiers_[j] == Tier::Past;
  }
  // from -> to is excluded (future to past, or within the past slice).
  // Under active constraints that is every edge into a Past node.
  bool forbids_edge([[maybe_unused]] int from, int to) const {
    return active_ && tiers_[to] == Tier::Past;
  }

  // Constraints over a subset of nodes, in the given order.
  TemporalConstraints restrict_to(std::span<const int> nodes) const;

 private:
  bool active_ = false;
  std::vector<Tier> tiers_;
};

}  // namespace pef
