#include "pef/temporal.hpp"

#include <stdexcept>
#include <unordered_map>

#include "pef/data.hpp"
#include "pef/errors.hpp"

namespace pef {

TemporalConstraints::TemporalConstraints(std::vector<Tier> tiers)
    : active_(true), tiers_(std::move(tiers)) {
  for (Tier t : tiers_) {
    if (t == Tier::None) throw std::invalid_argument("active constraints need a tier for every node");
  }
}

std::optional<TemporalConstraints> TemporalConstraints::from_names(
    std::span<const std::string> names) {
  const std::string past = kPastSuffix;
  const std::string future = kFutureSuffix;
  auto ends_with = [](const std::string& s, const std::string& suffix) {
    return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  std::vector<Tier> tiers;
  tiers.reserve(names.size());
  for (const auto& name : names) {
    if (ends_with(name, future)) {
      tiers.push_back(Tier::Future);
    } else if (ends_with(name, past)) {
      tiers.push_back(Tier::Past);
    } else {
      return std::nullopt;
    }
  }
  if (tiers.empty()) return std::nullopt;
  return TemporalConstraints(std::move(tiers));
}

TemporalConstraints TemporalConstraints::from_lists(std::span<const std::string> names,
                                                    std::span<const std::string> past,
                                                    std::span<const std::string> future) {
  std::unordered_map<std::string, Tier> lookup;
  for (const auto& n : past) lookup[n] = Tier::Past;
  for (const auto& n : future) {
    auto [it, inserted] = lookup.emplace(n, Tier::Future);
    if (!inserted) throw DataError("'" + n + "' is listed as both past and future");
  }
  std::vector<Tier> tiers;
  tiers.reserve(names.size());
  for (const auto& n : names) {
    auto it = lookup.find(n);
    if (it == lookup.end()) throw DataError("column '" + n + "' has no tier");
    tiers.push_back(it->second);
  }
  return TemporalConstraints(std::move(tiers));
}

TemporalConstraints TemporalConstraints::restrict_to(std::span<const int> nodes) const {
  if (!active_) return {};
  std::vector<Tier> sub;
  sub.reserve(nodes.size());
  for (int i : nodes) sub.push_back(tiers_.at(i));
  return TemporalConstraints(std::move(sub));
}

}  // namespace pef
