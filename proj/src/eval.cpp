#include "pef/eval.hpp"

#include <algorithm>
#include <iterator>
#include <set>
#include <stdexcept>

namespace pef {

namespace {

void check_sizes(const Pdag& estimate, const Dag& truth) {
  if (estimate.node_count() != truth.node_count()) {
    throw std::invalid_argument("estimate and truth have different node counts");
  }
}

template <typename T>
ConfusionCounts confusion(const std::set<T>& est, const std::set<T>& truth) {
  std::vector<T> common;
  std::set_intersection(est.begin(), est.end(), truth.begin(), truth.end(),
                        std::back_inserter(common));
  const int tp = static_cast<int>(common.size());
  return {tp, static_cast<int>(est.size()) - tp, static_cast<int>(truth.size()) - tp};
}

}  // namespace

double f1_from_counts(const ConfusionCounts& c) {
  const int denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 1.0 : 2.0 * c.tp / denom;
}

F1Score f1_adjacent(const Pdag& estimate, const Dag& truth) {
  check_sizes(estimate, truth);
  const auto est = skeleton(estimate);
  const auto tru = skeleton(truth.graph());
  const ConfusionCounts c = confusion(std::set<NodePair>(est.begin(), est.end()),
                                      std::set<NodePair>(tru.begin(), tru.end()));
  return {f1_from_counts(c), c};
}

F1Score f1_arrowhead(const Pdag& estimate, const Dag& truth) {
  check_sizes(estimate, truth);
  const auto est = estimate.directed_edges();
  const auto tru = truth.edges();
  const ConfusionCounts c = confusion(std::set<Edge>(est.begin(), est.end()),
                                      std::set<Edge>(tru.begin(), tru.end()));
  return {f1_from_counts(c), c};
}

MetricsReport evaluate(const Pdag& estimate, const Dag& truth, double runtime_seconds) {
  return {f1_adjacent(estimate, truth), f1_arrowhead(estimate, truth), runtime_seconds, false};
}

MetricsReport timed_out_report(double runtime_seconds) {
  MetricsReport r;
  r.runtime_seconds = runtime_seconds;
  r.timed_out = true;
  return r;
}

}  // namespace pef
