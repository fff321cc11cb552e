#pragma once

#include "pef/graph.hpp"

namespace pef {

struct ConfusionCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  bool operator==(const ConfusionCounts&) const = default;
};

struct F1Score {
  double f1 = 0.0;
  ConfusionCounts counts;
};

// 2 tp / (2 tp + fp + fn); 1 when there is nothing to find and nothing found.
double f1_from_counts(const ConfusionCounts& c);

// Skeleton agreement, direction ignored. Throws std::invalid_argument if the
// node counts differ.
F1Score f1_adjacent(const Pdag& estimate, const Dag& truth);

// Directed-edge agreement: an estimated i -> j is a true positive iff the
// truth has i -> j. Undirected estimate edges earn nothing, and the truth
// edges they cover count as misses.
F1Score f1_arrowhead(const Pdag& estimate, const Dag& truth);

struct MetricsReport {
  F1Score adjacent;
  F1Score arrowhead;
  double runtime_seconds = 0.0;
  bool timed_out = false;
};

MetricsReport evaluate(const Pdag& estimate, const Dag& truth, double runtime_seconds = 0.0);

// Report for a run that hit its time budget: both F1 scores are zero.
MetricsReport timed_out_report(double runtime_seconds);

}  // namespace pef
