#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pef/benchgen.hpp"
#include "pef/clusters.hpp"
#include "pef/data.hpp"
#include "pef/eval.hpp"
#include "pef/graph.hpp"
#include "pef/temporal.hpp"

namespace pef {

struct TierLists {
  std::vector<std::string> past;
  std::vector<std::string> future;
};

// Graph file contents: node names (whose order defines the indices), edges,
// and optional tier metadata.
struct NamedGraph {
  std::vector<std::string> names;
  Pdag graph;
  std::optional<TierLists> tiers;
};

// {"nodes": [...], "directed": [[i, j], ...], "undirected": [[i, j], ...]}
// plus "tiers": {"past": [...], "future": [...]} when present.
nlohmann::json graph_to_json(const NamedGraph& g);
// Throws pef::DataError on malformed content.
NamedGraph graph_from_json(const nlohmann::json& j);
NamedGraph read_graph_json(const std::filesystem::path& path);
void write_graph_json(const std::filesystem::path& path, const NamedGraph& g);

// Re-indexes g onto `names`; throws pef::DataError if the node sets differ.
Pdag align_graph(const NamedGraph& g, std::span<const std::string> names);

// Tier lists for a transition graph whose nodes are past block then future
// block.
TierLists transition_tiers(std::span<const std::string> names);

// Long-format time series: header "seq_id,slice_id,<variables...>", rows
// sorted by (seq_id, slice_id), every sequence with slices 0..l-1.
TimeSeriesDataset read_time_series_csv(const std::filesystem::path& path);
void write_time_series_csv(const std::filesystem::path& path, const TimeSeriesDataset& ts);

// Header row of column names followed by numeric rows.
StaticDataset read_static_csv(const std::filesystem::path& path);
void write_static_csv(const std::filesystem::path& path, const StaticDataset& ds);

// Time series when the header starts with seq_id,slice_id; static otherwise.
std::variant<TimeSeriesDataset, StaticDataset> read_dataset_csv(const std::filesystem::path& path);

// {"p": int, "labels": [int, ...]}
nlohmann::json clusters_to_json(const ClusterAssignment& c);
ClusterAssignment clusters_from_json(const nlohmann::json& j);

// {"past": [names...], "future": [names...]}
TierLists read_tier_file(const std::filesystem::path& path);

// Edge list: one "from to" (or "from -> to") pair of node names per line;
// '#' starts a comment. Nodes are numbered in order of first appearance.
BaseNetwork read_edge_list(const std::filesystem::path& path);

nlohmann::json metrics_to_json(const MetricsReport& r);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace pef
