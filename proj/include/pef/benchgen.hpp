#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pef/data.hpp"
#include "pef/graph.hpp"
#include "pef/rng.hpp"

namespace pef {

// Small static network used as the tile for synthetic instances.
struct BaseNetwork {
  std::string name;
  std::vector<std::string> nodes;
  Dag dag;
};

// Built-in skeletons: "cancer5", "earthquake5", "survey6", "asia8".
// Throws pef::ConfigError for unknown names.
BaseNetwork builtin_network(std::string_view name);
std::vector<std::string> builtin_network_names();

// Number of edges added on top of `edges` existing ones for fraction `frac`,
// rounded up.
std::size_t added_edge_count(std::size_t edges, double frac);

// `copies` disjoint copies of base (copy c owns nodes c*nb .. c*nb+nb-1) plus
// added_edge_count(copies*|E|, extra_frac) random edges between different
// copies, each drawn by rejection so the result stays acyclic. Throws
// std::runtime_error when the retry budget runs out.
Dag tile_and_connect(const Dag& base, int copies, double extra_frac, Rng& rng);

// Transition DAG over 2n nodes: 0..n-1 are X[t] (no edges among them),
// n..2n-1 carry intra_future's edges, plus added_edge_count(|E|, inter_frac)
// distinct X[t] -> X[t+1] edges drawn uniformly.
Dag build_transition(const Dag& intra_future, double inter_frac, Rng& rng);

struct GeneratorConfig {
  int copies = 1;
  double frac_intra = 0.10;
  double frac_inter = 0.20;
  double weight_min = 0.5;
  double weight_max = 1.5;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
};

// Linear-Gaussian 2-TBN: g0 over the n slice variables, g_trans over the 2n
// transition variables.
struct GroundTruthTbn {
  Dag g0;
  Dag g_trans;
  std::map<Edge, double> weights0;
  std::map<Edge, double> weights_trans;
  std::vector<double> noise_sd0;
  std::vector<double> noise_sd_trans;

  int variables() const { return g0.node_count(); }
};

// Seed streams: structure, weights and per-sequence noise are drawn from
// independent substreams of the master seed.
enum class SeedStream : std::uint64_t { Structure = 1, Weights = 2, Noise = 3 };

// Tiles g0 and the future block of g_trans independently, then draws edge
// weights uniformly from +-[weight_min, weight_max].
GroundTruthTbn generate_tbn(const Dag& base, const GeneratorConfig& cfg);

// Variable names X0..X{n-1}.
std::vector<std::string> variable_names(int n);

// m sequences of length l: slice 0 sampled ancestrally from g0, each later
// slice from g_trans with the X[t] block clamped to the previous slice.
// Sequence k draws its noise from its own substream, so the output does not
// depend on `workers`. Optionally standardised per variable.
TimeSeriesDataset sample_sequences(const GroundTruthTbn& tbn, int m, int l, std::uint64_t seed,
                                   int workers = 1, bool standardized = true);

}  // namespace pef
