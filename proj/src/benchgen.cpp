#include "pef/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "parallel.hpp"
#include "pef/errors.hpp"

namespace pef {

namespace {

struct BuiltinSpec {
  const char* name;
  std::vector<std::string> nodes;
  std::vector<std::pair<int, int>> edges;
};

const std::vector<BuiltinSpec>& builtins() {
  static const std::vector<BuiltinSpec> specs = {
      {"cancer5", {"Pollution", "Smoker", "Cancer", "Xray", "Dyspnoea"}, {{0, 2}, {1, 2}, {2, 3}, {2, 4}}},
      {"earthquake5",
       {"Burglary", "Earthquake", "Alarm", "JohnCalls", "MaryCalls"},
       {{0, 2}, {1, 2}, {2, 3}, {2, 4}}},
      {"survey6",
       {"Age", "Sex", "Education", "Occupation", "Residence", "Transport"},
       {{0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 5}, {4, 5}}},
      {"asia8",
       {"asia", "tub", "smoke", "lung", "bronc", "either", "xray", "dysp"},
       {{0, 1}, {2, 3}, {2, 4}, {1, 5}, {3, 5}, {5, 6}, {5, 7}, {4, 7}}},
  };
  return specs;
}

// Topological order of the X[t+1] block of a transition DAG.
std::vector<int> future_order(const Dag& g_trans, int n) {
  const std::vector<int> order = *topological_order(g_trans.graph());
  std::vector<int> out;
  for (int v : order) {
    if (v >= n) out.push_back(v);
  }
  return out;
}

std::map<Edge, double> draw_weights(const Dag& g, const GeneratorConfig& cfg, Rng& rng) {
  std::map<Edge, double> out;
  for (const Edge& e : g.edges()) {
    const double magnitude = rng.uniform(cfg.weight_min, cfg.weight_max);
    out[e] = rng.uniform() < 0.5 ? -magnitude : magnitude;
  }
  return out;
}

}  // namespace

BaseNetwork builtin_network(std::string_view name) {
  for (const auto& spec : builtins()) {
    if (name != spec.name) continue;
    Pdag g(static_cast<int>(spec.nodes.size()));
    for (auto [u, v] : spec.edges) g.add_directed(u, v);
    return {spec.name, spec.nodes, Dag::from_pdag(std::move(g))};
  }
  throw ConfigError("unknown built-in network '" + std::string(name) + "'");
}

std::vector<std::string> builtin_network_names() {
  std::vector<std::string> out;
  for (const auto& spec : builtins()) out.emplace_back(spec.name);
  return out;
}

std::size_t added_edge_count(std::size_t edges, double frac) {
  if (frac < 0.0) throw std::invalid_argument("edge fraction must be non-negative");
  // The small slack absorbs binary representation error in frac * edges.
  return static_cast<std::size_t>(std::ceil(frac * static_cast<double>(edges) - 1e-9));
}

Dag tile_and_connect(const Dag& base, int copies, double extra_frac, Rng& rng) {
  if (copies < 1) throw std::invalid_argument("copies must be at least 1");
  const int nb = base.node_count();
  const int total = nb * copies;
  Dag out(total);
  for (int c = 0; c < copies; ++c) {
    for (const Edge& e : base.edges()) out.try_add_edge(c * nb + e.from, c * nb + e.to);
  }
  const std::size_t extra = added_edge_count(base.edge_count() * copies, extra_frac);
  if (extra > 0 && copies < 2) throw std::invalid_argument("cross-copy edges need at least 2 copies");

  const std::size_t budget = 1000 * extra + 10000;
  std::size_t added = 0;
  for (std::size_t attempt = 0; added < extra; ++attempt) {
    if (attempt >= budget) {
      throw std::runtime_error("could not place " + std::to_string(extra) +
                               " acyclic cross-copy edges");
    }
    const int u = static_cast<int>(rng.below(total));
    const int v = static_cast<int>(rng.below(total));
    if (u / nb == v / nb) continue;
    if (out.try_add_edge(u, v)) ++added;
  }
  return out;
}

Dag build_transition(const Dag& intra_future, double inter_frac, Rng& rng) {
  const int n = intra_future.node_count();
  const std::size_t inter = added_edge_count(intra_future.edge_count(), inter_frac);
  const std::size_t available = static_cast<std::size_t>(n) * n;
  if (inter > available) {
    throw std::invalid_argument("requested " + std::to_string(inter) +
                                " inter-slice edges but only " + std::to_string(available) +
                                " past->future pairs exist");
  }
  Pdag g(2 * n);
  for (const Edge& e : intra_future.edges()) g.add_directed(n + e.from, n + e.to);

  std::set<std::pair<int, int>> chosen;
  if (inter * 2 <= available) {
    while (chosen.size() < inter) {
      chosen.emplace(static_cast<int>(rng.below(n)), static_cast<int>(rng.below(n)));
    }
  } else {
    std::vector<std::pair<int, int>> all;
    all.reserve(available);
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) all.emplace_back(u, v);
    }
    for (std::size_t k = 0; k < inter; ++k) {
      std::swap(all[k], all[k + rng.below(all.size() - k)]);
      chosen.insert(all[k]);
    }
  }
  for (auto [u, v] : chosen) g.add_directed(u, n + v);
  return Dag::from_pdag(std::move(g));
}

GroundTruthTbn generate_tbn(const Dag& base, const GeneratorConfig& cfg) {
  if (!(cfg.weight_min > 0.0 && cfg.weight_min <= cfg.weight_max)) {
    throw std::invalid_argument("weights need 0 < weight_min <= weight_max");
  }
  if (!(cfg.noise_sd > 0.0)) throw std::invalid_argument("noise_sd must be positive");
  Rng structure(derive_seed(cfg.seed, static_cast<std::uint64_t>(SeedStream::Structure)));
  Rng weights(derive_seed(cfg.seed, static_cast<std::uint64_t>(SeedStream::Weights)));

  GroundTruthTbn tbn;
  tbn.g0 = tile_and_connect(base, cfg.copies, cfg.frac_intra, structure);
  const Dag future = tile_and_connect(base, cfg.copies, cfg.frac_intra, structure);
  tbn.g_trans = build_transition(future, cfg.frac_inter, structure);
  tbn.weights0 = draw_weights(tbn.g0, cfg, weights);
  tbn.weights_trans = draw_weights(tbn.g_trans, cfg, weights);
  tbn.noise_sd0.assign(tbn.g0.node_count(), cfg.noise_sd);
  tbn.noise_sd_trans.assign(tbn.g_trans.node_count(), cfg.noise_sd);
  return tbn;
}

std::vector<std::string> variable_names(int n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back("X" + std::to_string(i));
  return out;
}

TimeSeriesDataset sample_sequences(const GroundTruthTbn& tbn, int m, int l, std::uint64_t seed,
                                   int workers, bool standardized) {
  if (m < 1 || l < 1) throw std::invalid_argument("need at least one sequence of length >= 1");
  const int n = tbn.variables();
  if (tbn.g_trans.node_count() != 2 * n) throw std::invalid_argument("transition graph size mismatch");

  const std::vector<int> order0 = *topological_order(tbn.g0.graph());
  const std::vector<int> order_next = future_order(tbn.g_trans, n);
  // Parent lists with weights, resolved once.
  struct Term {
    int parent;
    double weight;
  };
  std::vector<std::vector<Term>> parents0(n);
  for (const auto& [e, w] : tbn.weights0) parents0[e.to].push_back({e.from, w});
  std::vector<std::vector<Term>> parents_next(2 * n);
  for (const auto& [e, w] : tbn.weights_trans) parents_next[e.to].push_back({e.from, w});

  const std::size_t per_seq = static_cast<std::size_t>(l) * n;
  std::vector<double> values(per_seq * m);
  detail::parallel_for(m, workers, [&](int k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    double* seq = values.data() + per_seq * k;
    for (int v : order0) {
      double x = tbn.noise_sd0[v] * rng.normal();
      for (const Term& t : parents0[v]) x += t.weight * seq[t.parent];
      seq[v] = x;
    }
    for (int t = 1; t < l; ++t) {
      const double* prev = seq + static_cast<std::size_t>(t - 1) * n;
      double* cur = seq + static_cast<std::size_t>(t) * n;
      for (int v : order_next) {
        double x = tbn.noise_sd_trans[v] * rng.normal();
        for (const Term& term : parents_next[v]) {
          x += term.weight * (term.parent < n ? prev[term.parent] : cur[term.parent - n]);
        }
        cur[v - n] = x;
      }
    }
  });
  TimeSeriesDataset ts(m, l, variable_names(n), std::move(values));
  return standardized && static_cast<std::size_t>(m) * l >= 2 ? standardize(ts) : ts;
}

}  // namespace pef
