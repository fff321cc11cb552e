#include "pef/estimation.hpp"

#include "parallel.hpp"
#include "pef/errors.hpp"

namespace pef {

LearnerRegistry& LearnerRegistry::global() {
  static LearnerRegistry registry = [] {
    LearnerRegistry r;
    r.add("pc-stable", [] { return std::make_unique<PcStableLearner>(); });
    return r;
  }();
  return registry;
}

void LearnerRegistry::add(const std::string& name, Factory factory) {
  factories_[name] = std::move(factory);
}

std::unique_ptr<SubgraphLearner> LearnerRegistry::create(const std::string& name) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) throw ConfigError("unknown learner '" + name + "'");
  return it->second();
}

std::vector<std::string> LearnerRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, factory] : factories_) out.push_back(name);
  return out;
}

std::vector<Pdag> estimate_all(const StaticDataset& ds, const ClusterAssignment& clusters,
                               const SubgraphLearner& learner, const LearnerConfig& cfg,
                               int workers) {
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (clusters.node_count() != ds.cols()) {
    throw std::invalid_argument("cluster assignment does not match the dataset width");
  }
  validate(cfg);
  if (cfg.correlation && cfg.correlation->size() != ds.cols()) {
    throw std::invalid_argument("precomputed correlation does not match the dataset width");
  }
  const int p = clusters.cluster_count();
  std::vector<Pdag> out(p);
  detail::parallel_for(p, workers, [&](int k) {
    const auto& members = clusters.members(k);
    LearnerConfig local = cfg;
    local.constraints = cfg.constraints.restrict_to(members);
    if (cfg.correlation) {
      const auto q = static_cast<Eigen::Index>(members.size());
      Eigen::MatrixXd block(q, q);
      for (Eigen::Index a = 0; a < q; ++a) {
        for (Eigen::Index b = 0; b < q; ++b) block(a, b) = (*cfg.correlation)(members[a], members[b]);
      }
      local.correlation = std::make_shared<const CorrelationMatrix>(std::move(block));
    }
    try {
      Pdag g = learner.learn(ds.select_columns(members), local);
      if (g.node_count() != static_cast<int>(members.size())) {
        throw std::runtime_error("learner returned a graph of the wrong size");
      }
      out[k] = std::move(g);
    } catch (const TimeoutError&) {
      throw;
    } catch (const std::exception& e) {
      throw EstimationError(k, e.what());
    }
  });
  return out;
}

}  // namespace pef
