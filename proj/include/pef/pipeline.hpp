#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pef/benchgen.hpp"
#include "pef/clusters.hpp"
#include "pef/data.hpp"
#include "pef/eval.hpp"
#include "pef/fusion.hpp"
#include "pef/graph.hpp"
#include "pef/temporal.hpp"

namespace pef {

enum class Mode { Initial, Transition };
enum class Method { Pef, Baseline };

std::string to_string(Mode mode);
std::string to_string(Method method);
std::string to_string(EdgeRule rule);
// Throw pef::ConfigError on unknown names.
Mode parse_mode(const std::string& s);
Method parse_method(const std::string& s);
EdgeRule parse_edge_rule(const std::string& s);

struct RunConfig {
  Mode mode = Mode::Transition;
  Method method = Method::Pef;
  std::string learner = "pc-stable";
  double alpha = 0.05;
  int p_max = 20;
  // Allows p_max above 20.
  bool force = false;
  // Unset: chosen from the data size.
  std::optional<double> lambda;
  EdgeRule edge_rule = EdgeRule::Max;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<int> max_cond_size;
  int max_sweeps = 10;
  std::optional<double> timeout_seconds;
  // Also hand the tier prior to the subgraph learner.
  bool constrained_estimation = false;
};

// Throws pef::ConfigError for out-of-range settings or an unknown learner.
void validate(const RunConfig& cfg);

// Rows the learner sees for `mode`, standardised per column.
StaticDataset learning_data(const TimeSeriesDataset& ts, Mode mode);

struct PhaseTimings {
  double partition = 0.0;
  double estimation = 0.0;
  double fusion = 0.0;
  double total = 0.0;
};

struct LearnResult {
  // A DAG for pef. The baseline keeps whatever its learner orients, which
  // need not be acyclic.
  Pdag estimate;
  std::optional<ClusterAssignment> clusters;
  PhaseTimings timings;
  double lambda = 0.0;
  int sweeps = 0;
  bool converged = true;
};

// Partition, estimation and fusion (or the single-learner baseline) on ds.
// Throws pef::TimeoutError when the configured budget runs out.
LearnResult learn_structure(const StaticDataset& ds, const TemporalConstraints& tc,
                            const RunConfig& cfg,
                            std::function<void(const FusionAuditRecord&)> audit = {});

struct InstanceConfig {
  GeneratorConfig generator;
  int sequences = 1000;
  int length = 6;
};

struct Instance {
  GroundTruthTbn truth;
  TimeSeriesDataset data;
};

// Structure and weights from generator.seed, sequence noise from its own
// substream.
Instance generate_instance(const Dag& base, const InstanceConfig& cfg, int workers = 1);

// Truth graph for `mode`, with names matching learning_data's columns.
const Dag& truth_for(const GroundTruthTbn& tbn, Mode mode);
std::vector<std::string> mode_names(const std::vector<std::string>& variables, Mode mode);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

// Sample mean and standard deviation (n - 1 denominator; 0 for one value).
MeanSd mean_sd(const std::vector<double>& values);

struct PipelineRow {
  std::string instance;
  Mode mode = Mode::Transition;
  Method method = Method::Pef;
  int variables = 0;
  int truth_edges = 0;
  MeanSd f1_adjacent;
  MeanSd f1_arrowhead;
  MeanSd runtime_seconds;
  int repeats = 0;
  int timeouts = 0;
};

struct PipelineConfig {
  std::string base = "cancer5";
  InstanceConfig instance;
  std::vector<Mode> modes{Mode::Initial, Mode::Transition};
  std::vector<Method> methods{Method::Pef, Method::Baseline};
  int repeats = 1;
  RunConfig run;
};

// Generate -> learn -> evaluate for every repeat, mode and method. Repeat r
// uses seed derive_seed(seed, r) for both generation and learning.
std::vector<PipelineRow> run_pipeline(const Dag& base, const PipelineConfig& cfg);

}  // namespace pef
