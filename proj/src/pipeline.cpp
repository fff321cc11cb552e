#include "pef/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>

#include "pef/deadline.hpp"
#include "pef/errors.hpp"
#include "pef/estimation.hpp"
#include "pef/partition.hpp"
#include "pef/stats.hpp"

namespace pef {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::Initial ? "initial" : "transition"; }
std::string to_string(Method method) { return method == Method::Pef ? "pef" : "baseline"; }
std::string to_string(EdgeRule rule) { return rule == EdgeRule::Max ? "max" : "min"; }

Mode parse_mode(const std::string& s) {
  if (s == "initial") return Mode::Initial;
  if (s == "transition") return Mode::Transition;
  throw ConfigError("unknown mode '" + s + "' (expected initial or transition)");
}

Method parse_method(const std::string& s) {
  if (s == "pef") return Method::Pef;
  if (s == "baseline") return Method::Baseline;
  throw ConfigError("unknown method '" + s + "' (expected pef or baseline)");
}

EdgeRule parse_edge_rule(const std::string& s) {
  if (s == "max") return EdgeRule::Max;
  if (s == "min") return EdgeRule::Min;
  throw ConfigError("unknown edge rule '" + s + "' (expected max or min)");
}

void validate(const RunConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (cfg.p_max < 1) throw ConfigError("p-max must be at least 1");
  if (cfg.p_max > kDefaultMaxClusters && !cfg.force) {
    throw ConfigError("p-max above 20 needs --force");
  }
  if (cfg.lambda && !(*cfg.lambda >= 0.0 && std::isfinite(*cfg.lambda))) {
    throw ConfigError("lambda must be a non-negative number");
  }
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  if (cfg.max_cond_size && *cfg.max_cond_size < 0) {
    throw ConfigError("max-cond-size must be non-negative");
  }
  if (cfg.max_sweeps < 1) throw ConfigError("max-sweeps must be at least 1");
  if (cfg.timeout_seconds && !(*cfg.timeout_seconds > 0.0)) {
    throw ConfigError("timeout must be positive");
  }
  LearnerRegistry::global().create(cfg.learner);
}

StaticDataset learning_data(const TimeSeriesDataset& ts, Mode mode) {
  if (mode == Mode::Transition && ts.length() < 2) {
    throw DataError("transition mode needs sequences of length at least 2");
  }
  StaticDataset ds = mode == Mode::Initial ? extract_initial(ts) : extract_transitions(ts);
  if (ds.rows() < 2) throw DataError("need at least two rows to learn from");
  return standardize(ds);
}

LearnResult learn_structure(const StaticDataset& ds, const TemporalConstraints& tc,
                            const RunConfig& cfg,
                            std::function<void(const FusionAuditRecord&)> audit) {
  validate(cfg);
  if (tc.active() && tc.size() != static_cast<std::size_t>(ds.cols())) {
    throw DataError("tier count does not match the number of columns");
  }
  if (ds.rows() < 2) throw DataError("need at least two rows to learn from");
  const auto start = Clock::now();
  const Deadline deadline =
      cfg.timeout_seconds ? Deadline(std::chrono::duration<double>(*cfg.timeout_seconds))
                          : Deadline();
  const auto learner = LearnerRegistry::global().create(cfg.learner);

  LearnerConfig lc;
  lc.alpha = cfg.alpha;
  lc.max_cond_size = cfg.max_cond_size;
  lc.seed = cfg.seed;
  lc.deadline = deadline;
  if (cfg.constrained_estimation) lc.constraints = tc;

  LearnResult out;
  out.lambda = cfg.lambda.value_or(choose_lambda(ds.cols(), ds.rows()));

  // One pass over the data serves every stage.
  auto t = Clock::now();
  const GaussianScorer scorer(ds);
  lc.correlation = std::make_shared<const CorrelationMatrix>(scorer.correlation());

  if (cfg.method == Method::Baseline) {
    Pdag g = learner->learn(ds, lc);
    out.timings.estimation = seconds_since(t);
    t = Clock::now();
    resolve_undirected(scorer, g, out.lambda, TemporalConstraints{});
    out.timings.fusion = seconds_since(t);
    out.estimate = std::move(g);
    out.timings.total = seconds_since(start);
    return out;
  }

  ClusterAssignment clusters = mhc(*lc.correlation, cfg.p_max);
  out.timings.partition = seconds_since(t);
  deadline.check();

  t = Clock::now();
  const std::vector<Pdag> subgraphs = estimate_all(ds, clusters, *learner, lc, cfg.workers);
  out.timings.estimation = seconds_since(t);

  t = Clock::now();
  FusionConfig fc;
  fc.alpha = cfg.alpha;
  fc.lambda = out.lambda;
  fc.edge_rule = cfg.edge_rule;
  fc.max_sweeps = cfg.max_sweeps;
  fc.deadline = deadline;
  fc.audit = std::move(audit);
  FusionResult fused = fuse(ds, scorer, subgraphs, clusters, fc, tc);
  out.timings.fusion = seconds_since(t);

  out.estimate = fused.dag.graph();
  out.clusters = std::move(clusters);
  out.sweeps = fused.sweeps;
  out.converged = fused.converged;
  out.timings.total = seconds_since(start);
  return out;
}

Instance generate_instance(const Dag& base, const InstanceConfig& cfg, int workers) {
  Instance out;
  out.truth = generate_tbn(base, cfg.generator);
  out.data = sample_sequences(
      out.truth, cfg.sequences, cfg.length,
      derive_seed(cfg.generator.seed, static_cast<std::uint64_t>(SeedStream::Noise)), workers);
  return out;
}

const Dag& truth_for(const GroundTruthTbn& tbn, Mode mode) {
  return mode == Mode::Initial ? tbn.g0 : tbn.g_trans;
}

std::vector<std::string> mode_names(const std::vector<std::string>& variables, Mode mode) {
  if (mode == Mode::Initial) return variables;
  std::vector<std::string> out;
  out.reserve(2 * variables.size());
  for (const auto& v : variables) out.push_back(v + kPastSuffix);
  for (const auto& v : variables) out.push_back(v + kFutureSuffix);
  return out;
}

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

std::vector<PipelineRow> run_pipeline(const Dag& base, const PipelineConfig& cfg) {
  if (cfg.repeats < 1) throw ConfigError("repeats must be at least 1");
  validate(cfg.run);

  struct Samples {
    std::vector<double> adj, arr, time;
    int timeouts = 0;
    int variables = 0;
    int truth_edges = 0;
  };
  std::vector<Samples> samples(cfg.modes.size() * cfg.methods.size());

  for (int r = 0; r < cfg.repeats; ++r) {
    const std::uint64_t seed = derive_seed(cfg.run.seed, static_cast<std::uint64_t>(r));
    InstanceConfig ic = cfg.instance;
    ic.generator.seed = seed;
    const Instance inst = generate_instance(base, ic, cfg.run.workers);

    for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
      const Mode mode = cfg.modes[mi];
      const StaticDataset ds = learning_data(inst.data, mode);
      const TemporalConstraints tc =
          mode == Mode::Transition ? *TemporalConstraints::from_names(ds.names())
                                   : TemporalConstraints{};
      const Dag& truth = truth_for(inst.truth, mode);
      for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
        RunConfig rc = cfg.run;
        rc.mode = mode;
        rc.method = cfg.methods[k];
        rc.seed = seed;
        Samples& s = samples[mi * cfg.methods.size() + k];
        s.variables = ds.cols();
        s.truth_edges = static_cast<int>(truth.edge_count());
        const auto start = Clock::now();
        MetricsReport report;
        try {
          const LearnResult res = learn_structure(ds, tc, rc);
          report = evaluate(res.estimate, truth, res.timings.total);
        } catch (const TimeoutError&) {
          report = timed_out_report(seconds_since(start));
          ++s.timeouts;
        }
        s.adj.push_back(report.adjacent.f1);
        s.arr.push_back(report.arrowhead.f1);
        s.time.push_back(report.runtime_seconds);
      }
    }
  }

  std::vector<PipelineRow> rows;
  for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
    for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
      const Samples& s = samples[mi * cfg.methods.size() + k];
      PipelineRow row;
      row.instance = cfg.base + "x" + std::to_string(cfg.instance.generator.copies);
      row.mode = cfg.modes[mi];
      row.method = cfg.methods[k];
      row.variables = s.variables;
      row.truth_edges = s.truth_edges;
      row.f1_adjacent = mean_sd(s.adj);
      row.f1_arrowhead = mean_sd(s.arr);
      row.runtime_seconds = mean_sd(s.time);
      row.repeats = cfg.repeats;
      row.timeouts = s.timeouts;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace pef
