#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pef/benchgen.hpp"
#include "pef/errors.hpp"
#include "pef/estimation.hpp"
#include "pef/eval.hpp"
#include "pef/io.hpp"
#include "pef/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitTimeout = 4;

bool g_quiet = false;

void log(const std::string& msg) {
  if (!g_quiet) std::cerr << "[pef] " << msg << '\n';
}

// Options shared by learn and pipeline, kept as text until validation.
struct RunOptions {
  std::string mode = "transition";
  std::string method = "pef";
  std::string learner = "pc-stable";
  double alpha = 0.05;
  int p_max = 20;
  bool force = false;
  std::string lambda = "auto";
  std::string edge_rule = "max";
  std::uint64_t seed = 0;
  int workers = 1;
  int max_cond_size = -1;
  int max_sweeps = 10;
  double timeout = 0.0;
  bool constrained_estimation = false;
};

void add_run_options(CLI::App* app, RunOptions& o, bool with_mode) {
  if (with_mode) {
    app->add_option("--mode", o.mode, "initial or transition")->capture_default_str();
    app->add_option("--method", o.method, "pef or baseline")->capture_default_str();
  }
  app->add_option("--learner", o.learner, "Subgraph learner")->capture_default_str();
  app->add_option("--alpha", o.alpha, "CI test significance level")->capture_default_str();
  app->add_option("--p-max", o.p_max, "Maximum number of clusters")->capture_default_str();
  app->add_flag("--force", o.force, "Allow p-max above 20");
  app->add_option("--lambda", o.lambda, "Penalty per parameter: auto or a number")
      ->capture_default_str();
  app->add_option("--edge-rule", o.edge_rule, "Fusion acceptance rule: max or min")
      ->capture_default_str();
  app->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app->add_option("--workers", o.workers, "Worker threads")
      ->envname("PEF_WORKERS")
      ->capture_default_str();
  app->add_option("--max-cond-size", o.max_cond_size,
                  "Largest conditioning set for the learner (-1: unlimited)")
      ->capture_default_str();
  app->add_option("--max-sweeps", o.max_sweeps, "Fusion sweep cap")->capture_default_str();
  app->add_option("--timeout", o.timeout, "Time budget in seconds (0: none)")
      ->capture_default_str();
  app->add_flag("--constrained-estimation", o.constrained_estimation,
                "Apply the tier prior inside the subgraph learner too");
}

pef::RunConfig resolve(const RunOptions& o) {
  pef::RunConfig c;
  c.mode = pef::parse_mode(o.mode);
  c.method = pef::parse_method(o.method);
  c.learner = o.learner;
  c.alpha = o.alpha;
  c.p_max = o.p_max;
  c.force = o.force;
  if (o.lambda != "auto") {
    double v = 0.0;
    std::istringstream in(o.lambda);
    if (!(in >> v) || !in.eof()) throw pef::ConfigError("lambda must be 'auto' or a number");
    c.lambda = v;
  }
  c.edge_rule = pef::parse_edge_rule(o.edge_rule);
  c.seed = o.seed;
  c.workers = o.workers;
  if (o.max_cond_size >= 0) c.max_cond_size = o.max_cond_size;
  c.max_sweeps = o.max_sweeps;
  if (o.timeout > 0.0) c.timeout_seconds = o.timeout;
  c.constrained_estimation = o.constrained_estimation;
  pef::validate(c);
  return c;
}

json config_json(const pef::RunConfig& c) {
  json j = {{"mode", pef::to_string(c.mode)},
            {"method", pef::to_string(c.method)},
            {"learner", c.learner},
            {"alpha", c.alpha},
            {"p_max", c.p_max},
            {"force", c.force},
            {"edge_rule", pef::to_string(c.edge_rule)},
            {"seed", c.seed},
            {"workers", c.workers},
            {"max_sweeps", c.max_sweeps},
            {"constrained_estimation", c.constrained_estimation}};
  j["lambda"] = c.lambda ? json(*c.lambda) : json("auto");
  j["max_cond_size"] = c.max_cond_size ? json(*c.max_cond_size) : json(nullptr);
  j["timeout_seconds"] = c.timeout_seconds ? json(*c.timeout_seconds) : json(nullptr);
  return j;
}

pef::BaseNetwork load_base(const std::string& base) {
  for (const auto& name : pef::builtin_network_names()) {
    if (name == base) return pef::builtin_network(base);
  }
  if (fs::exists(base)) return pef::read_edge_list(base);
  throw pef::ConfigError("base '" + base + "' is neither a built-in network nor a file");
}

pef::NamedGraph named(const pef::Dag& g, std::vector<std::string> names,
                      std::optional<pef::TierLists> tiers = std::nullopt) {
  return {std::move(names), g.graph(), std::move(tiers)};
}

// generate ----------------------------------------------------------------

struct GenerateOptions {
  std::string base = "cancer5";
  pef::InstanceConfig instance;
  int workers = 1;
  fs::path out = ".";
};

void cmd_generate(const GenerateOptions& o) {
  const pef::BaseNetwork base = load_base(o.base);
  const pef::Instance inst = pef::generate_instance(base.dag, o.instance, o.workers);
  const auto& vars = inst.data.names();
  const auto trans_names = pef::mode_names(vars, pef::Mode::Transition);

  fs::create_directories(o.out);
  pef::write_graph_json(o.out / "truth_g0.json", named(inst.truth.g0, vars));
  pef::write_graph_json(o.out / "truth_gtrans.json",
                        named(inst.truth.g_trans, trans_names, pef::transition_tiers(trans_names)));
  pef::write_time_series_csv(o.out / "data.csv", inst.data);

  const auto& g = o.instance.generator;
  json manifest = {
      {"base", base.name},
      {"base_nodes", base.nodes.size()},
      {"base_edges", base.dag.edge_count()},
      {"copies", g.copies},
      {"frac_intra", g.frac_intra},
      {"frac_inter", g.frac_inter},
      {"weight_min", g.weight_min},
      {"weight_max", g.weight_max},
      {"noise_sd", g.noise_sd},
      {"seed", g.seed},
      {"sequences", o.instance.sequences},
      {"length", o.instance.length},
      {"variables", inst.truth.variables()},
      {"g0_edges", inst.truth.g0.edge_count()},
      {"gtrans_edges", inst.truth.g_trans.edge_count()},
      {"standardized", true},
      {"files", {"truth_g0.json", "truth_gtrans.json", "data.csv"}}};
  pef::write_json(o.out / "manifest.json", manifest);
  log("wrote " + std::to_string(inst.truth.variables()) + " variables, g0 " +
      std::to_string(inst.truth.g0.edge_count()) + " edges, gtrans " +
      std::to_string(inst.truth.g_trans.edge_count()) + " edges to " + o.out.string());
}

// learn -------------------------------------------------------------------

struct LearnOptions {
  fs::path data;
  fs::path tiers;
  fs::path out = ".";
  fs::path emit_clusters;
  fs::path audit;
  RunOptions run;
};

json audit_json(const pef::FusionAuditRecord& r) {
  json j = {{"sweep", r.sweep},
            {"pair", {r.pair.a, r.pair.b}},
            {"p_value", r.p_value},
            {"action", r.action}};
  if (r.ric) j["ric"] = {{"m0", r.ric->m0}, {"m1", r.ric->m1}, {"m2", r.ric->m2}};
  if (r.edge) j["edge"] = {r.edge->from, r.edge->to};
  return j;
}

// Rows and tier prior for the requested mode.
std::pair<pef::StaticDataset, pef::TemporalConstraints> load_learning_data(const LearnOptions& o,
                                                                           pef::Mode mode) {
  auto data = pef::read_dataset_csv(o.data);
  pef::StaticDataset ds;
  if (auto* ts = std::get_if<pef::TimeSeriesDataset>(&data)) {
    ds = pef::learning_data(*ts, mode);
  } else {
    ds = pef::standardize(std::get<pef::StaticDataset>(data));
    if (ds.rows() < 2) throw pef::DataError("need at least two rows to learn from");
  }
  if (mode == pef::Mode::Initial) return {std::move(ds), {}};
  if (!o.tiers.empty()) {
    const pef::TierLists t = pef::read_tier_file(o.tiers);
    return {ds, pef::TemporalConstraints::from_lists(ds.names(), t.past, t.future)};
  }
  if (auto tc = pef::TemporalConstraints::from_names(ds.names())) return {std::move(ds), *tc};
  throw pef::DataError(
      "transition mode needs a time series, columns suffixed _t/_t1, or --tiers");
}

int cmd_learn(const LearnOptions& o) {
  const pef::RunConfig cfg = resolve(o.run);
  auto [ds, tc] = load_learning_data(o, cfg.mode);
  log("learning " + pef::to_string(cfg.mode) + " graph over " + std::to_string(ds.cols()) +
      " variables from " + std::to_string(ds.rows()) + " rows with " +
      pef::to_string(cfg.method));

  std::ofstream audit_out;
  std::function<void(const pef::FusionAuditRecord&)> audit;
  if (!o.audit.empty()) {
    if (o.audit.has_parent_path()) fs::create_directories(o.audit.parent_path());
    audit_out.open(o.audit);
    if (!audit_out) throw pef::DataError("cannot write '" + o.audit.string() + "'");
    audit = [&](const pef::FusionAuditRecord& r) { audit_out << audit_json(r).dump() << '\n'; };
  }

  fs::create_directories(o.out);
  json timing = {{"config", config_json(cfg)}, {"data", o.data.string()}};
  const auto start = std::chrono::steady_clock::now();
  pef::LearnResult res;
  try {
    res = pef::learn_structure(ds, tc, cfg, audit);
  } catch (const pef::TimeoutError&) {
    timing["timed_out"] = true;
    timing["total_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    pef::write_json(o.out / "timing.json", timing);
    throw;
  }
  if (!res.converged) {
    log("warning: fusion stopped after " + std::to_string(res.sweeps) +
        " sweeps without converging");
  }

  std::optional<pef::TierLists> tiers;
  if (tc.active()) {
    pef::TierLists t;
    for (int v = 0; v < ds.cols(); ++v) {
      (tc.tier(v) == pef::Tier::Past ? t.past : t.future).push_back(ds.names()[v]);
    }
    tiers = std::move(t);
  }
  pef::write_graph_json(o.out / "estimate.json", {ds.names(), res.estimate, tiers});

  timing["timed_out"] = false;
  timing["partition_seconds"] = res.timings.partition;
  timing["estimation_seconds"] = res.timings.estimation;
  timing["fusion_seconds"] = res.timings.fusion;
  timing["total_seconds"] = res.timings.total;
  timing["lambda"] = res.lambda;
  timing["sweeps"] = res.sweeps;
  timing["converged"] = res.converged;
  timing["edges"] = res.estimate.edge_count();
  if (res.clusters) timing["clusters"] = res.clusters->cluster_count();
  pef::write_json(o.out / "timing.json", timing);

  if (!o.emit_clusters.empty()) {
    const pef::ClusterAssignment c =
        res.clusters ? *res.clusters : pef::ClusterAssignment::single(ds.cols());
    pef::write_json(o.emit_clusters, pef::clusters_to_json(c));
  }
  log("estimate has " + std::to_string(res.estimate.edge_count()) + " edges, " +
      std::to_string(res.timings.total) + " s");
  return 0;
}

// evaluate ----------------------------------------------------------------

struct EvaluateOptions {
  fs::path estimate;
  fs::path truth;
  fs::path timing;
  fs::path out = "metrics.json";
};

void cmd_evaluate(const EvaluateOptions& o) {
  json echo = {{"estimate", o.estimate.string()}, {"truth", o.truth.string()}};
  pef::MetricsReport report;
  bool timed_out = false;
  double runtime = 0.0;
  if (!o.timing.empty()) {
    const json t = pef::read_json(o.timing);
    timed_out = t.value("timed_out", false);
    runtime = t.value("total_seconds", 0.0);
    if (t.contains("config")) echo["learn"] = t["config"];
  }
  if (timed_out) {
    report = pef::timed_out_report(runtime);
  } else {
    const pef::NamedGraph truth = pef::read_graph_json(o.truth);
    const pef::NamedGraph est = pef::read_graph_json(o.estimate);
    const pef::Pdag aligned = pef::align_graph(est, truth.names);
    if (!pef::is_acyclic(truth.graph) || !truth.graph.undirected_edges().empty()) {
      throw pef::DataError("truth graph must be a DAG");
    }
    report = pef::evaluate(aligned, pef::Dag::from_pdag(truth.graph), runtime);
  }
  json metrics = pef::metrics_to_json(report);
  metrics["config_echo"] = echo;
  pef::write_json(o.out, metrics);
  std::cout << "f1_adjacent " << pef::format_double(report.adjacent.f1) << "\nf1_arrowhead "
            << pef::format_double(report.arrowhead.f1) << '\n';
}

// pipeline ----------------------------------------------------------------

struct PipelineOptions {
  GenerateOptions gen;
  std::vector<std::string> modes{"initial", "transition"};
  std::vector<std::string> methods{"pef", "baseline"};
  int repeats = 1;
  fs::path out;
  RunOptions run;
};

std::string pm(const pef::MeanSd& v, int precision) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v.mean << " +- " << v.sd;
  return s.str();
}

void cmd_pipeline(const PipelineOptions& o) {
  pef::PipelineConfig cfg;
  cfg.base = o.gen.base;
  cfg.instance = o.gen.instance;
  cfg.repeats = o.repeats;
  cfg.run = resolve(o.run);
  cfg.modes.clear();
  for (const auto& m : o.modes) cfg.modes.push_back(pef::parse_mode(m));
  cfg.methods.clear();
  for (const auto& m : o.methods) cfg.methods.push_back(pef::parse_method(m));
  if (cfg.modes.empty() || cfg.methods.empty()) throw pef::ConfigError("nothing to run");

  const pef::BaseNetwork base = load_base(o.gen.base);
  cfg.base = base.name;
  const auto rows = pef::run_pipeline(base.dag, cfg);

  std::cout << std::left << std::setw(16) << "instance" << std::setw(12) << "graph"
            << std::setw(10) << "method" << std::setw(7) << "n" << std::setw(8) << "edges"
            << std::setw(20) << "f1_adjacent" << std::setw(20) << "f1_arrowhead"
            << std::setw(22) << "runtime_s" << "timeouts\n";
  json summary = json::array();
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(16) << r.instance << std::setw(12)
              << pef::to_string(r.mode) << std::setw(10) << pef::to_string(r.method)
              << std::setw(7) << r.variables << std::setw(8) << r.truth_edges << std::setw(20)
              << pm(r.f1_adjacent, 4) << std::setw(20) << pm(r.f1_arrowhead, 4) << std::setw(22)
              << pm(r.runtime_seconds, 3) << r.timeouts << "/" << r.repeats << '\n';
    summary.push_back({{"instance", r.instance},
                       {"graph", pef::to_string(r.mode)},
                       {"method", pef::to_string(r.method)},
                       {"variables", r.variables},
                       {"truth_edges", r.truth_edges},
                       {"f1_adjacent_mean", r.f1_adjacent.mean},
                       {"f1_adjacent_sd", r.f1_adjacent.sd},
                       {"f1_arrowhead_mean", r.f1_arrowhead.mean},
                       {"f1_arrowhead_sd", r.f1_arrowhead.sd},
                       {"runtime_mean", r.runtime_seconds.mean},
                       {"runtime_sd", r.runtime_seconds.sd},
                       {"repeats", r.repeats},
                       {"timeouts", r.timeouts}});
  }
  if (!o.out.empty()) {
    json doc = {{"config", config_json(cfg.run)},
                {"base", base.name},
                {"copies", cfg.instance.generator.copies},
                {"frac_intra", cfg.instance.generator.frac_intra},
                {"frac_inter", cfg.instance.generator.frac_inter},
                {"sequences", cfg.instance.sequences},
                {"length", cfg.instance.length},
                {"rows", summary}};
    pef::write_json(o.out, doc);
  }
}

void add_generator_options(CLI::App* app, GenerateOptions& o, bool with_seed) {
  auto& g = o.instance.generator;
  app->add_option("--base", o.base, "Built-in network name or edge-list file")
      ->capture_default_str();
  app->add_option("--copies", g.copies, "Number of tiled copies")->capture_default_str();
  app->add_option("--frac-intra", g.frac_intra, "Extra cross-copy edges, fraction of edges")
      ->capture_default_str();
  app->add_option("--frac-inter", g.frac_inter, "X[t] -> X[t+1] edges, fraction of edges")
      ->capture_default_str();
  app->add_option("--weight-min", g.weight_min)->capture_default_str();
  app->add_option("--weight-max", g.weight_max)->capture_default_str();
  app->add_option("--noise-sd", g.noise_sd)->capture_default_str();
  app->add_option("--seqs", o.instance.sequences, "Number of sequences")->capture_default_str();
  app->add_option("--len", o.instance.length, "Sequence length")->capture_default_str();
  if (with_seed) {
    app->add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app->add_option("--workers", o.workers, "Worker threads")
        ->envname("PEF_WORKERS")
        ->capture_default_str();
  }
}

// CLI11 only reads config files attached to the top-level app, so a
// subcommand's --config file is merged into the arguments here. Keys given on
// the command line win; flags take true/false values.
std::vector<std::string> merge_config_file(const CLI::App& app, std::vector<std::string> args) {
  const CLI::App* sub = nullptr;
  std::size_t sub_pos = 0;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k].empty() || args[k][0] == '-') continue;
    sub = app.get_subcommand_no_throw(args[k]);
    sub_pos = k;
    break;
  }
  if (sub == nullptr) return args;

  std::string path;
  for (std::size_t k = sub_pos + 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw pef::ConfigError("cannot open config file '" + path + "'");

  auto given = [&](const std::string& name) {
    for (std::size_t k = sub_pos + 1; k < args.size(); ++k) {
      if (args[k] == "--" + name || args[k].rfind("--" + name + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> extra;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents.front() != sub->get_name()) continue;
    const CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") {
      throw pef::ConfigError("unknown key '" + item.name + "' in " + path);
    }
    if (given(item.name)) continue;
    if (opt->get_expected_min() == 0) {
      const std::string v = item.inputs.empty() ? "true" : item.inputs.front();
      if (v == "true" || v == "1" || v == "yes" || v == "on") {
        extra.push_back("--" + item.name);
      } else if (v != "false" && v != "0" && v != "no" && v != "off") {
        throw pef::ConfigError("key '" + item.name + "' expects true or false");
      }
      continue;
    }
    extra.push_back("--" + item.name);
    extra.insert(extra.end(), item.inputs.begin(), item.inputs.end());
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition-estimation-fusion structure learning for 2-TBNs"};
  app.require_subcommand(1);
  app.add_flag("-q,--quiet", g_quiet, "Suppress progress messages");

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Synthesise a benchmark 2-TBN and data");
  generate->add_option("--config", "key = value configuration file");
  add_generator_options(generate, gen, true);
  generate->add_option("--out", gen.out, "Output directory")->capture_default_str();

  LearnOptions learn;
  auto* learn_cmd = app.add_subcommand("learn", "Learn a graph from data");
  learn_cmd->add_option("--config", "key = value configuration file");
  learn_cmd->add_option("--data", learn.data, "Data CSV")->required();
  learn_cmd->add_option("--tiers", learn.tiers, "Tier file for transition mode");
  learn_cmd->add_option("--out", learn.out, "Output directory")->capture_default_str();
  learn_cmd->add_option("--emit-clusters", learn.emit_clusters, "Write the partition as JSON");
  learn_cmd->add_option("--audit", learn.audit, "Write fusion decisions as JSON lines");
  add_run_options(learn_cmd, learn.run, true);

  EvaluateOptions eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score an estimate against the truth");
  eval_cmd->add_option("--estimate", eval.estimate, "Estimated graph JSON")->required();
  eval_cmd->add_option("--truth", eval.truth, "True graph JSON")->required();
  eval_cmd->add_option("--timing", eval.timing, "timing.json from learn");
  eval_cmd->add_option("--out", eval.out, "Metrics file")->capture_default_str();

  PipelineOptions pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Generate, learn and evaluate repeatedly");
  pipe_cmd->add_option("--config", "key = value configuration file");
  add_generator_options(pipe_cmd, pipe.gen, false);
  pipe_cmd->add_option("--modes", pipe.modes, "Graphs to learn")
      ->delimiter(',')
      ->capture_default_str();
  pipe_cmd->add_option("--methods", pipe.methods, "Methods to compare")
      ->delimiter(',')
      ->capture_default_str();
  pipe_cmd->add_option("--repeats", pipe.repeats, "Repeats with derived seeds")
      ->capture_default_str();
  pipe_cmd->add_option("--out", pipe.out, "Summary JSON file");
  add_run_options(pipe_cmd, pipe.run, false);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
      args = merge_config_file(app, std::move(args));
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (generate->parsed()) {
      cmd_generate(gen);
    } else if (learn_cmd->parsed()) {
      return cmd_learn(learn);
    } else if (eval_cmd->parsed()) {
      cmd_evaluate(eval);
    } else if (pipe_cmd->parsed()) {
      pipe.gen.workers = pipe.run.workers;
      cmd_pipeline(pipe);
    }
  } catch (const pef::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const pef::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const pef::TimeoutError& e) {
    std::cerr << "timeout: " << e.what() << '\n';
    return kExitTimeout;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
