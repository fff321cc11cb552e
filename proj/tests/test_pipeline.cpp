#include <gtest/gtest.h>

#include <cmath>

#include "pef/errors.hpp"
#include "pef/estimation.hpp"
#include "pef/partition.hpp"
#include "pef/pipeline.hpp"

namespace pef {
namespace {

Instance small_instance(int copies, std::uint64_t seed, int sequences = 200) {
  InstanceConfig ic;
  ic.generator.copies = copies;
  ic.generator.seed = seed;
  ic.sequences = sequences;
  return generate_instance(builtin_network("cancer5").dag, ic);
}

TEST(Names, ParseAndPrint) {
  EXPECT_EQ(parse_mode("initial"), Mode::Initial);
  EXPECT_EQ(to_string(parse_mode("transition")), "transition");
  EXPECT_EQ(parse_method("baseline"), Method::Baseline);
  EXPECT_EQ(to_string(Method::Pef), "pef");
  EXPECT_EQ(parse_edge_rule("min"), EdgeRule::Min);
  EXPECT_THROW(parse_mode("static"), ConfigError);
  EXPECT_THROW(parse_method("ges"), ConfigError);
  EXPECT_THROW(parse_edge_rule("avg"), ConfigError);
}

TEST(RunConfig, Validation) {
  RunConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  auto bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.alpha = 0.0; })), ConfigError);
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.alpha = 1.0; })), ConfigError);
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.p_max = 0; })), ConfigError);
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.p_max = 21; })), ConfigError);
  EXPECT_NO_THROW(validate(bad([](RunConfig& c) {
    c.p_max = 21;
    c.force = true;
  })));
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.lambda = -1.0; })), ConfigError);
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.workers = 0; })), ConfigError);
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.max_cond_size = -1; })), ConfigError);
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.max_sweeps = 0; })), ConfigError);
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.timeout_seconds = 0.0; })), ConfigError);
  EXPECT_THROW(validate(bad([](RunConfig& c) { c.learner = "ges"; })), ConfigError);
}

TEST(MeanSd, SampleStatistics) {
  const MeanSd a = mean_sd({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
  EXPECT_DOUBLE_EQ(a.mean, 5.0);
  EXPECT_DOUBLE_EQ(a.sd, std::sqrt(32.0 / 7.0));
  EXPECT_EQ(mean_sd({3.0}).sd, 0.0);
  EXPECT_EQ(mean_sd({}).mean, 0.0);
}

TEST(LearningData, ShapesAndNames) {
  const Instance inst = small_instance(2, 1, 50);
  const StaticDataset init = learning_data(inst.data, Mode::Initial);
  const StaticDataset trans = learning_data(inst.data, Mode::Transition);
  EXPECT_EQ(init.rows(), 50);
  EXPECT_EQ(trans.rows(), 250);
  EXPECT_EQ(trans.cols(), 20);
  EXPECT_EQ(trans.names(), mode_names(inst.data.names(), Mode::Transition));
  EXPECT_EQ(truth_for(inst.truth, Mode::Transition).node_count(), 20);
  const TimeSeriesDataset one(3, 1, {"a"}, {1.0, 2.0, 3.0});
  EXPECT_THROW(learning_data(one, Mode::Transition), DataError);
}

TEST(Learn, TransitionOutputRespectsTiers) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = small_instance(4, seed);
    const StaticDataset ds = learning_data(inst.data, Mode::Transition);
    const auto tc = TemporalConstraints::from_names(ds.names());
    ASSERT_TRUE(tc.has_value());
    const LearnResult r = learn_structure(ds, *tc, RunConfig{});
    EXPECT_TRUE(is_acyclic(r.estimate));
    EXPECT_EQ(r.estimate.undirected_count(), 0u);
    for (const Edge& e : r.estimate.directed_edges()) {
      EXPECT_FALSE(tc->forbids_pair(e.from, e.to));
      EXPECT_FALSE(tc->forbids_edge(e.from, e.to));
    }
    ASSERT_TRUE(r.clusters.has_value());
    EXPECT_LE(r.clusters->cluster_count(), 20);
    EXPECT_NEAR(r.lambda, choose_lambda(ds.cols(), ds.rows()), 0.0);
  }
}

TEST(Learn, IdenticalAcrossWorkers) {
  const Instance inst = small_instance(10, 7, 300);
  const StaticDataset ds = learning_data(inst.data, Mode::Transition);
  const auto tc = *TemporalConstraints::from_names(ds.names());
  RunConfig cfg;
  const LearnResult one = learn_structure(ds, tc, cfg);
  for (int w : {2, 4}) {
    cfg.workers = w;
    const LearnResult other = learn_structure(ds, tc, cfg);
    EXPECT_EQ(other.estimate, one.estimate);
    EXPECT_EQ(*other.clusters, *one.clusters);
  }
}

TEST(Learn, SingleClusterIsLearnerPlusFusion) {
  const Instance inst = small_instance(3, 8, 300);
  const StaticDataset ds = learning_data(inst.data, Mode::Initial);
  RunConfig cfg;
  cfg.p_max = 1;
  const LearnResult r = learn_structure(ds, TemporalConstraints{}, cfg);
  ASSERT_EQ(r.clusters->cluster_count(), 1);

  const std::vector<Pdag> subs{pc_stable(ds, LearnerConfig{})};
  FusionConfig fc;
  fc.lambda = choose_lambda(ds.cols(), ds.rows());
  const FusionResult f = fuse(ds, subs, ClusterAssignment::single(ds.cols()), fc,
                              TemporalConstraints{});
  EXPECT_EQ(r.estimate, f.dag.graph());
}

TEST(Learn, BaselineHasNoUndirectedEdges) {
  const Instance inst = small_instance(3, 9, 300);
  const StaticDataset ds = learning_data(inst.data, Mode::Initial);
  RunConfig cfg;
  cfg.method = Method::Baseline;
  const LearnResult r = learn_structure(ds, TemporalConstraints{}, cfg);
  EXPECT_FALSE(r.clusters.has_value());
  EXPECT_EQ(r.estimate.undirected_count(), 0u);
  EXPECT_GT(r.estimate.edge_count(), 0u);
}

TEST(Learn, TimeoutAborts) {
  const Instance inst = small_instance(40, 10, 400);
  const StaticDataset ds = learning_data(inst.data, Mode::Transition);
  RunConfig cfg;
  cfg.timeout_seconds = 1e-6;
  EXPECT_THROW(learn_structure(ds, *TemporalConstraints::from_names(ds.names()), cfg),
               TimeoutError);
}

TEST(Learn, TierCountMismatchIsDataError) {
  const Instance inst = small_instance(2, 11, 50);
  const StaticDataset ds = learning_data(inst.data, Mode::Initial);
  EXPECT_THROW(learn_structure(ds, TemporalConstraints({Tier::Past, Tier::Future}), RunConfig{}),
               DataError);
}

TEST(Pipeline, RowsAndAggregation) {
  PipelineConfig cfg;
  cfg.base = "cancer5";
  cfg.instance.generator.copies = 4;
  cfg.instance.sequences = 200;
  cfg.repeats = 3;
  cfg.run.seed = 12;
  const auto rows = run_pipeline(builtin_network("cancer5").dag, cfg);
  ASSERT_EQ(rows.size(), 4u);
  for (const PipelineRow& row : rows) {
    EXPECT_EQ(row.instance, "cancer5x4");
    EXPECT_EQ(row.repeats, 3);
    EXPECT_EQ(row.timeouts, 0);
    EXPECT_GT(row.f1_adjacent.mean, 0.0);
    EXPECT_LE(row.f1_adjacent.mean, 1.0);
    EXPECT_GE(row.f1_adjacent.sd, 0.0);
    EXPECT_GT(row.runtime_seconds.mean, 0.0);
  }
  EXPECT_EQ(rows[0].mode, Mode::Initial);
  EXPECT_EQ(rows[0].variables, 20);
  EXPECT_EQ(rows[2].variables, 40);
  EXPECT_EQ(rows[1].method, Method::Baseline);

  const auto again = run_pipeline(builtin_network("cancer5").dag, cfg);
  EXPECT_EQ(again[0].f1_adjacent.mean, rows[0].f1_adjacent.mean);
  EXPECT_EQ(again[3].f1_arrowhead.sd, rows[3].f1_arrowhead.sd);

  cfg.repeats = 0;
  EXPECT_THROW(run_pipeline(builtin_network("cancer5").dag, cfg), ConfigError);
}

TEST(Pipeline, TimeoutsScoreZero) {
  PipelineConfig cfg;
  cfg.instance.generator.copies = 30;
  cfg.instance.sequences = 300;
  cfg.modes = {Mode::Transition};
  cfg.methods = {Method::Pef};
  cfg.run.timeout_seconds = 1e-6;
  const auto rows = run_pipeline(builtin_network("cancer5").dag, cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].timeouts, 1);
  EXPECT_EQ(rows[0].f1_adjacent.mean, 0.0);
}

}  // namespace
}  // namespace pef
