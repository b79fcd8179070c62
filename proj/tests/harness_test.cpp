#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "vpw/harness.hpp"

namespace vpw::harness {
namespace {

ExperimentSpec small_lqg(const std::string& solver, int episodes) {
  ExperimentSpec spec;
  spec.env = "lqg";
  spec.solver = solver;
  spec.query_budgets = {50};
  spec.episodes = episodes;
  spec.seed = 11;
  spec.particles = 500;
  spec.timing = false;
  return spec;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  write_csv(os, r.rows);
  return os.str();
}

TEST(Harness, ZeroEpisodesGivesHeaderOnly) {
  const auto r = run_experiment(small_lqg("vomcpow", 0));
  EXPECT_EQ(csv_of(r), std::string(kCsvHeader) + "\n");
}

TEST(Harness, RerunIsByteIdentical) {
  const auto spec = small_lqg("vomcpow", 3);
  EXPECT_EQ(csv_of(run_experiment(spec)), csv_of(run_experiment(spec)));
}

TEST(Harness, ParallelMatchesSerial) {
  auto spec = small_lqg("pomcpow", 6);
  spec.query_budgets = {20, 40};
  const std::string serial = csv_of(run_experiment(spec));
  spec.threads = 3;
  EXPECT_EQ(csv_of(run_experiment(spec)), serial);
}

TEST(Harness, RowsCarrySeedAndDistance) {
  const auto r = run_experiment(small_lqg("vomcpow", 2));
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.seed, 11u + static_cast<std::uint64_t>(row.episode));
    EXPECT_EQ(row.budget_kind, "queries");
    EXPECT_EQ(row.budget, "50");
    ASSERT_TRUE(row.first_action.has_value());
    EXPECT_EQ(row.first_action->continuous.size(), 2u);
    ASSERT_TRUE(row.distance_to_opt.has_value());
    EXPECT_FALSE(row.plan_seconds_mean.has_value());
    EXPECT_EQ(row.steps, 2);
    EXPECT_TRUE(std::isfinite(row.total_reward));
  }
}

TEST(Harness, TimingColumnFilledWhenEnabled) {
  auto spec = small_lqg("rollout-only", 1);
  spec.timing = true;
  const auto r = run_experiment(spec);
  ASSERT_TRUE(r.rows[0].plan_seconds_mean.has_value());
  EXPECT_GE(*r.rows[0].plan_seconds_mean, 0.0);
  EXPECT_EQ(r.rows[0].budget_kind, "none");
}

TEST(Harness, EverySolverRunsOnItsEnvs) {
  for (const std::string solver : {"vowss", "pomcpow", "vomcpow", "rollout-only"}) {
    auto spec = small_lqg(solver, 1);
    if (solver == "vowss") spec.solver_params = {{"state_width", 2}, {"action_width", 8}};
    const auto r = run_experiment(spec);
    EXPECT_EQ(r.summaries.front().failures, 0u) << solver << ": " << r.rows[0].termination;
  }
  ExperimentSpec voss;
  voss.env = "quadratic-mdp";
  voss.solver = "voss";
  voss.episodes = 1;
  voss.solver_params = {{"state_width", 1}, {"action_width", 20}, {"depth", 1}};
  const auto r = run_experiment(voss);
  EXPECT_EQ(r.rows[0].termination, "max-steps");
}

TEST(Harness, VdpAndLanderShortEpisodes) {
  for (const std::string env : {"vdp-tag", "lander"}) {
    ExperimentSpec spec;
    spec.env = env;
    spec.solver = "vomcpow";
    spec.query_budgets = {30};
    spec.episodes = 1;
    spec.max_steps = 3;
    spec.particles = 300;
    const auto r = run_experiment(spec);
    EXPECT_EQ(r.summaries.front().failures, 0u) << env << ": " << r.rows[0].termination;
    EXPECT_LE(r.rows[0].steps, 3);
    EXPECT_FALSE(r.rows[0].distance_to_opt.has_value());
  }
}

TEST(Harness, PresetsMatchTable) {
  const auto& t = presets();
  const auto& v = t.at("lqg-vomcpow").params;
  EXPECT_EQ(v.c, 60.0);
  EXPECT_EQ(v.k_a, 25.0);
  EXPECT_EQ(v.alpha_a, 1 / 5.5);
  EXPECT_EQ(v.k_o, 25.0);
  EXPECT_EQ(v.alpha_o, 1 / 2.5);
  EXPECT_EQ(v.omega, 0.8);
  EXPECT_EQ(v.sigma2, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(t.at("lqg-pomcpow").params.c, 65.0);
  EXPECT_EQ(t.at("lqg-pomcpow").params.alpha_a, 1 / 2.5);
  EXPECT_EQ(t.at("vdp-pomcpow").params.c, 110.0);
  EXPECT_EQ(t.at("vdp-pomcpow").params.alpha_o, 1 / 100.0);
  EXPECT_EQ(t.at("vdp-vomcpow").params.omega, 0.7);
  EXPECT_EQ(t.at("vdp-vomcpow").params.sigma2, std::vector<double>{0.1});
  EXPECT_EQ(t.at("lander-pomcpow").params.k_a, 3.0);
  EXPECT_EQ(t.at("lander-vomcpow").params.omega, 0.9);
  EXPECT_EQ(t.at("lander-vomcpow").params.sigma2, (std::vector<double>{0.2, 0.5, 0.05}));
  EXPECT_EQ(t.at("lqg-vowss").params.action_width_decay, 0.4);
  EXPECT_EQ(t.size(), 7u);
}

TEST(Harness, OverridesMergeOverPreset) {
  ExperimentSpec spec;
  spec.solver_params = {{"c", 3.0}};
  const auto p = resolve_params(spec);
  EXPECT_EQ(p.c, 3.0);
  EXPECT_EQ(p.k_a, 25.0);
  spec.solver_params = {{"bogus", 1}};
  EXPECT_THROW(resolve_params(spec), SpecError);
}

TEST(Harness, InvalidSpecsThrow) {
  auto bad = [](auto mutate) {
    ExperimentSpec s;
    mutate(s);
    return s;
  };
  EXPECT_THROW(validate(bad([](auto& s) { s.env = "cartpole"; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.solver = "dqn"; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.episodes = -1; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.query_budgets = {0}; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.time_budgets = {-1.0}; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.preset = "vdp-vomcpow"; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.solver = "voss"; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.rollout_policy = "to-target"; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.env_params = {{"nope", 1}}; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.solver_params = {{"sigma2", {0.5}}}; })), SpecError);
  EXPECT_THROW(validate(bad([](auto& s) { s.solver_params = {{"omega", 1.5}}; })), SpecError);
  EXPECT_NO_THROW(validate(ExperimentSpec{}));
}

TEST(Harness, ResolvedConfigRecordsPreset) {
  ExperimentSpec spec;
  spec.env = "vdp-tag";
  spec.solver = "pomcpow";
  const auto j = resolved_config(spec);
  EXPECT_EQ(j.at("resolved_preset"), "vdp-pomcpow");
  EXPECT_EQ(j.at("resolved_solver_params").at("c"), 110.0);
  EXPECT_EQ(j.at("resolved_rollout_policy"), "to-target");
  EXPECT_TRUE(j.at("resolved_env_params").contains("mu"));
}

std::string episode_csv(const std::vector<std::pair<std::string, std::string>>& solver_reward) {
  std::string s = std::string(kCsvHeader) + "\n";
  int i = 0;
  for (const auto& [solver, reward] : solver_reward) {
    s += std::to_string(i) + "," + std::to_string(i) + ",lqg," + solver + ",queries,100," + reward +
         ",,1;2,,2,max-steps\n";
    ++i;
  }
  return s;
}

TEST(Summarize, TwoRowsMeanAndStderr) {
  std::istringstream in(episode_csv({{"a", "1"}, {"a", "3"}}));
  const auto rows = summarize(in, {"solver"});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].stats.n, 2u);
  EXPECT_DOUBLE_EQ(rows[0].stats.mean, 2.0);
  ASSERT_TRUE(rows[0].stats.stderr_.has_value());
  EXPECT_DOUBLE_EQ(*rows[0].stats.stderr_, 1.0);
}

TEST(Summarize, SingleRowHasEmptyStderr) {
  std::istringstream in(episode_csv({{"a", "5"}}));
  const auto rows = summarize(in, {"solver"});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].stats.stderr_.has_value());
  std::ostringstream os;
  write_summary_csv(os, {"solver"}, rows);
  EXPECT_EQ(os.str(), "solver,metric,count,mean,stderr\na,total_reward,1,5,\n");
}

TEST(Summarize, GroupsInFirstSeenOrder) {
  std::istringstream in(episode_csv({{"b", "1"}, {"a", "2"}, {"b", "3"}}));
  const auto rows = summarize(in, {"solver", "budget"});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].group, (std::vector<std::string>{"b", "100"}));
  EXPECT_DOUBLE_EQ(rows[0].stats.mean, 2.0);
  EXPECT_EQ(rows[1].group, (std::vector<std::string>{"a", "100"}));
  std::ostringstream text;
  write_summary_text(text, {"solver", "budget"}, rows);
  EXPECT_NE(text.str().find("solver  budget"), std::string::npos);
}

TEST(Summarize, EmptyMetricCellsSkipped) {
  std::istringstream in(episode_csv({{"a", "1"}}));
  const auto rows = summarize(in, {"solver"}, "distance_to_opt");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].stats.n, 0u);
}

TEST(Summarize, SchemaMismatch) {
  std::istringstream wrong_header("a,b,c\n1,2,3\n");
  EXPECT_THROW(summarize(wrong_header, {"solver"}), SchemaError);
  std::istringstream short_row(std::string(kCsvHeader) + "\n1,2,3\n");
  EXPECT_THROW(summarize(short_row, {"solver"}), SchemaError);
  std::istringstream bad_col(episode_csv({{"a", "1"}}));
  EXPECT_THROW(summarize(bad_col, {"colour"}), SchemaError);
  std::istringstream bad_value(episode_csv({{"a", "x"}}));
  EXPECT_THROW(summarize(bad_value, {"solver"}), SchemaError);
  std::istringstream empty("");
  EXPECT_THROW(summarize(empty, {"solver"}), SchemaError);
}

TEST(Summarize, RoundTripsRunnerOutput) {
  auto spec = small_lqg("pomcpow", 3);
  spec.query_budgets = {10, 20};
  std::istringstream in(csv_of(run_experiment(spec)));
  const auto rows = summarize(in, {"solver", "budget"});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].stats.n, 3u);
}

TEST(WidthSweep, SingleCellGivesOneRow) {
  WidthSweepSpec sweep;
  sweep.state_widths = {2};
  sweep.action_widths = {10};
  sweep.episodes = 10;
  sweep.particles = 200;
  const auto rows = vowss_width_sweep(sweep);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].distance.n, 10u);
  std::ostringstream a;
  write_width_sweep_csv(a, rows);
  std::ostringstream b;
  write_width_sweep_csv(b, vowss_width_sweep(sweep));
  EXPECT_EQ(a.str(), b.str());
}

TEST(WidthSweep, RejectsNonPositiveWidths) {
  WidthSweepSpec sweep;
  sweep.state_widths = {0};
  EXPECT_THROW(vowss_width_sweep(sweep), SpecError);
}

TEST(Tune, TinyRunProducesHistory) {
  TuneSpec tune;
  tune.queries = 10;
  tune.eval_episodes = 2;
  tune.population = 4;
  tune.elite_fraction = 0.5;
  tune.iterations = 1;
  tune.particles = 100;
  const auto r = tune_solvers(tune);
  ASSERT_EQ(r.history.size(), 2u);
  EXPECT_EQ(r.history[0].phase, "pomcpow");
  EXPECT_EQ(r.history[1].names.back(), "omega");
  EXPECT_GE(r.vomcpow.omega, 0.0);
  EXPECT_LE(r.vomcpow.omega, 1.0);
  EXPECT_EQ(r.vomcpow.sigma2, (std::vector<double>{0.5, 0.5}));
  std::ostringstream os;
  write_tune_history_csv(os, r.history);
  EXPECT_EQ(os.str().rfind("phase,iteration,", 0), 0u);
}

}  // namespace
}  // namespace vpw::harness
