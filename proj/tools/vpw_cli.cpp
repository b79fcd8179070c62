#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vpw/harness.hpp"

namespace {

using vpw::harness::ExperimentSpec;
using vpw::harness::SpecError;

ExperimentSpec load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SpecError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw SpecError("config " + path + " must be a JSON object");
  const nlohmann::json known = ExperimentSpec{};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw SpecError("unknown config key '" + key + "'");
  }
  try {
    return j.get<ExperimentSpec>();
  } catch (const nlohmann::json::exception& e) {
    throw SpecError("config " + path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
}

struct RunOptions {
  std::string config;
  std::string env;
  std::string solver;
  std::string preset;
  std::vector<long> queries;
  std::vector<double> seconds;
  int episodes = 0;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
  int particles = 0;
  int max_steps = 0;
  std::string rollout_policy;
  bool no_timing = false;
};

int run_command(const RunOptions& o, const CLI::App& cmd) {
  ExperimentSpec spec = o.config.empty() ? ExperimentSpec{} : load_config(o.config);
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--preset")) {
    spec.preset = o.preset;
    const auto it = vpw::harness::presets().find(o.preset);
    if (it == vpw::harness::presets().end()) throw SpecError("unknown preset '" + o.preset + "'");
    spec.env = it->second.env;
    spec.solver = it->second.solver;
  }
  if (given("--env")) spec.env = o.env;
  if (given("--solver")) spec.solver = o.solver;
  if (given("--queries")) spec.query_budgets = o.queries;
  if (given("--time")) spec.time_budgets = o.seconds;
  if (given("--episodes")) spec.episodes = o.episodes;
  if (given("--seed")) spec.seed = o.seed;
  if (given("--out")) spec.out = o.out;
  if (given("--threads")) spec.threads = o.threads;
  if (given("--particles")) spec.particles = o.particles;
  if (given("--max-steps")) spec.max_steps = o.max_steps;
  if (given("--rollout-policy")) spec.rollout_policy = o.rollout_policy;
  if (o.no_timing) spec.timing = false;

  vpw::harness::validate(spec);
  const auto config = vpw::harness::resolved_config(spec);
  const auto result = vpw::harness::run_experiment(spec);
  if (spec.out.empty()) {
    vpw::harness::write_csv(std::cout, result.rows);
    vpw::harness::print_summary(std::cerr, spec, result.summaries);
  } else {
    vpw::harness::write_csv(spec.out, result.rows);
    write_text(spec.out + ".config.json", config.dump(2) + "\n");
    vpw::harness::print_summary(std::cout, spec, result.summaries);
  }
  return 0;
}

struct SweepOptions {
  vpw::harness::WidthSweepSpec sweep;
  std::string out;
};

int sweep_command(const SweepOptions& o) {
  const auto rows = vpw::harness::vowss_width_sweep(o.sweep);
  if (o.out.empty()) {
    vpw::harness::write_width_sweep_csv(std::cout, rows);
    return 0;
  }
  std::ostringstream os;
  vpw::harness::write_width_sweep_csv(os, rows);
  write_text(o.out, os.str());
  nlohmann::json j{{"state_widths", o.sweep.state_widths},
                   {"action_widths", o.sweep.action_widths},
                   {"action_width_decay", o.sweep.action_width_decay},
                   {"episodes", o.sweep.episodes},
                   {"seed", o.sweep.seed},
                   {"threads", o.sweep.threads},
                   {"particles", o.sweep.particles}};
  write_text(o.out + ".config.json", j.dump(2) + "\n");
  std::cout << os.str();
  return 0;
}

struct TuneOptions {
  vpw::harness::TuneSpec tune;
  std::string out;
};

int tune_command(const TuneOptions& o) {
  const auto r = vpw::harness::tune_solvers(o.tune);
  const nlohmann::json best{{"pomcpow", r.pomcpow},
                            {"pomcpow_score", r.pomcpow_score},
                            {"vomcpow", r.vomcpow},
                            {"vomcpow_score", r.vomcpow_score}};
  if (!o.out.empty()) {
    std::ostringstream os;
    vpw::harness::write_tune_history_csv(os, r.history);
    write_text(o.out, os.str());
    write_text(o.out + ".best.json", best.dump(2) + "\n");
  }
  std::cout << best.dump(2) << '\n';
  return 0;
}

struct SummarizeOptions {
  std::string input;
  std::vector<std::string> group_by{"solver", "budget_kind", "budget"};
  std::string metric = "total_reward";
  std::string format = "text";
  std::string out;
};

int summarize_command(const SummarizeOptions& o) {
  const auto rows = vpw::harness::summarize_file(o.input, o.group_by, o.metric);
  std::ostringstream os;
  if (o.format == "csv") vpw::harness::write_summary_csv(os, o.group_by, rows);
  else vpw::harness::write_summary_text(os, o.group_by, rows);
  if (o.out.empty()) std::cout << os.str();
  else write_text(o.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voronoi progressive widening planners: experiment runner"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a seeded episode batch over a budget grid");
  run_cmd->add_option("--config", run.config, "JSON experiment spec; flags override its keys");
  run_cmd->add_option("--env", run.env, "lqg | vdp-tag | lander | quadratic-mdp");
  run_cmd->add_option("--solver", run.solver, "vowss | voss | pomcpow | vomcpow | rollout-only");
  run_cmd->add_option("--preset", run.preset, "named hyperparameter row; also sets env and solver");
  run_cmd->add_option("--queries", run.queries, "query budgets per step")->delimiter(',');
  run_cmd->add_option("--time", run.seconds, "planning seconds per step")->delimiter(',');
  run_cmd->add_option("--episodes", run.episodes);
  run_cmd->add_option("--seed", run.seed, "base seed; episode i uses seed + i");
  run_cmd->add_option("--out", run.out, "CSV path (stdout when omitted)");
  run_cmd->add_option("--threads", run.threads);
  run_cmd->add_option("--particles", run.particles, "belief filter size");
  run_cmd->add_option("--max-steps", run.max_steps);
  run_cmd->add_option("--rollout-policy", run.rollout_policy);
  run_cmd->add_flag("--no-timing", run.no_timing, "leave plan_seconds_mean empty");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep-vowss", "VOWSS state/action width grid on LQG");
  sweep_cmd->add_option("--state-widths", sweep.sweep.state_widths)->delimiter(',');
  sweep_cmd->add_option("--action-widths", sweep.sweep.action_widths)->delimiter(',');
  sweep_cmd->add_option("--decay", sweep.sweep.action_width_decay, "per-depth action width factor");
  sweep_cmd->add_option("--episodes", sweep.sweep.episodes);
  sweep_cmd->add_option("--seed", sweep.sweep.seed);
  sweep_cmd->add_option("--threads", sweep.sweep.threads);
  sweep_cmd->add_option("--particles", sweep.sweep.particles);
  sweep_cmd->add_option("--out", sweep.out);

  TuneOptions tune;
  auto* tune_cmd = app.add_subcommand("tune", "CEM over POMCPOW, then VOMCPOW from its optimum");
  tune_cmd->add_option("--env", tune.tune.env);
  tune_cmd->add_option("--queries", tune.tune.queries);
  tune_cmd->add_option("--time", tune.tune.seconds, "per-step seconds instead of queries");
  tune_cmd->add_option("--episodes", tune.tune.eval_episodes, "episodes per candidate");
  tune_cmd->add_option("--population", tune.tune.population);
  tune_cmd->add_option("--elite-fraction", tune.tune.elite_fraction);
  tune_cmd->add_option("--iterations", tune.tune.iterations);
  tune_cmd->add_option("--seed", tune.tune.seed);
  tune_cmd->add_option("--threads", tune.tune.threads);
  tune_cmd->add_option("--particles", tune.tune.particles);
  tune_cmd->add_option("--max-steps", tune.tune.max_steps);
  tune_cmd->add_option("--out", tune.out, "history CSV; best parameters go to <out>.best.json");

  SummarizeOptions summ;
  auto* summ_cmd = app.add_subcommand("summarize", "Group an episode CSV and report mean and stderr");
  summ_cmd->add_option("csv", summ.input)->required();
  summ_cmd->add_option("--group-by", summ.group_by)->delimiter(',');
  summ_cmd->add_option("--metric", summ.metric);
  summ_cmd->add_option("--format", summ.format)->check(CLI::IsMember({"text", "csv"}));
  summ_cmd->add_option("--out", summ.out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run_command(run, *run_cmd);
    if (*sweep_cmd) return sweep_command(sweep);
    if (*tune_cmd) return tune_command(tune);
    if (*summ_cmd) return summarize_command(summ);
  } catch (const SpecError& e) {
    std::cerr << "invalid spec: " << e.what() << '\n';
    return 2;
  } catch (const vpw::harness::SchemaError& e) {
    std::cerr << "schema mismatch: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
