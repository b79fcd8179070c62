#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "vpw/cem.hpp"
#include "vpw/harness/runner.hpp"

namespace vpw::harness {

struct TuneSpec {
  std::string env = "lqg";
  nlohmann::json env_params = nlohmann::json::object();
  long queries = 100;
  // > 0 switches to a per-step time budget
  double seconds = 0.0;
  int eval_episodes = 10;
  int population = 20;
  double elite_fraction = 0.2;
  int iterations = 5;
  std::uint64_t seed = 0;
  int threads = 1;
  int particles = 1000;
  int max_steps = 0;
};

struct TuneHistoryRow {
  std::string phase;
  CemIteration iteration;
  std::vector<std::string> names;
};

struct TuneResult {
  SolverParams pomcpow;
  SolverParams vomcpow;
  double pomcpow_score = 0.0;
  double vomcpow_score = 0.0;
  std::vector<TuneHistoryRow> history;
};

/// Mean total reward of `solver` with `params` on a fixed evaluation batch.
/// Every candidate sees the same episode seeds.
inline double evaluate_params(const TuneSpec& tune, const std::string& solver, const SolverParams& params) {
  ExperimentSpec spec;
  spec.env = tune.env;
  spec.env_params = tune.env_params;
  spec.solver = solver;
  spec.solver_params = params;
  if (tune.seconds > 0.0) spec.time_budgets = {tune.seconds};
  else spec.query_budgets = {tune.queries};
  spec.episodes = tune.eval_episodes;
  spec.seed = tune.seed;
  spec.threads = tune.threads;
  spec.particles = tune.particles;
  spec.max_steps = tune.max_steps;
  spec.timing = false;
  const auto result = run_experiment(spec);
  const auto& s = result.summaries.front();
  if (s.failures > 0) throw std::runtime_error("evaluation episode failed");
  return s.reward.mean;
}

/// Two phases: tune POMCPOW's (c, k_a, alpha_a, k_o, alpha_o), then start
/// VOMCPOW from that optimum with omega added. The VOO covariance is never
/// tuned; it comes from the environment's preset.
inline TuneResult tune_solvers(const TuneSpec& tune) {
  ExperimentSpec probe;
  probe.env = tune.env;
  probe.solver = "pomcpow";
  validate(probe);
  const SolverParams start = resolve_params(probe);

  auto shared = [&](const SolverParams& p) {
    return std::vector<CemParameter>{
        {"c", 0.1, 500.0, true, p.c, 1.0},
        {"k_a", 0.5, 100.0, true, p.k_a, 0.7},
        {"alpha_a", 0.0, 1.0, false, p.alpha_a, 0.2},
        {"k_o", 0.5, 100.0, true, p.k_o, 0.7},
        {"alpha_o", 0.0, 1.0, false, p.alpha_o, 0.2},
    };
  };
  auto apply = [](SolverParams p, const std::vector<double>& x) {
    p.c = x[0];
    p.k_a = x[1];
    p.alpha_a = x[2];
    p.k_o = x[3];
    p.alpha_o = x[4];
    if (x.size() > 5) p.omega = x[5];
    return p;
  };
  auto names = [](const std::vector<CemParameter>& ps) {
    std::vector<std::string> n;
    for (const auto& p : ps) n.push_back(p.name);
    return n;
  };

  TuneResult result;
  Rng rng(tune.seed);

  CemSpec phase1;
  phase1.parameters = shared(start);
  phase1.population = tune.population;
  phase1.elite_fraction = tune.elite_fraction;
  phase1.iterations = tune.iterations;
  phase1.objective = [&](const std::vector<double>& x, Rng&) {
    return evaluate_params(tune, "pomcpow", apply(start, x));
  };
  const auto r1 = cem_optimize(phase1, rng);
  result.pomcpow = apply(start, r1.best_params);
  result.pomcpow_score = r1.best_score;
  for (const auto& it : r1.history) result.history.push_back({"pomcpow", it, names(phase1.parameters)});

  ExperimentSpec vprobe = probe;
  vprobe.solver = "vomcpow";
  SolverParams vstart = result.pomcpow;
  vstart.omega = resolve_params(vprobe).omega;
  vstart.sigma2 = resolve_params(vprobe).sigma2;

  CemSpec phase2 = phase1;
  phase2.parameters = shared(vstart);
  phase2.parameters.push_back({"omega", 0.0, 1.0, false, vstart.omega, 0.2});
  phase2.objective = [&](const std::vector<double>& x, Rng&) {
    return evaluate_params(tune, "vomcpow", apply(vstart, x));
  };
  const auto r2 = cem_optimize(phase2, rng);
  result.vomcpow = apply(vstart, r2.best_params);
  result.vomcpow_score = r2.best_score;
  for (const auto& it : r2.history) result.history.push_back({"vomcpow", it, names(phase2.parameters)});
  return result;
}

inline void write_tune_history_csv(std::ostream& os, const std::vector<TuneHistoryRow>& rows) {
  os << "phase,iteration,elite_mean_score,best_score,failures,mean\n";
  for (const auto& r : rows) {
    std::string mean;
    for (std::size_t i = 0; i < r.names.size(); ++i) {
      mean += (i ? ";" : "") + r.names[i] + "=" + fmt(r.iteration.mean[i]);
    }
    os << r.phase << ',' << r.iteration.iteration << ',' << fmt(r.iteration.elite_mean_score) << ','
       << fmt(r.iteration.best_score) << ',' << r.iteration.failures << ',' << mean << '\n';
  }
}

}  // namespace vpw::harness
