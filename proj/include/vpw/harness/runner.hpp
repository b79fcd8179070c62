#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "vpw/belief.hpp"
#include "vpw/harness/parallel.hpp"
#include "vpw/harness/spec.hpp"
#include "vpw/mcts.hpp"
#include "vpw/rng.hpp"
#include "vpw/sparse.hpp"

namespace vpw::harness {

inline constexpr const char* kCsvHeader =
    "episode,seed,env,solver,budget_kind,budget,total_reward,plan_seconds_mean,first_action,distance_to_opt,steps,"
    "termination";

struct EpisodeResult {
  int episode = 0;
  std::uint64_t seed = 0;
  std::string env;
  std::string solver;
  std::string budget_kind;
  std::string budget;
  double total_reward = 0.0;
  std::optional<double> plan_seconds_mean;
  std::optional<Action> first_action;
  std::optional<double> distance_to_opt;
  int steps = 0;
  std::string termination;
};

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt_action(const Action& a) {
  std::string out;
  for (double x : a.continuous) out += (out.empty() ? "" : ";") + fmt(x);
  for (int l : a.discrete) out += (out.empty() ? "" : ";") + std::to_string(l);
  return out;
}

/// Strips characters that would break the comma-separated layout.
inline std::string csv_safe(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  }
  return s;
}

inline std::string csv_row(const EpisodeResult& r) {
  std::ostringstream os;
  os << r.episode << ',' << r.seed << ',' << r.env << ',' << r.solver << ',' << r.budget_kind << ',' << r.budget
     << ',' << fmt(r.total_reward) << ',' << (r.plan_seconds_mean ? fmt(*r.plan_seconds_mean) : "") << ','
     << (r.first_action ? fmt_action(*r.first_action) : "") << ','
     << (r.distance_to_opt ? fmt(*r.distance_to_opt) : "") << ',' << r.steps << ',' << csv_safe(r.termination);
  return os.str();
}

struct BudgetPoint {
  std::string kind;  // queries | seconds | none
  std::string label;
  SearchBudget budget = QueryBudget{};
};

inline std::vector<BudgetPoint> budget_points(const ExperimentSpec& spec) {
  if (!is_tree_solver(spec.solver)) return {{"none", "", QueryBudget{}}};
  std::vector<BudgetPoint> out;
  for (long q : spec.query_budgets) out.push_back({"queries", std::to_string(q), QueryBudget{q}});
  for (double t : spec.time_budgets) out.push_back({"seconds", fmt(t), TimeBudget{t}});
  if (out.empty()) out.push_back({"queries", "1000", QueryBudget{1000}});
  return out;
}

/// Bootstrap particle filter: propagate through G, weight by Z on the real
/// observation, systematic resampling when ESS < N / 2.
template <GenerativeProblem P>
class BootstrapFilter {
 public:
  using State = typename P::State;

  BootstrapFilter(const P& problem, WeightedParticleBelief<State> belief)
      : problem_(problem), belief_(std::move(belief)) {}

  [[nodiscard]] const WeightedParticleBelief<State>& belief() const { return belief_; }

  /// Returns false when every particle has zero likelihood.
  bool update(const Action& a, const typename P::Observation& o, Rng& rng) {
    const std::size_t n = belief_.size();
    WeightedParticleBelief<State> next;
    next.reserve(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto tr = problem_.generate(belief_.particles[i], a, rng);
      const double w = belief_.weights[i] * problem_.obs_density(o, a, tr.state);
      next.add(std::move(tr.state), w);
      total += w;
    }
    if (!(total > 0.0) || !std::isfinite(total)) return false;
    for (auto& w : next.weights) w /= total;
    belief_ = std::move(next);
    if (effective_sample_size(belief_.weights) < 0.5 * static_cast<double>(n)) resample(rng);
    return true;
  }

  void reset(WeightedParticleBelief<State> b) { belief_ = std::move(b); }

 private:
  void resample(Rng& rng) {
    const std::size_t n = belief_.size();
    WeightedParticleBelief<State> out;
    out.reserve(n);
    const double step = 1.0 / static_cast<double>(n);
    double u = rng.uniform() * step;
    double c = belief_.weights[0];
    std::size_t i = 0;
    for (std::size_t j = 0; j < n; ++j) {
      while (u > c && i + 1 < n) c += belief_.weights[++i];
      out.add(belief_.particles[i], step);
      u += step;
    }
    belief_ = std::move(out);
  }

  const P& problem_;
  WeightedParticleBelief<State> belief_;
};

/// C equally weighted particles drawn proportionally from `b`.
template <class State>
WeightedParticleBelief<State> subsample(const WeightedParticleBelief<State>& b, std::size_t count, Rng& rng) {
  const ProportionalSampler draw(b.weights);
  WeightedParticleBelief<State> out;
  out.reserve(count);
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) out.add(b.particles[draw(rng)], w);
  return out;
}

struct EpisodeContext {
  const ExperimentSpec* spec = nullptr;
  SolverParams params;
  BudgetPoint budget;
  int max_steps = 1;
};

template <GenerativeProblem P, class Policy>
Action choose(const P& problem, const Policy& policy, const EpisodeContext& ctx,
              const WeightedParticleBelief<typename P::State>& belief, const typename P::State& true_state,
              Rng& rng) {
  const std::string& solver = ctx.spec->solver;
  if (solver == "rollout-only") {
    Action a = policy(problem.point_estimate(belief));
    problem.action_space().project(a);
    return a;
  }
  if (solver == "vowss") {
    const auto root = subsample(belief, static_cast<std::size_t>(ctx.params.state_width), rng);
    return vowss_plan(root, problem, sparse_config(ctx.params), rng);
  }
  if (solver == "voss") {
    if constexpr (P::is_mdp) {
      return voss_plan(true_state, problem, sparse_config(ctx.params), rng);
    } else {
      throw SpecError("voss needs a fully observable env");
    }
  }
  const auto cfg = mcts_config(ctx.params, ctx.budget.budget);
  const auto kind = solver == "pomcpow" ? WideningKind::kUniform : WideningKind::kVoronoi;
  MctsPlanner<P, Policy> planner(problem, cfg, policy, kind);
  return planner.plan(belief, rng);
}

struct NoStepObserver {
  template <class State, class T>
  void operator()(const State&, const Action&, const T&) const {}
};

/// One seeded episode: plan, act in the true environment, filter.
/// `observe(state, action, transition)` sees every real step.
template <GenerativeProblem P, class Policy, class Observer = NoStepObserver>
EpisodeResult run_episode(const P& problem, const Policy& policy, const std::optional<Action>& optimum,
                          const EpisodeContext& ctx, int episode, Observer observe = {}) {
  const ExperimentSpec& spec = *ctx.spec;
  EpisodeResult res;
  res.episode = episode;
  res.seed = spec.seed + static_cast<std::uint64_t>(episode);
  res.env = spec.env;
  res.solver = spec.solver;
  res.budget_kind = ctx.budget.kind;
  res.budget = ctx.budget.label;

  Rng env_rng = role_stream(res.seed, StreamRole::kEnvironment);
  Rng filter_rng = role_stream(res.seed, StreamRole::kFilter);
  Rng plan_rng = role_stream(res.seed, StreamRole::kPlanner);
  Rng init_rng = role_stream(res.seed, StreamRole::kInitialBelief);

  using State = typename P::State;
  State state = problem.initial_state(env_rng);
  WeightedParticleBelief<State> initial;
  if constexpr (P::is_mdp) {
    initial.add(state, 1.0);
  } else {
    initial = init_root_belief(problem, static_cast<std::size_t>(spec.particles), init_rng);
  }
  BootstrapFilter<P> filter(problem, std::move(initial));

  const double gamma = problem.discount();
  double discount = 1.0;
  double plan_seconds = 0.0;
  res.termination = "max-steps";
  try {
    while (res.steps < ctx.max_steps) {
      if (problem.is_terminal(state)) {
        res.termination = "terminal";
        break;
      }
      const auto t0 = std::chrono::steady_clock::now();
      const Action a = choose(problem, policy, ctx, filter.belief(), state, plan_rng);
      plan_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (res.steps == 0) {
        res.first_action = a;
        if (optimum) res.distance_to_opt = problem.action_space().distance(a, *optimum);
      }
      auto tr = problem.generate(state, a, env_rng);
      observe(state, a, tr);
      res.total_reward += discount * tr.reward;
      discount *= gamma;
      ++res.steps;
      state = tr.state;
      if constexpr (P::is_mdp) {
        WeightedParticleBelief<State> b;
        b.add(tr.observation, 1.0);
        filter.reset(std::move(b));
      } else {
        if (problem.is_terminal(state)) continue;
        if (res.steps < ctx.max_steps && !filter.update(a, tr.observation, filter_rng)) {
          res.termination = "filter-degenerate";
          break;
        }
      }
    }
    if (res.termination == "max-steps" && problem.is_terminal(state)) res.termination = "terminal";
  } catch (const std::exception& e) {
    res.termination = std::string("error: ") + e.what();
  }
  if (spec.timing && res.steps > 0) res.plan_seconds_mean = plan_seconds / res.steps;
  return res;
}

struct MetricSummary {
  std::size_t n = 0;
  double mean = 0.0;
  // empty when n < 2
  std::optional<double> stderr_;
};

inline MetricSummary summarize_values(const std::vector<double>& v) {
  MetricSummary s;
  s.n = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
  }
  return s;
}

struct BudgetSummary {
  std::string budget_kind;
  std::string budget;
  MetricSummary reward;
  MetricSummary distance;
  std::size_t failures = 0;
};

struct ExperimentResult {
  std::vector<EpisodeResult> rows;
  std::vector<BudgetSummary> summaries;
};

inline std::vector<BudgetSummary> summarize_budgets(const std::vector<BudgetPoint>& budgets,
                                                    const std::vector<EpisodeResult>& rows) {
  std::vector<BudgetSummary> out;
  for (const auto& b : budgets) {
    BudgetSummary s{b.kind, b.label, {}, {}, 0};
    std::vector<double> rewards;
    std::vector<double> distances;
    for (const auto& r : rows) {
      if (r.budget_kind != b.kind || r.budget != b.label) continue;
      if (r.termination.rfind("error", 0) == 0) {
        ++s.failures;
        continue;
      }
      rewards.push_back(r.total_reward);
      if (r.distance_to_opt) distances.push_back(*r.distance_to_opt);
    }
    s.reward = summarize_values(rewards);
    s.distance = summarize_values(distances);
    out.push_back(std::move(s));
  }
  return out;
}

/// Runs every (budget, episode) pair; rows come back sorted by budget
/// order then episode, independent of the thread count.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const auto budgets = budget_points(spec);
  EpisodeContext base;
  base.spec = &spec;
  base.params = resolve_params(spec);
  base.max_steps = spec.max_steps > 0 ? spec.max_steps : default_max_steps(spec);

  const auto episodes = static_cast<std::size_t>(spec.episodes);
  ExperimentResult result;
  result.rows.resize(budgets.size() * episodes);
  with_problem(spec, [&](const auto& problem, const auto& policy, const std::optional<Action>& optimum) {
    parallel_for(result.rows.size(), spec.threads, [&](std::size_t k) {
      EpisodeContext ctx = base;
      ctx.budget = budgets[k / episodes];
      result.rows[k] = run_episode(problem, policy, optimum, ctx, static_cast<int>(k % episodes));
    });
    return 0;
  });
  result.summaries = summarize_budgets(budgets, result.rows);
  return result;
}

inline void write_csv(std::ostream& os, const std::vector<EpisodeResult>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << csv_row(r) << '\n';
}

inline void write_csv(const std::string& path, const std::vector<EpisodeResult>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(f, rows);
}

/// Spec with the preset and defaults resolved, for provenance.
inline nlohmann::json resolved_config(const ExperimentSpec& spec) {
  nlohmann::json j = spec;
  j["resolved_preset"] = implied_preset(spec);
  j["resolved_solver_params"] = resolve_params(spec);
  j["resolved_rollout_policy"] = spec.rollout_policy.empty() ? default_rollout_policy(spec.env) : spec.rollout_policy;
  j["resolved_max_steps"] = spec.max_steps > 0 ? spec.max_steps : default_max_steps(spec);
  with_problem(spec, [&](const auto& problem, const auto&, const auto&) {
    j["resolved_env_params"] = problem.params();
    return 0;
  });
  return j;
}

inline void print_summary(std::ostream& os, const ExperimentSpec& spec, const std::vector<BudgetSummary>& sums) {
  for (const auto& s : sums) {
    os << spec.env << ' ' << spec.solver;
    if (s.budget_kind != "none") os << ' ' << s.budget << ' ' << s.budget_kind;
    os << ": reward " << fmt(s.reward.mean) << " +- " << (s.reward.stderr_ ? fmt(*s.reward.stderr_) : "n/a")
       << " (n=" << s.reward.n << ')';
    if (s.distance.n > 0) {
      os << ", distance " << fmt(s.distance.mean) << " +- "
         << (s.distance.stderr_ ? fmt(*s.distance.stderr_) : "n/a");
    }
    if (s.failures > 0) os << ", failures " << s.failures;
    os << '\n';
  }
}

}  // namespace vpw::harness
