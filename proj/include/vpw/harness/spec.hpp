#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpw/env/lander.hpp"
#include "vpw/env/lqg.hpp"
#include "vpw/env/oracles.hpp"
#include "vpw/env/vdp_tag.hpp"
#include "vpw/mcts.hpp"
#include "vpw/sparse.hpp"

namespace vpw::env {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LqgParams, initial_mean, sigma, horizon, action_bound)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(VdpTagParams, mu, agent_speed, dt, rk4_substeps, box, tag_radius,
                                                tag_reward, step_cost, look_cost, obs_sigma, look_obs_sigma,
                                                target_noise, discount, barrier_inner, barrier_outer, num_barriers)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LanderParams, dt, crash_penalty, gravity, mass, inertia, max_thrust,
                                                max_side_thrust, max_offset, accel_noise, rate_noise, obs_rate_sigma,
                                                obs_speed_sigma, obs_agl_sigma, max_landing_vy, max_landing_vx,
                                                max_landing_tilt, landing_zone, landing_reward, fuel_cost, x_bound,
                                                y_ceiling, init_y, init_vy, init_x_sigma, init_vx_sigma,
                                                init_tilt_sigma, discount, max_steps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(QuadraticMdpParams, target, transition_variance, state_cost,
                                                action_bound, horizon, initial_state)

}  // namespace vpw::env

namespace vpw::harness {

/// Thrown for unknown ids, bad counts and inconsistent settings.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& known_envs() {
  static const std::vector<std::string> ids{"lqg", "vdp-tag", "lander", "quadratic-mdp"};
  return ids;
}

inline const std::vector<std::string>& known_solvers() {
  static const std::vector<std::string> ids{"vowss", "voss", "pomcpow", "vomcpow", "rollout-only"};
  return ids;
}

/// Union of the hyperparameters of every solver; each solver reads its own.
struct SolverParams {
  // tree search
  double c = 1.0;
  double k_a = 1.0;
  double alpha_a = 0.5;
  double k_o = 1.0;
  double alpha_o = 0.5;
  int max_depth = 10;
  bool first_action_from_rollout = true;
  // VOO
  double omega = 0.8;
  // per-dimension proposal variances (diagonal covariance)
  std::vector<double> sigma2;
  int max_rejections = 20;
  // sparse sampling
  int state_width = 10;
  int action_width = 200;
  double action_width_decay = 1.0;
  int depth = 2;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SolverParams, c, k_a, alpha_a, k_o, alpha_o, max_depth,
                                                first_action_from_rollout, omega, sigma2, max_rejections,
                                                state_width, action_width, action_width_decay, depth)

struct Preset {
  std::string env;
  std::string solver;
  SolverParams params;
};

/// Published hyperparameter rows. Sigma entries are variances.
inline const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> table = [] {
    std::map<std::string, Preset> t;
    auto tree = [](double c, double k_a, double alpha_a, double k_o, double alpha_o, int depth, double omega,
                   std::vector<double> sigma2) {
      SolverParams p;
      p.c = c;
      p.k_a = k_a;
      p.alpha_a = alpha_a;
      p.k_o = k_o;
      p.alpha_o = alpha_o;
      p.max_depth = depth;
      p.omega = omega;
      p.sigma2 = std::move(sigma2);
      return p;
    };
    // POMCPOW rows carry the VOMCPOW sigma so the config still validates.
    t["lqg-pomcpow"] = {"lqg", "pomcpow", tree(65.0, 30.0, 1 / 2.5, 30.0, 1 / 4.0, 3, 1.0, {0.5, 0.5})};
    t["lqg-vomcpow"] = {"lqg", "vomcpow", tree(60.0, 25.0, 1 / 5.5, 25.0, 1 / 2.5, 3, 0.8, {0.5, 0.5})};
    t["vdp-pomcpow"] = {"vdp-tag", "pomcpow", tree(110.0, 30.0, 1 / 30.0, 5.0, 1 / 100.0, 10, 1.0, {0.1})};
    t["vdp-vomcpow"] = {"vdp-tag", "vomcpow", tree(85.0, 30.0, 1 / 30.0, 2.5, 1 / 100.0, 10, 0.7, {0.1})};
    t["lander-pomcpow"] = {"lander", "pomcpow", tree(10.0, 3.0, 1 / 4.0, 2.0, 1 / 10.0, 250, 1.0, {0.2, 0.5, 0.05})};
    t["lander-vomcpow"] = {"lander", "vomcpow", tree(30.0, 4.0, 1 / 4.0, 1.5, 1 / 5.0, 250, 0.9, {0.2, 0.5, 0.05})};
    SolverParams vowss;
    vowss.state_width = 10;
    vowss.action_width = 200;
    vowss.action_width_decay = 0.4;
    vowss.depth = 2;
    vowss.omega = 0.8;
    vowss.sigma2 = {0.5, 0.5};
    t["lqg-vowss"] = {"lqg", "vowss", vowss};
    return t;
  }();
  return table;
}

struct ExperimentSpec {
  std::string env = "lqg";
  // overrides of the environment parameter record
  nlohmann::json env_params = nlohmann::json::object();
  std::string solver = "vomcpow";
  // empty: "<env>-<solver>" when such a preset exists, else defaults
  std::string preset;
  // overrides applied on top of the preset
  nlohmann::json solver_params = nlohmann::json::object();
  std::vector<long> query_budgets;
  std::vector<double> time_budgets;
  int episodes = 10;
  std::uint64_t seed = 0;
  // empty: environment default
  std::string rollout_policy;
  std::string out;
  int threads = 1;
  // bootstrap filter size between steps
  int particles = 10000;
  // step cap; 0 uses the environment default
  int max_steps = 0;
  // record wall-clock planning time (the only non-reproducible column)
  bool timing = true;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ExperimentSpec, env, env_params, solver, preset, solver_params,
                                                query_budgets, time_budgets, episodes, seed, rollout_policy, out,
                                                threads, particles, max_steps, timing)

inline bool contains(const std::vector<std::string>& ids, const std::string& id) {
  for (const auto& s : ids) {
    if (s == id) return true;
  }
  return false;
}

inline std::size_t action_dims(const std::string& env) {
  if (env == "lqg") return 2;
  if (env == "vdp-tag") return 1;
  if (env == "lander") return 3;
  return 1;
}

inline std::string default_rollout_policy(const std::string& env) {
  if (env == "lqg") return "riccati";
  if (env == "vdp-tag") return "to-target";
  if (env == "lander") return "proportional";
  return "center";
}

inline int default_max_steps(const ExperimentSpec& spec) {
  if (spec.env == "lqg") return spec.env_params.value("horizon", env::LqgParams{}.horizon);
  if (spec.env == "vdp-tag") return 100;
  if (spec.env == "lander") return spec.env_params.value("max_steps", env::LanderParams{}.max_steps);
  return spec.env_params.value("horizon", env::QuadraticMdpParams{}.horizon);
}

inline bool is_tree_solver(const std::string& solver) { return solver == "pomcpow" || solver == "vomcpow"; }
inline bool is_sparse_solver(const std::string& solver) { return solver == "vowss" || solver == "voss"; }

inline std::string implied_preset(const ExperimentSpec& spec) {
  if (!spec.preset.empty()) return spec.preset;
  const std::string prefix = spec.env == "vdp-tag" ? "vdp" : spec.env;
  const std::string key = prefix + "-" + spec.solver;
  return presets().count(key) ? key : std::string{};
}

inline std::vector<double> default_sigma2(const std::string& env) {
  if (env == "lqg") return {0.5, 0.5};
  if (env == "vdp-tag") return {0.1};
  if (env == "lander") return {0.2, 0.5, 0.05};
  return {0.04};
}

/// Preset (explicit or implied by env and solver) with the solver_params
/// overrides merged in. Unknown override keys are rejected.
inline SolverParams resolve_params(const ExperimentSpec& spec) {
  SolverParams p;
  p.sigma2 = default_sigma2(spec.env);
  const std::string name = implied_preset(spec);
  if (!name.empty()) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw SpecError("unknown preset '" + name + "'");
    p = it->second.params;
  }
  if (!spec.solver_params.is_object()) throw SpecError("solver_params must be an object");
  if (!spec.solver_params.empty()) {
    nlohmann::json j = p;
    for (const auto& [key, value] : spec.solver_params.items()) {
      if (!j.contains(key)) throw SpecError("unknown solver parameter '" + key + "'");
    }
    j.merge_patch(spec.solver_params);
    try {
      p = j.get<SolverParams>();
    } catch (const nlohmann::json::exception& e) {
      throw SpecError(std::string("bad solver parameter: ") + e.what());
    }
  }
  return p;
}

inline VooConfig voo_config(const SolverParams& p) {
  VooConfig v;
  v.omega = p.omega;
  v.max_rejections = p.max_rejections;
  v.sigma.clear();
  for (double s2 : p.sigma2) v.sigma.push_back(std::sqrt(s2));
  return v;
}

inline VpwConfig vpw_config(const SolverParams& p, bool widen_unbounded) {
  VpwConfig v;
  v.c = p.c;
  v.k_a = p.k_a;
  v.alpha_a = p.alpha_a;
  v.voo = voo_config(p);
  v.widen_unbounded = widen_unbounded;
  return v;
}

inline MctsConfig mcts_config(const SolverParams& p, SearchBudget budget) {
  MctsConfig m;
  m.vpw = vpw_config(p, false);
  m.k_o = p.k_o;
  m.alpha_o = p.alpha_o;
  m.max_depth = p.max_depth;
  m.budget = budget;
  m.first_action_from_rollout = p.first_action_from_rollout;
  return m;
}

inline SparseConfig sparse_config(const SolverParams& p) {
  SparseConfig s;
  s.state_width = p.state_width;
  s.action_width = p.action_width;
  s.action_width_decay = p.action_width_decay;
  s.depth = p.depth;
  s.vpw = vpw_config(p, true);
  return s;
}

/// Environment parameter record with JSON overrides; unknown keys rejected.
template <class T>
T merged_params(const nlohmann::json& overrides) {
  nlohmann::json j = T{};
  for (const auto& [key, value] : overrides.items()) {
    if (!j.contains(key)) throw SpecError("unknown environment parameter '" + key + "'");
  }
  j.merge_patch(overrides);
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("bad environment parameter: ") + e.what());
  }
}

/// Calls fn(problem, policy, optimum) with the configured environment.
/// `optimum` is the analytic first action when one exists (LQG).
template <class Fn>
decltype(auto) with_problem(const ExperimentSpec& spec, Fn&& fn) {
  const std::string policy = spec.rollout_policy.empty() ? default_rollout_policy(spec.env) : spec.rollout_policy;
  if (spec.env == "lqg") {
    const env::LqgProblem p(merged_params<env::LqgParams>(spec.env_params));
    const std::optional<Action> opt = env::to_action(p.analytic_first_action());
    if (policy == "exact") return fn(p, env::LqgExactPolicy{p.params().horizon}, opt);
    return fn(p, env::LqgRiccatiPolicy{}, opt);
  }
  if (spec.env == "vdp-tag") {
    const env::VdpTagProblem p(merged_params<env::VdpTagParams>(spec.env_params));
    return fn(p, env::VdpToTargetPolicy{}, std::optional<Action>{});
  }
  if (spec.env == "lander") {
    const auto params = merged_params<env::LanderParams>(spec.env_params);
    const env::LanderProblem p(params);
    return fn(p, env::LanderProportionalPolicy{params}, std::optional<Action>{});
  }
  if (spec.env == "quadratic-mdp") {
    const env::QuadraticMdp p(merged_params<env::QuadraticMdpParams>(spec.env_params));
    return fn(p, env::CenterPolicy{Action{{0.0}, {}}}, std::optional<Action>{});
  }
  throw SpecError("unknown env '" + spec.env + "'");
}

inline ActionSpace env_action_space(const ExperimentSpec& spec) {
  return with_problem(spec, [](const auto& p, const auto&, const auto&) { return p.action_space(); });
}

/// Throws SpecError describing the first problem found.
inline void validate(const ExperimentSpec& spec) {
  if (!contains(known_envs(), spec.env)) throw SpecError("unknown env '" + spec.env + "'");
  if (!contains(known_solvers(), spec.solver)) throw SpecError("unknown solver '" + spec.solver + "'");
  if (!spec.preset.empty()) {
    const auto it = presets().find(spec.preset);
    if (it == presets().end()) throw SpecError("unknown preset '" + spec.preset + "'");
    if (it->second.env != spec.env) throw SpecError("preset '" + spec.preset + "' is for env " + it->second.env);
  }
  if (spec.solver == "voss" && spec.env != "quadratic-mdp") throw SpecError("voss needs a fully observable env");
  if (spec.episodes < 0) throw SpecError("episodes must be >= 0");
  if (spec.threads < 1) throw SpecError("threads must be >= 1");
  if (spec.particles < 1) throw SpecError("particles must be >= 1");
  if (spec.max_steps < 0) throw SpecError("max_steps must be >= 0");
  for (long q : spec.query_budgets) {
    if (q < 1) throw SpecError("query budgets must be positive");
  }
  for (double t : spec.time_budgets) {
    if (!(t > 0.0)) throw SpecError("time budgets must be positive");
  }
  if (!spec.env_params.is_object()) throw SpecError("env_params must be an object");
  const std::string policy = spec.rollout_policy.empty() ? default_rollout_policy(spec.env) : spec.rollout_policy;
  const bool policy_ok = (spec.env == "lqg" && (policy == "riccati" || policy == "exact")) ||
                         (spec.env == "vdp-tag" && policy == "to-target") ||
                         (spec.env == "lander" && policy == "proportional") ||
                         (spec.env == "quadratic-mdp" && policy == "center");
  if (!policy_ok) throw SpecError("rollout policy '" + policy + "' not available for env " + spec.env);

  const SolverParams p = resolve_params(spec);
  if (p.sigma2.size() != action_dims(spec.env)) throw SpecError("sigma2 needs one entry per continuous action dim");
  try {
    const ActionSpace space = env_action_space(spec);
    if (is_tree_solver(spec.solver)) mcts_config(p, QueryBudget{}).validate(space);
    if (is_sparse_solver(spec.solver)) sparse_config(p).validate(space);
    if (is_sparse_solver(spec.solver) && p.depth < 1) throw SpecError("sparse solvers need depth >= 1");
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    throw SpecError(e.what());
  }
}

}  // namespace vpw::harness
