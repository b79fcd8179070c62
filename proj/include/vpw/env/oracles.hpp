#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "vpw/action_space.hpp"
#include "vpw/belief.hpp"
#include "vpw/problem.hpp"
#include "vpw/rng.hpp"

namespace vpw::env {

/// s ~ N(0, 1) (static), a in [-2, 2], reward -(s - a)^2, one observation
/// o = s' + N(0, obs_variance), horizon 1. Q*(b0, a) = -(1 + a^2).
class OneStepGaussianPomdp {
 public:
  using State = double;
  using Observation = double;
  static constexpr bool is_mdp = false;

  explicit OneStepGaussianPomdp(double obs_variance = 0.25)
      : obs_sd_(std::sqrt(obs_variance)), space_(ActionSpace::box({{-2.0, 2.0}})) {}

  Transition<State, Observation> generate(const State& s, const Action& a, Rng& rng) const {
    const double d = s - a.continuous[0];
    return {s, s + rng.normal(0.0, obs_sd_), -d * d};
  }

  double obs_density(const Observation& o, const Action&, const State& next) const {
    const double z = (o - next) / obs_sd_;
    return std::exp(-0.5 * z * z) / (obs_sd_ * std::sqrt(2.0 * std::numbers::pi));
  }

  State initial_state(Rng& rng) const { return rng.normal(0.0, 1.0); }

  State point_estimate(const WeightedParticleBelief<State>& b) const {
    double m = 0.0;
    double t = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      m += b.weights[i] * b.particles[i];
      t += b.weights[i];
    }
    return t > 0.0 ? m / t : 0.0;
  }

  double discount() const { return 1.0; }
  std::optional<int> horizon() const { return 1; }
  const ActionSpace& action_space() const { return space_; }
  bool is_terminal(const State&) const { return false; }
  double obs_sd() const { return obs_sd_; }

 private:
  double obs_sd_;
  ActionSpace space_;
};

struct QuadraticMdpParams {
  double target = 0.3;
  // s' = s + a + N(0, transition_variance)
  double transition_variance = 0.0;
  // optional -state_cost * s^2 term in the reward
  double state_cost = 0.0;
  double action_bound = 1.0;
  int horizon = 2;
  double initial_state = 0.0;
};

/// 1-D MDP, s' = s + a (+ noise), reward -(a - target)^2 - state_cost s^2.
/// With the defaults V*_0 = 0 at a = 0.3 on every step.
class QuadraticMdp {
 public:
  using State = double;
  using Observation = double;
  static constexpr bool is_mdp = true;

  explicit QuadraticMdp(QuadraticMdpParams params = {})
      : params_(params), space_(ActionSpace::box({{-params.action_bound, params.action_bound}})) {}

  Transition<State, Observation> generate(const State& s, const Action& a, Rng& rng) const {
    const double u = a.continuous[0];
    double next = s + u;
    if (params_.transition_variance > 0.0) next += rng.normal(0.0, std::sqrt(params_.transition_variance));
    const double d = u - params_.target;
    return {next, next, -d * d - params_.state_cost * s * s};
  }

  double obs_density(const Observation&, const Action&, const State&) const { return 1.0; }
  State initial_state(Rng&) const { return params_.initial_state; }
  State point_estimate(const WeightedParticleBelief<State>& b) const {
    return b.empty() ? params_.initial_state : b.particles.front();
  }
  double discount() const { return 1.0; }
  std::optional<int> horizon() const { return params_.horizon; }
  const ActionSpace& action_space() const { return space_; }
  bool is_terminal(const State&) const { return false; }

  const QuadraticMdpParams& params() const { return params_; }

 private:
  QuadraticMdpParams params_;
  ActionSpace space_;
};

/// Constant action at the centre of the box; oracle problems need no policy.
struct CenterPolicy {
  Action center;
  Action operator()(const double&) const { return center; }
};

}  // namespace vpw::env
