#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "vpw/action_space.hpp"
#include "vpw/belief.hpp"
#include "vpw/env/lqg.hpp"
#include "vpw/problem.hpp"
#include "vpw/rng.hpp"

namespace vpw::env {

struct Segment {
  Vec2 a{};
  Vec2 b{};
};

/// Proper or touching intersection of segments pq and rs.
inline bool segments_intersect(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s) {
  auto cross = [](const Vec2& o, const Vec2& u, const Vec2& v) {
    return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0]);
  };
  auto on_segment = [](const Vec2& o, const Vec2& u, const Vec2& v) {
    return std::min(o[0], u[0]) <= v[0] && v[0] <= std::max(o[0], u[0]) && std::min(o[1], u[1]) <= v[1] &&
           v[1] <= std::max(o[1], u[1]);
  };
  const double d1 = cross(r, s, p);
  const double d2 = cross(r, s, q);
  const double d3 = cross(p, q, r);
  const double d4 = cross(p, q, s);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(r, s, p)) return true;
  if (d2 == 0 && on_segment(r, s, q)) return true;
  if (d3 == 0 && on_segment(p, q, r)) return true;
  if (d4 == 0 && on_segment(p, q, s)) return true;
  return false;
}

struct VdpTagParams {
  double mu = 2.0;
  // agent displacement per decision step
  double agent_speed = 1.0;
  // target integration time per decision step
  double dt = 0.5;
  int rk4_substeps = 10;
  double box = 4.0;
  double tag_radius = 0.1;
  double tag_reward = 100.0;
  double step_cost = 1.0;
  double look_cost = 5.0;
  double obs_sigma = 2.0;
  double look_obs_sigma = 0.1;
  double target_noise = 0.05;
  double discount = 0.95;
  // radial barriers along the axes, from barrier_inner to barrier_outer
  double barrier_inner = 0.2;
  double barrier_outer = 1.8;
  int num_barriers = 4;

  [[nodiscard]] std::vector<Segment> barriers() const {
    std::vector<Segment> out;
    for (int i = 0; i < num_barriers; ++i) {
      const double th = 2.0 * std::numbers::pi * i / num_barriers;
      const Vec2 dir{std::cos(th), std::sin(th)};
      out.push_back({{barrier_inner * dir[0], barrier_inner * dir[1]},
                     {barrier_outer * dir[0], barrier_outer * dir[1]}});
    }
    return out;
  }
};

/// Liénard-plane Van der Pol field: x' = mu (x - x^3/3 - y), y' = x / mu.
inline Vec2 vdp_field(const Vec2& p, double mu) {
  return {mu * (p[0] - p[0] * p[0] * p[0] / 3.0 - p[1]), p[0] / mu};
}

/// RK4 over `dt` in `substeps` equal steps, then clamp to [-box, box]^2.
inline Vec2 vdp_target_step(const Vec2& target, double dt, int substeps, double mu = 2.0, double box = 4.0) {
  const double h = dt / substeps;
  Vec2 p = target;
  auto axpy = [](const Vec2& x, double s, const Vec2& d) { return Vec2{x[0] + s * d[0], x[1] + s * d[1]}; };
  for (int i = 0; i < substeps; ++i) {
    const Vec2 k1 = vdp_field(p, mu);
    const Vec2 k2 = vdp_field(axpy(p, h / 2, k1), mu);
    const Vec2 k3 = vdp_field(axpy(p, h / 2, k2), mu);
    const Vec2 k4 = vdp_field(axpy(p, h, k3), mu);
    for (int j = 0; j < 2; ++j) p[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  p[0] = std::clamp(p[0], -box, box);
  p[1] = std::clamp(p[1], -box, box);
  return p;
}

struct VdpTagState {
  Vec2 agent{};
  Vec2 target{};
};

/// Observation: noisy target position relative to the agent.
using VdpObservation = Vec2;

/// Agent moving at fixed speed chases a Van der Pol target. Action is
/// (heading in [0, 2pi), look bit); looking sharpens the observation at a
/// higher per-step cost.
class VdpTagProblem {
 public:
  using State = VdpTagState;
  using Observation = VdpObservation;
  static constexpr bool is_mdp = false;

  explicit VdpTagProblem(VdpTagParams params = {})
      : params_(params),
        barriers_(params.barriers()),
        space_({{0.0, 2.0 * std::numbers::pi, true}}, {2}) {}

  /// Agent position after moving along `heading`; stays put if the move
  /// would cross a barrier.
  Vec2 agent_step(const Vec2& agent, double heading) const {
    const double step = params_.agent_speed;
    Vec2 next{agent[0] + step * std::cos(heading), agent[1] + step * std::sin(heading)};
    next[0] = std::clamp(next[0], -params_.box, params_.box);
    next[1] = std::clamp(next[1], -params_.box, params_.box);
    for (const auto& seg : barriers_) {
      if (segments_intersect(agent, next, seg.a, seg.b)) return agent;
    }
    return next;
  }

  bool tagged(const State& s) const {
    const double dx = s.agent[0] - s.target[0];
    const double dy = s.agent[1] - s.target[1];
    return dx * dx + dy * dy < params_.tag_radius * params_.tag_radius;
  }

  double reward(const Action& a, const State& next) const {
    const bool look = a.discrete[0] == 1;
    double r = look ? -params_.look_cost : -params_.step_cost;
    if (tagged(next)) r += params_.tag_reward;
    return r;
  }

  double obs_sigma(const Action& a) const { return a.discrete[0] == 1 ? params_.look_obs_sigma : params_.obs_sigma; }

  Transition<State, Observation> generate(const State& s, const Action& a, Rng& rng) const {
    State next;
    next.agent = agent_step(s.agent, a.continuous[0]);
    next.target = vdp_target_step(s.target, params_.dt, params_.rk4_substeps, params_.mu, params_.box);
    for (int j = 0; j < 2; ++j) {
      next.target[j] = std::clamp(next.target[j] + rng.normal(0.0, params_.target_noise), -params_.box, params_.box);
    }
    const double sd = obs_sigma(a);
    Observation o{next.target[0] - next.agent[0] + rng.normal(0.0, sd),
                  next.target[1] - next.agent[1] + rng.normal(0.0, sd)};
    return {next, o, reward(a, next)};
  }

  double obs_density(const Observation& o, const Action& a, const State& next) const {
    const double sd = obs_sigma(a);
    const double var = sd * sd;
    const double d0 = o[0] - (next.target[0] - next.agent[0]);
    const double d1 = o[1] - (next.target[1] - next.agent[1]);
    return std::exp(-(d0 * d0 + d1 * d1) / (2.0 * var)) / (2.0 * std::numbers::pi * var);
  }

  /// Agent at the origin, target uniform over the box.
  State initial_state(Rng& rng) const {
    return {{0.0, 0.0}, {rng.uniform(-params_.box, params_.box), rng.uniform(-params_.box, params_.box)}};
  }

  /// Agent of the first particle, weighted mean target.
  State point_estimate(const WeightedParticleBelief<State>& b) const {
    State est;
    if (b.empty()) return est;
    est.agent = b.particles.front().agent;
    double total = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      est.target[0] += b.weights[i] * b.particles[i].target[0];
      est.target[1] += b.weights[i] * b.particles[i].target[1];
      total += b.weights[i];
    }
    if (total > 0.0) {
      est.target[0] /= total;
      est.target[1] /= total;
    }
    return est;
  }

  double discount() const { return params_.discount; }
  std::optional<int> horizon() const { return std::nullopt; }
  const ActionSpace& action_space() const { return space_; }
  bool is_terminal(const State& s) const { return tagged(s); }

  const VdpTagParams& params() const { return params_; }
  const std::vector<Segment>& barriers() const { return barriers_; }

 private:
  VdpTagParams params_;
  std::vector<Segment> barriers_;
  ActionSpace space_;
};

/// Heads straight at the (estimated) target without looking.
struct VdpToTargetPolicy {
  Action operator()(const VdpTagState& s) const {
    double heading = std::atan2(s.target[1] - s.agent[1], s.target[0] - s.agent[0]);
    if (heading < 0.0) heading += 2.0 * std::numbers::pi;
    if (heading >= 2.0 * std::numbers::pi) heading = 0.0;
    return Action{{heading}, {0}};
  }
};

}  // namespace vpw::env
