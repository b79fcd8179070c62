#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "vpw/action_space.hpp"
#include "vpw/belief.hpp"
#include "vpw/problem.hpp"
#include "vpw/rng.hpp"

namespace vpw::env {

struct LanderParams {
  double dt = 0.4;
  double crash_penalty = -1000.0;
  double gravity = 9.0;
  double mass = 1.0;
  double inertia = 50.0;
  double max_thrust = 15.0;
  double max_side_thrust = 5.0;
  double max_offset = 1.0;
  // process noise on velocities
  double accel_noise = 0.1;
  double rate_noise = 0.005;
  // observation noise: angular rate, horizontal speed, above-ground level
  double obs_rate_sigma = 0.01;
  double obs_speed_sigma = 0.2;
  double obs_agl_sigma = 1.0;
  // touchdown limits
  double max_landing_vy = 4.0;
  double max_landing_vx = 2.0;
  double max_landing_tilt = 0.3;
  double landing_zone = 10.0;
  double landing_reward = 100.0;
  double fuel_cost = 0.01;
  double x_bound = 100.0;
  double y_ceiling = 150.0;
  // initial state distribution (means, stddevs)
  double init_y = 50.0;
  double init_vy = -10.0;
  double init_x_sigma = 5.0;
  double init_vx_sigma = 1.0;
  double init_tilt_sigma = 0.05;
  double discount = 0.99;
  int max_steps = 250;
};

struct LanderState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
  bool done = false;
};

/// (angular rate, horizontal speed, above-ground level)
using LanderObservation = std::array<double, 3>;

/// Planar vehicle with main thrust T, side thrust F_x and thrust offset
/// delta (torque delta * T). Touchdown outside the velocity/attitude/zone
/// limits, or leaving the flight box, ends the episode with the crash
/// penalty.
class LanderProblem {
 public:
  using State = LanderState;
  using Observation = LanderObservation;
  static constexpr bool is_mdp = false;

  explicit LanderProblem(LanderParams params = {})
      : params_(params),
        space_(ActionSpace::box({{0.0, params.max_thrust},
                                 {-params.max_side_thrust, params.max_side_thrust},
                                 {-params.max_offset, params.max_offset}})) {}

  /// Semi-implicit Euler step without noise or termination logic.
  State propagate(const State& s, const Action& a, double ax_noise = 0.0, double ay_noise = 0.0,
                  double rate_noise = 0.0) const {
    const double thrust = a.continuous[0];
    const double side = a.continuous[1];
    const double offset = a.continuous[2];
    const double dt = params_.dt;
    const double c = std::cos(s.theta);
    const double sn = std::sin(s.theta);
    const double ax = (-thrust * sn + side * c) / params_.mass;
    const double ay = (thrust * c + side * sn) / params_.mass - params_.gravity;
    const double alpha = -offset * thrust / params_.inertia;
    State n = s;
    n.vx += ax * dt + ax_noise;
    n.vy += ay * dt + ay_noise;
    n.omega += alpha * dt + rate_noise;
    n.x += n.vx * dt;
    n.y += n.vy * dt;
    n.theta += n.omega * dt;
    return n;
  }

  bool soft_touchdown(const State& s) const {
    return std::abs(s.vy) <= params_.max_landing_vy && std::abs(s.vx) <= params_.max_landing_vx &&
           std::abs(s.theta) <= params_.max_landing_tilt && std::abs(s.x) <= params_.landing_zone;
  }

  /// Reward for arriving at `next`; sets next.done on touchdown or exit.
  double settle(State& next, const Action& a) const {
    double r = -params_.fuel_cost * a.continuous[0];
    if (next.y <= 0.0) {
      next.y = 0.0;
      next.done = true;
      return soft_touchdown(next) ? params_.landing_reward - std::abs(next.x) : params_.crash_penalty;
    }
    if (std::abs(next.x) > params_.x_bound || next.y > params_.y_ceiling) {
      next.done = true;
      return params_.crash_penalty;
    }
    return r;
  }

  Observation observe_mean(const State& s) const { return {s.omega, s.vx, s.y}; }

  Transition<State, Observation> generate(const State& s, const Action& a, Rng& rng) const {
    State next = propagate(s, a, rng.normal(0.0, params_.accel_noise), rng.normal(0.0, params_.accel_noise),
                           rng.normal(0.0, params_.rate_noise));
    const double r = settle(next, a);
    const auto m = observe_mean(next);
    Observation o{m[0] + rng.normal(0.0, params_.obs_rate_sigma), m[1] + rng.normal(0.0, params_.obs_speed_sigma),
                  m[2] + rng.normal(0.0, params_.obs_agl_sigma)};
    return {next, o, r};
  }

  double obs_density(const Observation& o, const Action&, const State& next) const {
    const auto m = observe_mean(next);
    const std::array<double, 3> sd{params_.obs_rate_sigma, params_.obs_speed_sigma, params_.obs_agl_sigma};
    double log_p = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double z = (o[i] - m[i]) / sd[i];
      log_p += -0.5 * z * z - std::log(sd[i] * std::sqrt(2.0 * std::numbers::pi));
    }
    return std::exp(log_p);
  }

  State initial_state(Rng& rng) const {
    State s;
    s.x = rng.normal(0.0, params_.init_x_sigma);
    s.y = params_.init_y;
    s.theta = rng.normal(0.0, params_.init_tilt_sigma);
    s.vx = rng.normal(0.0, params_.init_vx_sigma);
    s.vy = params_.init_vy;
    s.omega = 0.0;
    return s;
  }

  State point_estimate(const WeightedParticleBelief<State>& b) const {
    State est;
    double total = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double w = b.weights[i];
      const auto& p = b.particles[i];
      est.x += w * p.x;
      est.y += w * p.y;
      est.theta += w * p.theta;
      est.vx += w * p.vx;
      est.vy += w * p.vy;
      est.omega += w * p.omega;
      total += w;
    }
    if (total > 0.0) {
      est.x /= total;
      est.y /= total;
      est.theta /= total;
      est.vx /= total;
      est.vy /= total;
      est.omega /= total;
    }
    return est;
  }

  double discount() const { return params_.discount; }
  std::optional<int> horizon() const { return std::nullopt; }
  const ActionSpace& action_space() const { return space_; }
  bool is_terminal(const State& s) const { return s.done; }

  const LanderParams& params() const { return params_; }

 private:
  LanderParams params_;
  ActionSpace space_;
};

/// Proportional controller on the observable channels (rate, horizontal
/// speed, altitude) plus the estimated sink rate and tilt.
struct LanderProportionalPolicy {
  LanderParams params{};
  double k_vx = 1.0;
  double k_rate = 20.0;
  double k_tilt = 10.0;
  double k_sink = 1.5;

  Action operator()(const LanderState& s) const {
    // target sink rate shrinks with altitude
    const double target_vy = -(1.0 + 0.1 * std::max(0.0, s.y));
    const double thrust = std::clamp(params.mass * params.gravity + k_sink * (target_vy - s.vy), 0.0,
                                     params.max_thrust);
    const double side = std::clamp(-k_vx * s.vx, -params.max_side_thrust, params.max_side_thrust);
    const double offset = std::clamp(k_rate * s.omega + k_tilt * s.theta, -params.max_offset, params.max_offset);
    return Action{{thrust, side, offset}, {}};
  }
};

}  // namespace vpw::env
