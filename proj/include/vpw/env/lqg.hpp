#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vpw/action_space.hpp"
#include "vpw/belief.hpp"
#include "vpw/problem.hpp"
#include "vpw/rng.hpp"

namespace vpw::env {

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// ---------------------------------------------------------------------------
// Scalar Riccati quantities for A = B = Q = R = I (the matrices stay
// multiples of the identity, so a scalar per step suffices).

/// Finite-horizon gain with `steps_remaining` decisions left:
/// P_N = 1, K = P'/(1 + P'), P = 1 + P' - P'^2/(1 + P').
inline double lqr_gain(int steps_remaining) {
  if (steps_remaining < 1) throw std::invalid_argument("lqr_gain: need at least one remaining step");
  double p = 1.0;
  double k = 0.0;
  for (int i = 0; i < steps_remaining; ++i) {
    k = p / (1.0 + p);
    p = 1.0 + p - p * p / (1.0 + p);
  }
  return k;
}

/// Cost-to-go scalars P_t, t = 0..N (P_N = 1).
inline std::vector<double> lqr_cost_to_go(int horizon) {
  std::vector<double> p(static_cast<std::size_t>(horizon) + 1);
  p[static_cast<std::size_t>(horizon)] = 1.0;
  for (int t = horizon - 1; t >= 0; --t) {
    const double next = p[static_cast<std::size_t>(t) + 1];
    p[static_cast<std::size_t>(t)] = 1.0 + next - next * next / (1.0 + next);
  }
  return p;
}

/// Stationary gain P/(1+P), with P the positive root of P^2 - P - 1 = 0.
inline double riccati_gain() {
  constexpr double p = std::numbers::phi;
  return p / (1.0 + p);
}

inline Vec2 lqg_exact_policy(int horizon_remaining, const Vec2& estimate) {
  const double k = lqr_gain(horizon_remaining);
  return {-k * estimate[0], -k * estimate[1]};
}

inline Vec2 lqg_riccati_policy(const Vec2& estimate) {
  const double k = riccati_gain();
  return {-k * estimate[0], -k * estimate[1]};
}

/// Expected optimal cost from x0 under process noise `sigma` per coordinate:
/// x0'P_0 x0 + sigma^2 * sum_{t=1..N} tr(P_t), plus sigma0^2 tr(P_0) when the
/// initial state is itself uncertain with stddev `initial_sigma`.
inline double lqg_optimal_cost(const Vec2& x0, double sigma, int horizon, double initial_sigma = 0.0) {
  const auto p = lqr_cost_to_go(horizon);
  double cost = p[0] * dot(x0, x0) + initial_sigma * initial_sigma * 2.0 * p[0];
  for (int t = 1; t <= horizon; ++t) cost += sigma * sigma * 2.0 * p[static_cast<std::size_t>(t)];
  return cost;
}

struct LqgParams {
  Vec2 initial_mean{-10.0, 10.0};
  double sigma = 0.1;
  int horizon = 2;
  double action_bound = 10.0;
};

struct LqgState {
  Vec2 x{};
  int t = 0;
};

/// x_{t+1} = x_t + u_t + v_t, y = x_{t+1} + w. Reward is the negated stage
/// cost x'x + u'u, with the terminal x_N'x_N folded into the last step.
class LqgProblem {
 public:
  using State = LqgState;
  using Observation = Vec2;
  static constexpr bool is_mdp = false;

  explicit LqgProblem(LqgParams params = {})
      : params_(params),
        space_(ActionSpace::box({{-params.action_bound, params.action_bound},
                                 {-params.action_bound, params.action_bound}})) {}

  Transition<State, Observation> generate(const State& s, const Action& a, Rng& rng) const {
    const Vec2 u{a.continuous[0], a.continuous[1]};
    State next;
    next.t = s.t + 1;
    for (int i = 0; i < 2; ++i) next.x[i] = s.x[i] + u[i] + rng.normal(0.0, params_.sigma);
    Observation y{next.x[0] + rng.normal(0.0, params_.sigma), next.x[1] + rng.normal(0.0, params_.sigma)};
    double cost = dot(s.x, s.x) + dot(u, u);
    if (next.t == params_.horizon) cost += dot(next.x, next.x);
    return {next, y, -cost};
  }

  double obs_density(const Observation& y, const Action&, const State& next) const {
    const double var = params_.sigma * params_.sigma;
    const double d0 = y[0] - next.x[0];
    const double d1 = y[1] - next.x[1];
    return std::exp(-(d0 * d0 + d1 * d1) / (2.0 * var)) / (2.0 * std::numbers::pi * var);
  }

  State initial_state(Rng& rng) const {
    return {{rng.normal(params_.initial_mean[0], params_.sigma), rng.normal(params_.initial_mean[1], params_.sigma)},
            0};
  }

  /// Weighted mean position.
  State point_estimate(const WeightedParticleBelief<State>& b) const {
    State est;
    double total = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      est.x[0] += b.weights[i] * b.particles[i].x[0];
      est.x[1] += b.weights[i] * b.particles[i].x[1];
      total += b.weights[i];
    }
    if (total > 0.0) {
      est.x[0] /= total;
      est.x[1] /= total;
    }
    est.t = b.empty() ? 0 : b.particles.front().t;
    return est;
  }

  double discount() const { return 1.0; }
  std::optional<int> horizon() const { return params_.horizon; }
  const ActionSpace& action_space() const { return space_; }
  bool is_terminal(const State& s) const { return s.t >= params_.horizon; }

  const LqgParams& params() const { return params_; }

  /// u*_0 for the mean initial state, i.e. -K_0 * mean.
  Vec2 analytic_first_action() const { return lqg_exact_policy(params_.horizon, params_.initial_mean); }

 private:
  LqgParams params_;
  ActionSpace space_;
};

inline Action to_action(const Vec2& u) { return Action{{u[0], u[1]}, {}}; }

/// Finite-horizon LQR feedback on the state estimate.
struct LqgExactPolicy {
  int horizon = 2;
  Action operator()(const LqgState& s) const {
    const int remaining = std::max(1, horizon - s.t);
    return to_action(lqg_exact_policy(remaining, s.x));
  }
};

/// Stationary Riccati feedback, u = -0.618 x.
struct LqgRiccatiPolicy {
  Action operator()(const LqgState& s) const { return to_action(lqg_riccati_policy(s.x)); }
};

}  // namespace vpw::env
