#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vpw/belief.hpp"
#include "vpw/errors.hpp"
#include "vpw/problem.hpp"
#include "vpw/widening.hpp"

namespace vpw {

/// Shared width/depth settings of the sparse-sampling solvers.
struct SparseConfig {
  // C_s: particles (VOWSS) or next-state samples (VOSS) per node
  int state_width = 10;
  // C_a: VPW selections at depth 0
  int action_width = 200;
  // gamma_a: per-depth multiplier on the action width
  double action_width_decay = 1.0;
  int depth = 2;
  VpwConfig vpw = default_vpw();

  static VpwConfig default_vpw() {
    VpwConfig v;
    v.widen_unbounded = true;
    return v;
  }

  /// max(1, round(C_a * gamma_a^d))
  [[nodiscard]] int width_at(int d) const {
    const double w = std::round(static_cast<double>(action_width) * std::pow(action_width_decay, d));
    return std::max(1, static_cast<int>(w));
  }

  void validate(const ActionSpace& space) const {
    if (state_width < 1) throw std::invalid_argument("sparse solver: state width must be >= 1");
    if (action_width < 1) throw std::invalid_argument("sparse solver: action width must be >= 1");
    if (!(action_width_decay > 0.0 && action_width_decay <= 1.0)) {
      throw std::invalid_argument("sparse solver: action width decay outside (0,1]");
    }
    if (depth < 0) throw std::invalid_argument("sparse solver: negative depth");
    vpw.validate(space);
  }
};

using VowssConfig = SparseConfig;
using VossConfig = SparseConfig;

struct ValueEstimate {
  double value = 0.0;
  std::optional<Action> best_action;
};

namespace detail {

/// Runs width_at(depth) sequential VPW selections, feeding each Q estimate
/// back into the center set before the next one. Re-selected actions keep a
/// running average of their estimates.
template <class EstimateQ>
ValueEstimate sequential_vpw(const ActionSpace& space, const SparseConfig& cfg, int depth, Rng& rng,
                             EstimateQ&& estimate_q) {
  VoronoiCenterSet set;
  std::vector<int> counts;
  const int width = cfg.width_at(depth);
  set.centers.reserve(static_cast<std::size_t>(width));
  set.values.reserve(static_cast<std::size_t>(width));
  counts.reserve(static_cast<std::size_t>(width));

  long visits = 0;
  for (int i = 0; i < width; ++i) {
    ActionChoice choice = vpw_select(set, counts, visits, space, cfg.vpw, rng);
    const double q = estimate_q(choice.action);
    if (choice.is_new) {
      set.add(std::move(choice.action), q);
      counts.push_back(1);
    } else {
      const int n = ++counts[choice.index];
      set.values[choice.index] += (q - set.values[choice.index]) / n;
    }
    ++visits;
  }
  const auto best = static_cast<std::size_t>(argmax_lowest(set.values));
  return {set.values[best], set.centers[best]};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// VOWSS: weighted sparse sampling over particle beliefs.

template <GenerativeProblem P>
double vowss_estimate_q(const WeightedParticleBelief<typename P::State>& belief, const Action& action, int depth,
                        const P& problem, const VowssConfig& cfg, Rng& rng);

/// Max over sequential VPW selections of EstimateQ; (0, none) at depth >= D.
template <GenerativeProblem P>
ValueEstimate vowss_estimate_v(const WeightedParticleBelief<typename P::State>& belief, int depth, const P& problem,
                               const VowssConfig& cfg, Rng& rng) {
  if (depth >= cfg.depth) return {};
  return detail::sequential_vpw(problem.action_space(), cfg, depth, rng, [&](const Action& a) {
    return vowss_estimate_q(belief, a, depth, problem, cfg, rng);
  });
}

/// Generates (s'_i, o_i, r_i) per particle; each o_j spawns a child belief
/// holding every s'_i reweighted by Z(o_j | a, s'_i). Returns the
/// weight-normalized mean of r_j + gamma * EstimateV(child_j, d + 1).
template <GenerativeProblem P>
double vowss_estimate_q(const WeightedParticleBelief<typename P::State>& belief, const Action& action, int depth,
                        const P& problem, const VowssConfig& cfg, Rng& rng) {
  using State = typename P::State;
  using Observation = typename P::Observation;
  const std::size_t n = belief.size();
  std::vector<State> next_states;
  std::vector<Observation> observations;
  std::vector<double> returns;
  next_states.reserve(n);
  observations.reserve(n);
  returns.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto tr = problem.generate(belief.particles[i], action, rng);
    next_states.push_back(std::move(tr.state));
    observations.push_back(std::move(tr.observation));
    returns.push_back(tr.reward);
  }

  if (depth + 1 < cfg.depth) {
    const double gamma = problem.discount();
    for (std::size_t j = 0; j < n; ++j) {
      if (problem.is_terminal(next_states[j])) continue;
      const auto child = reweight_next_belief<P>(belief, next_states, observations[j], action, problem);
      returns[j] += gamma * vowss_estimate_v(child, depth + 1, problem, cfg, rng).value;
    }
  }
  return weighted_mean_value(returns, belief.weights);
}

/// Action maximizing the root Q estimate of EstimateV(b0, 0).
template <GenerativeProblem P>
Action vowss_plan(const WeightedParticleBelief<typename P::State>& root, const P& problem, const VowssConfig& cfg,
                  Rng& rng) {
  if (cfg.depth <= 0) throw EmptyPlan("vowss_plan: depth 0 leaves no action to choose");
  if (root.empty() || !(root.total_weight() > 0.0)) throw DegenerateBelief("vowss_plan: degenerate root belief");
  return *vowss_estimate_v(root, 0, problem, cfg, rng).best_action;
}

// ---------------------------------------------------------------------------
// VOSS: sparse sampling over states for (stochastic) MDPs.

template <MdpProblem P>
double voss_estimate_q(const typename P::State& state, const Action& action, int depth, const P& problem,
                       const VossConfig& cfg, Rng& rng);

template <MdpProblem P>
ValueEstimate voss_estimate_v(const typename P::State& state, int depth, const P& problem, const VossConfig& cfg,
                              Rng& rng) {
  if (depth >= cfg.depth) return {};
  return detail::sequential_vpw(problem.action_space(), cfg, depth, rng, [&](const Action& a) {
    return voss_estimate_q(state, a, depth, problem, cfg, rng);
  });
}

/// r + gamma * mean_i EstimateV(s'_i, d + 1) over C_s next-state draws. The
/// reward is the mean of the C_s drawn rewards, which is the single r of an
/// (s, a)-only reward model.
template <MdpProblem P>
double voss_estimate_q(const typename P::State& state, const Action& action, int depth, const P& problem,
                       const VossConfig& cfg, Rng& rng) {
  using State = typename P::State;
  const auto n = static_cast<std::size_t>(cfg.state_width);
  std::vector<State> next_states;
  std::vector<double> rewards;
  next_states.reserve(n);
  rewards.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto tr = problem.generate(state, action, rng);
    next_states.push_back(std::move(tr.state));
    rewards.push_back(tr.reward);
  }
  // Same accumulation as vowss_estimate_q with unit weights, so the two
  // agree bit-for-bit at C_s = 1.
  std::vector<double> returns = rewards;
  if (depth + 1 < cfg.depth) {
    const double gamma = problem.discount();
    for (std::size_t i = 0; i < n; ++i) {
      if (problem.is_terminal(next_states[i])) continue;
      returns[i] += gamma * voss_estimate_v(next_states[i], depth + 1, problem, cfg, rng).value;
    }
  }
  double sum = 0.0;
  for (double r : returns) sum += r;
  return sum / static_cast<double>(n);
}

template <MdpProblem P>
Action voss_plan(const typename P::State& state, const P& problem, const VossConfig& cfg, Rng& rng) {
  if (cfg.depth <= 0) throw EmptyPlan("voss_plan: depth 0 leaves no action to choose");
  return *voss_estimate_v(state, 0, problem, cfg, rng).best_action;
}

}  // namespace vpw
