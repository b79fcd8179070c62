#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "vpw/errors.hpp"
#include "vpw/problem.hpp"
#include "vpw/rng.hpp"

namespace vpw {

/// Ordered weighted particle set {(s_i, w_i)}; weights are unnormalized.
template <class State>
struct WeightedParticleBelief {
  std::vector<State> particles;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return particles.size(); }
  [[nodiscard]] bool empty() const { return particles.empty(); }

  [[nodiscard]] double total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

  void add(State s, double w) {
    particles.push_back(std::move(s));
    weights.push_back(w);
  }

  void reserve(std::size_t n) {
    particles.reserve(n);
    weights.reserve(n);
  }
};

/// Draws `count` i.i.d. particles from b0, each with weight 1/count.
template <GenerativeProblem P>
WeightedParticleBelief<typename P::State> init_root_belief(const P& problem, std::size_t count, Rng& rng) {
  if (count == 0) throw std::invalid_argument("init_root_belief: count must be positive");
  WeightedParticleBelief<typename P::State> b;
  b.reserve(count);
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) b.add(problem.initial_state(rng), w);
  return b;
}

/// Child belief for observation `obs`: particle i is next_states[i] with
/// weight w_i * Z(obs | action, next_states[i]). No normalization.
template <GenerativeProblem P>
WeightedParticleBelief<typename P::State> reweight_next_belief(
    const WeightedParticleBelief<typename P::State>& belief, std::span<const typename P::State> next_states,
    const typename P::Observation& obs, const Action& action, const P& problem) {
  if (next_states.size() != belief.size()) {
    throw std::invalid_argument("reweight_next_belief: next_states size differs from belief");
  }
  WeightedParticleBelief<typename P::State> out;
  out.reserve(belief.size());
  bool any_positive = false;
  for (std::size_t i = 0; i < next_states.size(); ++i) {
    const double w = belief.weights[i] * problem.obs_density(obs, action, next_states[i]);
    any_positive = any_positive || w > 0.0;
    out.add(next_states[i], w);
  }
  if (!any_positive) throw DegenerateBelief("all reweighted particle weights are zero");
  return out;
}

/// sum(w_i v_i) / sum(w_i).
inline double weighted_mean_value(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw std::invalid_argument("weighted_mean_value: length mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * values[i];
    den += weights[i];
  }
  if (!(den > 0.0)) throw DegenerateBelief("weighted_mean_value: zero total weight");
  return num / den;
}

/// Index drawn with probability proportional to `weights`; linear scan.
inline std::size_t sample_proportional(std::span<const double> weights, double total, Rng& rng) {
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

/// Precomputed cumulative weights for repeated proportional draws.
class ProportionalSampler {
 public:
  explicit ProportionalSampler(std::span<const double> weights) : cumulative_(weights.size()) {
    std::partial_sum(weights.begin(), weights.end(), cumulative_.begin());
    if (cumulative_.empty() || !(cumulative_.back() > 0.0)) {
      throw DegenerateBelief("cannot sample from a belief with zero total weight");
    }
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

/// Effective sample size (sum w)^2 / sum w^2.
inline double effective_sample_size(std::span<const double> weights) {
  double s = 0.0;
  double s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

}  // namespace vpw
