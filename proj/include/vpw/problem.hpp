#pragma once

#include <concepts>
#include <optional>
#include <utility>

#include "vpw/action_space.hpp"
#include "vpw/rng.hpp"

namespace vpw {

/// One draw from the generative model: (s', o, r) ~ G(s, a).
template <class State, class Observation>
struct Transition {
  State state;
  Observation observation;
  double reward = 0.0;
};

template <class State>
struct WeightedParticleBelief;

/// The generative POMDP interface every solver consumes.
///
///   generate(s, a, rng)        -> Transition{s', o, r}
///   obs_density(o, a, s')      -> Z(o | a, s') >= 0
///   initial_state(rng)         -> s ~ b0
///   point_estimate(belief)     -> representative state (rollout-policy context)
///   discount(), horizon()      -> gamma, optional finite horizon
///   action_space()             -> hybrid box with its metric
///   is_terminal(s)
///   is_mdp                     -> observations are next states, Z unused
template <class P>
concept GenerativeProblem =
    requires(const P& p, const typename P::State& s, const typename P::Observation& o, const Action& a, Rng& rng,
             const WeightedParticleBelief<typename P::State>& b) {
      typename P::State;
      typename P::Observation;
      { p.generate(s, a, rng) } -> std::same_as<Transition<typename P::State, typename P::Observation>>;
      { p.obs_density(o, a, s) } -> std::convertible_to<double>;
      { p.initial_state(rng) } -> std::same_as<typename P::State>;
      { p.point_estimate(b) } -> std::same_as<typename P::State>;
      { p.discount() } -> std::convertible_to<double>;
      { p.horizon() } -> std::same_as<std::optional<int>>;
      { p.action_space() } -> std::same_as<const ActionSpace&>;
      { p.is_terminal(s) } -> std::convertible_to<bool>;
      { P::is_mdp } -> std::convertible_to<bool>;
    };

template <class P>
concept MdpProblem = GenerativeProblem<P> && P::is_mdp;

/// Fixed rollout policy acting on a state estimate.
template <class F, class P>
concept RolloutPolicy = GenerativeProblem<P> && requires(const F& f, const typename P::State& s) {
  { f(s) } -> std::same_as<Action>;
};

/// Views an MDP as a POMDP whose observation density is identically one.
template <MdpProblem P>
class MdpAsPomdp {
 public:
  using State = typename P::State;
  using Observation = typename P::Observation;
  static constexpr bool is_mdp = false;

  explicit MdpAsPomdp(P inner) : inner_(std::move(inner)) {}

  Transition<State, Observation> generate(const State& s, const Action& a, Rng& rng) const {
    return inner_.generate(s, a, rng);
  }
  double obs_density(const Observation&, const Action&, const State&) const { return 1.0; }
  State initial_state(Rng& rng) const { return inner_.initial_state(rng); }
  State point_estimate(const WeightedParticleBelief<State>& b) const { return inner_.point_estimate(b); }
  double discount() const { return inner_.discount(); }
  std::optional<int> horizon() const { return inner_.horizon(); }
  const ActionSpace& action_space() const { return inner_.action_space(); }
  bool is_terminal(const State& s) const { return inner_.is_terminal(s); }

  const P& inner() const { return inner_; }

 private:
  P inner_;
};

}  // namespace vpw
