#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "vpw/belief.hpp"
#include "vpw/errors.hpp"
#include "vpw/problem.hpp"
#include "vpw/widening.hpp"

namespace vpw {

struct QueryBudget {
  long queries = 1000;
};

struct TimeBudget {
  double seconds = 0.1;
};

using SearchBudget = std::variant<QueryBudget, TimeBudget>;

/// Hyperparameters of the observation-widening tree search. With
/// vpw.voo.omega = 1 the search is POMCPOW; otherwise VOMCPOW.
struct MctsConfig {
  VpwConfig vpw;
  double k_o = 1.0;
  double alpha_o = 0.5;
  int max_depth = 10;
  SearchBudget budget = QueryBudget{};
  // first child of every new belief node is the rollout policy action
  bool first_action_from_rollout = true;

  void validate(const ActionSpace& space) const {
    vpw.validate(space);
    if (!(k_o > 0.0)) throw std::invalid_argument("MctsConfig: k_o must be positive");
    if (!(alpha_o >= 0.0 && alpha_o <= 1.0)) throw std::invalid_argument("MctsConfig: alpha_o outside [0,1]");
    if (max_depth < 1) throw std::invalid_argument("MctsConfig: max_depth must be >= 1");
  }
};

/// Discounted return of following `policy` from `state` until `max_depth`
/// or a terminal state. Zero when already at max depth.
template <GenerativeProblem P, class Policy>
  requires RolloutPolicy<Policy, P>
double rollout(typename P::State state, int depth, int max_depth, const P& problem, const Policy& policy, Rng& rng) {
  const double gamma = problem.discount();
  double total = 0.0;
  double discount = 1.0;
  for (; depth < max_depth && !problem.is_terminal(state); ++depth) {
    auto tr = problem.generate(state, policy(state), rng);
    total += discount * tr.reward;
    discount *= gamma;
    state = std::move(tr.state);
  }
  return total;
}

template <class State, class Observation>
struct SearchTree {
  /// History/belief node h.
  struct BeliefNode {
    // accumulated weighted particles with the reward that produced each
    std::vector<State> particles;
    std::vector<double> rewards;
    std::vector<double> weights;
    double weight_sum = 0.0;

    // C(h) with Q(h,a), N(h,a), and the matching action-node index
    std::vector<Action> actions;
    std::vector<double> q;
    std::vector<int> counts;
    std::vector<std::size_t> action_nodes;
    long visits = 0;
  };

  /// Action node ha with its observation branches.
  struct ActionNode {
    std::vector<Observation> observations;
    std::vector<double> branch_counts;
    std::vector<std::size_t> children;
    long visits = 0;
  };

  std::vector<BeliefNode> beliefs;
  std::vector<ActionNode> actions;

  static constexpr std::size_t kRoot = 0;

  [[nodiscard]] const BeliefNode& root() const { return beliefs.at(kRoot); }
};

/// POMCPOW-style search with a pluggable action-widening rule.
///
/// Each simulation draws a root particle proportionally to its weight and
/// descends: action layer by VPW (or PW), observation layer by progressive
/// widening on generated observations. The simulated next state joins the
/// child's particle collection with weight Z(o | a, s'); descent continues
/// from a particle resampled from that collection, and new branches end in
/// a rollout.
template <GenerativeProblem P, class Policy>
  requires RolloutPolicy<Policy, P>
class MctsPlanner {
 public:
  using State = typename P::State;
  using Observation = typename P::Observation;
  using Tree = SearchTree<State, Observation>;
  using BackupObserver = std::function<void(std::size_t node, std::size_t action_index, double total)>;

  MctsPlanner(const P& problem, MctsConfig cfg, Policy policy, WideningKind kind = WideningKind::kVoronoi)
      : problem_(problem), cfg_(std::move(cfg)), policy_(std::move(policy)), kind_(kind) {
    cfg_.validate(problem_.action_space());
  }

  void set_backup_observer(BackupObserver obs) { observer_ = std::move(obs); }

  /// Runs simulations until the budget is spent; returns the visited root
  /// action with the highest Q.
  Action plan(const WeightedParticleBelief<State>& root_belief, Rng& rng) {
    if (root_belief.empty()) throw DegenerateBelief("mcts: empty root belief");
    const ProportionalSampler draw_root(root_belief.weights);
    tree_ = Tree{};
    root_context_ = problem_.point_estimate(root_belief);
    tree_.beliefs.emplace_back();
    simulations_ = 0;

    const auto start = std::chrono::steady_clock::now();
    auto keep_going = [&]() {
      if (const auto* q = std::get_if<QueryBudget>(&cfg_.budget)) return simulations_ < q->queries;
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return elapsed < std::get<TimeBudget>(cfg_.budget).seconds;
    };
    while (keep_going()) {
      const State& s = root_belief.particles[draw_root(rng)];
      simulate(Tree::kRoot, s, 0, rng);
      ++simulations_;
    }
    if (simulations_ == 0) throw EmptyTree("mcts: budget admitted no simulations");
    return best_root_action();
  }

  [[nodiscard]] const Tree& tree() const { return tree_; }
  [[nodiscard]] long simulations() const { return simulations_; }
  [[nodiscard]] const MctsConfig& config() const { return cfg_; }

  /// One descent from `state` at node h; returns the discounted return.
  double simulate(std::size_t h, const State& state, int depth, Rng& rng) {
    if (depth >= cfg_.max_depth || problem_.is_terminal(state)) return 0.0;

    const std::size_t ai = choose_action(h, rng);
    const std::size_t ha = tree_.beliefs[h].action_nodes[ai];
    const Action action = tree_.beliefs[h].actions[ai];

    auto tr = problem_.generate(state, action, rng);
    bool new_branch = false;
    std::size_t oi = 0;
    {
      auto& an = tree_.actions[ha];
      const double limit = cfg_.k_o * std::pow(static_cast<double>(an.visits), cfg_.alpha_o);
      if (static_cast<double>(an.observations.size()) <= limit) {
        oi = an.observations.size();
        an.observations.push_back(tr.observation);
        an.branch_counts.push_back(1.0);
        an.children.push_back(tree_.beliefs.size());
        tree_.beliefs.emplace_back();
        new_branch = true;
      } else {
        oi = pick_branch(an, rng);
        an.branch_counts[oi] += 1.0;
      }
    }
    const std::size_t child = tree_.actions[ha].children[oi];
    {
      auto& cn = tree_.beliefs[child];
      const double w = problem_.obs_density(tree_.actions[ha].observations[oi], action, tr.state);
      cn.particles.push_back(tr.state);
      cn.rewards.push_back(tr.reward);
      cn.weights.push_back(w);
      cn.weight_sum += w;
    }

    const double gamma = problem_.discount();
    double total = 0.0;
    if (new_branch) {
      total = tr.reward + gamma * rollout(tr.state, depth + 1, cfg_.max_depth, problem_, policy_, rng);
    } else {
      const auto& cn = tree_.beliefs[child];
      if (cn.weight_sum > 0.0) {
        const std::size_t k = sample_proportional(cn.weights, cn.weight_sum, rng);
        // copy: recursion may reallocate the node storage
        const State next = cn.particles[k];
        const double r = cn.rewards[k];
        total = r + gamma * simulate(child, next, depth + 1, rng);
      } else {
        total = tr.reward + gamma * simulate(child, tr.state, depth + 1, rng);
      }
    }

    auto& node = tree_.beliefs[h];
    ++node.visits;
    const int n = ++node.counts[ai];
    node.q[ai] += (total - node.q[ai]) / n;
    ++tree_.actions[ha].visits;
    if (observer_) observer_(h, ai, total);
    return total;
  }

 private:
  std::size_t add_action(std::size_t h, Action a) {
    auto& node = tree_.beliefs[h];
    node.actions.push_back(std::move(a));
    node.q.push_back(0.0);
    node.counts.push_back(0);
    node.action_nodes.push_back(tree_.actions.size());
    tree_.actions.emplace_back();
    return node.actions.size() - 1;
  }

  std::size_t choose_action(std::size_t h, Rng& rng) {
    auto& node = tree_.beliefs[h];
    if (node.actions.empty() && cfg_.first_action_from_rollout) {
      const State& context = h == Tree::kRoot ? root_context_ : node.particles.front();
      Action a = policy_(context);
      problem_.action_space().project(a);
      return add_action(h, std::move(a));
    }
    ActionChoice choice =
        select_action(kind_, CenterView(node.actions, node.q), node.counts, node.visits, problem_.action_space(),
                      cfg_.vpw, rng);
    if (choice.is_new) return add_action(h, std::move(choice.action));
    return choice.index;
  }

  // Revisit an observation branch with probability proportional to its
  // insertion count, skipping branches whose particles all have zero weight.
  std::size_t pick_branch(const typename Tree::ActionNode& an, Rng& rng) const {
    double total = 0.0;
    std::vector<double> eligible(an.branch_counts.size(), 0.0);
    for (std::size_t i = 0; i < an.branch_counts.size(); ++i) {
      if (tree_.beliefs[an.children[i]].weight_sum > 0.0) {
        eligible[i] = an.branch_counts[i];
        total += eligible[i];
      }
    }
    if (total > 0.0) return sample_proportional(eligible, total, rng);
    double all = 0.0;
    for (double c : an.branch_counts) all += c;
    return sample_proportional(an.branch_counts, all, rng);
  }

  Action best_root_action() const {
    const auto& root = tree_.root();
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < root.actions.size(); ++i) {
      if (root.counts[i] < 1) continue;
      if (best < 0 || root.q[i] > root.q[static_cast<std::size_t>(best)]) best = static_cast<std::ptrdiff_t>(i);
    }
    if (best < 0) throw EmptyTree("mcts: no visited root action");
    return root.actions[static_cast<std::size_t>(best)];
  }

  const P& problem_;
  MctsConfig cfg_;
  Policy policy_;
  WideningKind kind_;
  Tree tree_;
  State root_context_{};
  long simulations_ = 0;
  BackupObserver observer_;
};

/// VOMCPOW (or POMCPOW when cfg.vpw.voo.omega == 1).
template <GenerativeProblem P, class Policy>
  requires RolloutPolicy<Policy, P>
Action mcts_plan(const WeightedParticleBelief<typename P::State>& root, const P& problem, const MctsConfig& cfg,
                 const Policy& policy, Rng& rng) {
  MctsPlanner<P, Policy> planner(problem, cfg, policy, WideningKind::kVoronoi);
  return planner.plan(root, rng);
}

/// POMCPOW: the same search with uniform action progressive widening.
template <GenerativeProblem P, class Policy>
  requires RolloutPolicy<Policy, P>
Action pomcpow_plan(const WeightedParticleBelief<typename P::State>& root, const P& problem, const MctsConfig& cfg,
                    const Policy& policy, Rng& rng) {
  MctsPlanner<P, Policy> planner(problem, cfg, policy, WideningKind::kUniform);
  return planner.plan(root, rng);
}

}  // namespace vpw
