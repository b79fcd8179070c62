#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "vpw/action_space.hpp"
#include "vpw/belief.hpp"
#include "vpw/env/lqg.hpp"
#include "vpw/env/oracles.hpp"
#include "vpw/env/vdp_tag.hpp"
#include "vpw/rng.hpp"

namespace vpw {
namespace {

using env::LqgProblem;
using env::LqgState;

TEST(InitRootBelief, UniformWeights) {
  LqgProblem lqg;
  Rng rng(1);
  auto b = init_root_belief(lqg, 4, rng);
  ASSERT_EQ(b.size(), 4u);
  for (double w : b.weights) EXPECT_EQ(w, 0.25);

  auto single = init_root_belief(lqg, 1, rng);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single.weights[0], 1.0);

  EXPECT_THROW(init_root_belief(lqg, 0, rng), std::invalid_argument);
}

// Each coordinate is N(+-10, 0.1^2); P(|z| > 6) ~ 2e-9 per coordinate, so
// over 1000 beliefs of 10 particles no draw should leave the 6-sigma box.
TEST(InitRootBelief, LqgParticlesNearInitialMean) {
  LqgProblem lqg;
  int outside = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    auto b = init_root_belief(lqg, 10, rng);
    for (const auto& p : b.particles) {
      if (std::abs(p.x[0] + 10.0) > 0.6 || std::abs(p.x[1] - 10.0) > 0.6) ++outside;
      EXPECT_EQ(p.t, 0);
    }
  }
  EXPECT_EQ(outside, 0);
}

// Z evaluates to 0.2 for the fixed observation below.
struct ConstDensity {
  using State = double;
  using Observation = double;
  static constexpr bool is_mdp = false;
  double z = 0.2;
  ActionSpace space = ActionSpace::box({{0, 1}});
  Transition<double, double> generate(const double& s, const Action&, Rng&) const { return {s, s, 0.0}; }
  double obs_density(const double&, const Action&, const double&) const { return z; }
  double initial_state(Rng&) const { return 0.0; }
  double point_estimate(const WeightedParticleBelief<double>&) const { return 0.0; }
  double discount() const { return 1.0; }
  std::optional<int> horizon() const { return 1; }
  const ActionSpace& action_space() const { return space; }
  bool is_terminal(const double&) const { return false; }
};

TEST(ReweightNextBelief, MultipliesByDensity) {
  ConstDensity p;
  WeightedParticleBelief<double> b;
  b.add(3.0, 0.5);
  const std::vector<double> next{4.0};
  auto out = reweight_next_belief<ConstDensity>(b, next, 0.0, Action{{0.5}, {}}, p);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out.weights[0], 0.1);
  EXPECT_EQ(out.particles[0], 4.0);

  p.z = 1.0;
  WeightedParticleBelief<double> b3;
  b3.add(1.0, 0.2);
  b3.add(2.0, 0.3);
  b3.add(3.0, 0.5);
  const std::vector<double> next3{1.5, 2.5, 3.5};
  auto same = reweight_next_belief<ConstDensity>(b3, next3, 0.0, Action{{0.5}, {}}, p);
  EXPECT_EQ(same.weights, b3.weights);
  EXPECT_EQ(same.particles, next3);

  p.z = 0.0;
  EXPECT_THROW(reweight_next_belief<ConstDensity>(b3, next3, 0.0, Action{{0.5}, {}}, p), DegenerateBelief);
}

// log(w1/w2) = (|y - x2|^2 - |y - x1|^2) / (2 sigma^2) = (2 - 0) / 0.02 = 100.
TEST(ReweightNextBelief, LqgDensityRatio) {
  LqgProblem lqg;
  WeightedParticleBelief<LqgState> b;
  b.add({{5, 5}, 0}, 0.5);
  b.add({{5, 5}, 0}, 0.5);
  const std::vector<LqgState> next{{{0, 0}, 1}, {{1, 1}, 1}};
  auto out = reweight_next_belief<LqgProblem>(b, next, env::Vec2{0, 0}, Action{{0, 0}, {}}, lqg);
  ASSERT_GT(out.weights[1], 0.0);
  EXPECT_NEAR(std::log(out.weights[0] / out.weights[1]), 100.0, 1e-9);
  EXPECT_LT(out.weights[1] / out.weights[0], 1e-43);
}

TEST(ReweightNextBelief, ScaleAndOrderProperties) {
  LqgProblem lqg;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    auto b = init_root_belief(lqg, 8, rng);
    for (double& w : b.weights) w = rng.uniform(0.1, 2.0);
    const Action a{{rng.uniform(-10, 10), rng.uniform(-10, 10)}, {}};
    std::vector<LqgState> next;
    std::vector<env::Vec2> obs;
    for (const auto& s : b.particles) {
      auto tr = lqg.generate(s, a, rng);
      next.push_back(tr.state);
      obs.push_back(tr.observation);
    }
    const auto j = rng.index(next.size());
    auto out = reweight_next_belief<LqgProblem>(b, next, obs[j], a, lqg);
    ASSERT_EQ(out.size(), b.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_EQ(out.particles[i].x, next[i].x);
      EXPECT_DOUBLE_EQ(out.weights[i], b.weights[i] * lqg.obs_density(obs[j], a, next[i]));
    }
    const double c = rng.uniform(0.01, 100.0);
    auto scaled = b;
    for (double& w : scaled.weights) w *= c;
    auto out_scaled = reweight_next_belief<LqgProblem>(scaled, next, obs[j], a, lqg);
    std::vector<double> values(out.size());
    for (auto& v : values) v = rng.normal();
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_NEAR(out_scaled.weights[i], c * out.weights[i], 1e-12 * std::abs(c * out.weights[i]));
    }
    EXPECT_NEAR(weighted_mean_value(values, out.weights), weighted_mean_value(values, out_scaled.weights), 1e-9);
  }
}

TEST(WeightedMeanValue, Examples) {
  EXPECT_DOUBLE_EQ(weighted_mean_value(std::vector<double>{4, 0}, std::vector<double>{1, 3}), 1.0);
  EXPECT_DOUBLE_EQ(weighted_mean_value(std::vector<double>{-7.5}, std::vector<double>{0.3}), -7.5);
  EXPECT_DOUBLE_EQ(weighted_mean_value(std::vector<double>{1, 2, 3, 6}, std::vector<double>{2, 2, 2, 2}), 3.0);
  EXPECT_THROW(weighted_mean_value(std::vector<double>{1, 2}, std::vector<double>{0, 0}), DegenerateBelief);
  EXPECT_THROW(weighted_mean_value(std::vector<double>{1, 2}, std::vector<double>{1}), std::invalid_argument);
}

TEST(WeightedMeanValue, BoundedByExtremes) {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(20);
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = rng.normal(0, 100);
      w[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    }
    w[rng.index(n)] = 0.5;
    const double m = weighted_mean_value(v, w);
    EXPECT_GE(m, *std::min_element(v.begin(), v.end()) - 1e-9);
    EXPECT_LE(m, *std::max_element(v.begin(), v.end()) + 1e-9);
  }
}

TEST(UniformAction, HybridLabelFrequencies) {
  env::VdpTagProblem vdp;
  Rng rng(3);
  int ones = 0;
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    const Action a = uniform_action(vdp.action_space(), rng);
    ASSERT_TRUE(vdp.action_space().contains(a));
    ones += a.discrete[0];
  }
  // binomial sd = sqrt(0.25 / 1e4) = 0.005; 0.02 is four sd
  EXPECT_NEAR(static_cast<double>(ones) / kDraws, 0.5, 0.02);
}

TEST(UniformAction, BoxMeansAndDegenerateBound) {
  const auto box = ActionSpace::box({{0, 1}, {0, 1}});
  Rng rng(4);
  double m0 = 0, m1 = 0;
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    const Action a = uniform_action(box, rng);
    ASSERT_TRUE(box.contains(a));
    m0 += a.continuous[0];
    m1 += a.continuous[1];
  }
  // sd of the mean = sqrt(1/12 / 1e4) ~ 0.0029
  EXPECT_NEAR(m0 / kDraws, 0.5, 0.02);
  EXPECT_NEAR(m1 / kDraws, 0.5, 0.02);

  const auto flat = ActionSpace::box({{2.5, 2.5}, {-1, 1}});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(uniform_action(flat, rng).continuous[0], 2.5);
}

void check_metric(const ActionSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < 1000; ++i) {
    const Action x = uniform_action(space, rng);
    const Action y = uniform_action(space, rng);
    EXPECT_DOUBLE_EQ(space.distance(x, y), space.distance(y, x));
    EXPECT_EQ(space.distance(x, x), 0.0);
    EXPECT_GE(space.distance(x, y), 0.0);
    // translate both by the same offset, wrapped for periodic dims
    Action xs = x, ys = y;
    for (std::size_t d = 0; d < space.continuous_size(); ++d) {
      const auto& dim = space.continuous_dims()[d];
      const double t = rng.uniform(-dim.width(), dim.width());
      xs.continuous[d] += t;
      ys.continuous[d] += t;
      if (dim.periodic) {
        space.project(xs);
        space.project(ys);
      }
    }
    EXPECT_NEAR(space.distance(xs, ys), space.distance(x, y), 1e-9);
  }
}

TEST(DistanceMetric, PropertiesPerEnvironment) {
  check_metric(env::LqgProblem().action_space(), 11);
  check_metric(env::VdpTagProblem().action_space(), 12);
  check_metric(env::OneStepGaussianPomdp().action_space(), 13);
  check_metric(ActionSpace::box({{0, 15}, {-5, 5}, {-1, 1}}), 14);
}

TEST(DistanceMetric, PeriodicAndLabelPenalty) {
  env::VdpTagProblem vdp;
  const auto& space = vdp.action_space();
  const double two_pi = 2 * std::numbers::pi;
  EXPECT_NEAR(space.distance(Action{{0.1}, {0}}, Action{{two_pi - 0.1}, {0}}), 0.2, 1e-12);
  EXPECT_NEAR(space.metric().label_penalty(), std::numbers::pi, 1e-12);
  // same label is never farther than a differing label
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Action a = uniform_action(space, rng), b = uniform_action(space, rng);
    b.discrete[0] = a.discrete[0];
    Action c = uniform_action(space, rng);
    c.discrete[0] = 1 - a.discrete[0];
    EXPECT_LE(space.distance(a, b), space.distance(a, c));
  }
}

TEST(ActionSpace, ProjectWrapsAndClamps) {
  env::VdpTagProblem vdp;
  Action a{{-0.5}, {1}};
  vdp.action_space().project(a);
  EXPECT_NEAR(a.continuous[0], 2 * std::numbers::pi - 0.5, 1e-12);
  a.continuous[0] = 7.0;
  vdp.action_space().project(a);
  EXPECT_NEAR(a.continuous[0], 7.0 - 2 * std::numbers::pi, 1e-12);

  const auto box = ActionSpace::box({{-1, 1}});
  Action b{{3.0}, {}};
  box.project(b);
  EXPECT_EQ(b.continuous[0], 1.0);
}

TEST(Rng, SeededStreamsReproduce) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  Rng c = Rng(42).split(3), d = Rng(42).split(3), e = Rng(42).split(4);
  EXPECT_EQ(c(), d());
  EXPECT_NE(Rng(42).split(3)(), e());

  LqgProblem lqg;
  Rng r1(9), r2(9);
  const auto b1 = init_root_belief(lqg, 50, r1);
  const auto b2 = init_root_belief(lqg, 50, r2);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(b1.particles[i].x, b2.particles[i].x);
}

}  // namespace
}  // namespace vpw
