#pragma once

#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "vpw/action_space.hpp"
#include "vpw/rng.hpp"

namespace vpw {

enum class ProposalMode {
  kGaussian,
  // Uniform over the space; only for checking against the convergence analysis.
  kUniform,
};

struct VooConfig {
  // probability of sampling uniformly instead of from the best cell
  double omega = 0.8;
  // per continuous dim standard deviation of the Gaussian proposal
  std::vector<double> sigma;
  int max_rejections = 20;
  // proposals this close to the best center are accepted outright;
  // negative means "a tenth of the mean sigma"
  double accept_radius = -1.0;
  ProposalMode mode = ProposalMode::kGaussian;

  [[nodiscard]] double effective_accept_radius() const {
    if (accept_radius >= 0.0) return accept_radius;
    if (sigma.empty()) return 0.0;
    return std::accumulate(sigma.begin(), sigma.end(), 0.0) / static_cast<double>(sigma.size()) / 10.0;
  }

  void validate(const ActionSpace& space) const {
    if (!(omega >= 0.0 && omega <= 1.0)) throw std::invalid_argument("VooConfig: omega outside [0,1]");
    if (max_rejections < 1) throw std::invalid_argument("VooConfig: max_rejections must be >= 1");
    if (sigma.size() != space.continuous_size()) {
      throw std::invalid_argument("VooConfig: sigma needs one entry per continuous dim");
    }
    for (double s : sigma) {
      if (!(s > 0.0)) throw std::invalid_argument("VooConfig: sigma entries must be positive");
    }
  }
};

/// Sampled actions paired with their value estimates.
struct VoronoiCenterSet {
  std::vector<Action> centers;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return centers.size(); }
  [[nodiscard]] bool empty() const { return centers.empty(); }

  void add(Action a, double q) {
    centers.push_back(std::move(a));
    values.push_back(q);
  }
};

/// Non-owning view of centers and values, so tree nodes need not copy.
struct CenterView {
  std::span<const Action> centers;
  std::span<const double> values;

  CenterView(std::span<const Action> c, std::span<const double> v) : centers(c), values(v) {
    if (c.size() != v.size()) throw std::invalid_argument("CenterView: centers and values differ in length");
  }
  CenterView(const VoronoiCenterSet& set)  // NOLINT(google-explicit-constructor)
      : CenterView(set.centers, set.values) {}

  [[nodiscard]] std::size_t size() const { return centers.size(); }
  [[nodiscard]] bool empty() const { return centers.empty(); }
};

/// First index of the maximum; -1 when empty.
inline std::ptrdiff_t argmax_lowest(std::span<const double> values) {
  std::ptrdiff_t best = -1;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (best < 0 || values[i] > best_v) {
      best = static_cast<std::ptrdiff_t>(i);
      best_v = values[i];
    }
  }
  return best;
}

/// Optional record of what best_voronoi_cell did.
struct BestCellTrace {
  std::size_t best_index = 0;
  std::vector<Action> proposals;
  bool accepted = false;          // false when the rejection cap was hit
  bool accepted_by_radius = false;
};

/// True when `a` is at least as close to centers[best] as to every other center.
inline bool in_voronoi_cell(const Action& a, CenterView set, std::size_t best, const ActionSpace& space) {
  const double d_best = space.distance(a, set.centers[best]);
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i != best && space.distance(a, set.centers[i]) < d_best) return false;
  }
  return true;
}

/// Rejection-samples the Voronoi cell of the highest-valued center.
///
/// Proposals are N(a*, diag sigma^2) on the continuous dims (clamped or
/// wrapped back into the space) with the discrete labels of a*. After
/// max_rejections misses, the proposal closest to a* is returned.
inline Action best_voronoi_cell(CenterView set, const ActionSpace& space, const VooConfig& cfg, Rng& rng,
                                BestCellTrace* trace = nullptr) {
  if (set.empty()) throw std::invalid_argument("best_voronoi_cell: empty center set");
  const auto best = static_cast<std::size_t>(argmax_lowest(set.values));
  const Action& star = set.centers[best];
  const double radius = cfg.effective_accept_radius();
  if (trace) {
    *trace = BestCellTrace{};
    trace->best_index = best;
  }

  Action closest;
  double closest_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.max_rejections; ++k) {
    Action a;
    if (cfg.mode == ProposalMode::kGaussian) {
      a.continuous.resize(star.continuous.size());
      for (std::size_t i = 0; i < star.continuous.size(); ++i) {
        a.continuous[i] = rng.normal(star.continuous[i], cfg.sigma[i]);
      }
      a.discrete = star.discrete;
      space.project(a);
    } else {
      a = space.sample_uniform(rng);
      a.discrete = star.discrete;
    }
    if (trace) trace->proposals.push_back(a);

    const double d_star = space.distance(a, star);
    if (d_star <= radius) {
      if (trace) trace->accepted = trace->accepted_by_radius = true;
      return a;
    }
    if (in_voronoi_cell(a, set, best, space)) {
      if (trace) trace->accepted = true;
      return a;
    }
    if (d_star < closest_d) {
      closest_d = d_star;
      closest = std::move(a);
    }
  }
  return closest;
}

/// Uniform with probability omega (always when the set is empty), else a
/// sample from the best Voronoi cell. The Unif[0,1] draw always happens.
inline Action voo_sample(CenterView set, const ActionSpace& space, const VooConfig& cfg, Rng& rng,
                         BestCellTrace* trace = nullptr) {
  const double u = rng.uniform();
  if (u <= cfg.omega || set.empty()) return space.sample_uniform(rng);
  return best_voronoi_cell(set, space, cfg, rng, trace);
}

}  // namespace vpw
