#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

#include "vpw/action_space.hpp"
#include "vpw/rng.hpp"
#include "vpw/voo.hpp"

namespace vpw {

struct VpwConfig {
  double k_a = 1.0;
  double alpha_a = 0.5;
  // UCB exploration constant
  double c = 1.0;
  VooConfig voo;
  // k_a * N^alpha_a treated as +inf: every call widens (pure VOO)
  bool widen_unbounded = false;

  void validate(const ActionSpace& space) const {
    if (!(k_a > 0.0)) throw std::invalid_argument("VpwConfig: k_a must be positive");
    if (!(alpha_a >= 0.0 && alpha_a <= 1.0)) throw std::invalid_argument("VpwConfig: alpha_a outside [0,1]");
    if (!(c >= 0.0)) throw std::invalid_argument("VpwConfig: c must be non-negative");
    voo.validate(space);
  }
};

/// argmax_i Q_i + c sqrt(log N / n_i); unvisited children score +inf and
/// ties go to the lowest index.
inline std::size_t ucb_select(std::span<const double> values, std::span<const int> counts, long total_visits,
                              double c) {
  if (values.empty() || values.size() != counts.size()) {
    throw std::invalid_argument("ucb_select: need matching non-empty values and counts");
  }
  const double log_n = std::log(static_cast<double>(std::max(total_visits, 1L)));
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (counts[i] <= 0) return i;
    const double score = values[i] + c * std::sqrt(log_n / static_cast<double>(counts[i]));
    if (i == 0 || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

inline std::size_t ucb_select(CenterView children, std::span<const int> counts, long total_visits, double c) {
  return ucb_select(children.values, counts, total_visits, c);
}

/// |C| = 0, or |C| <= k_a N^alpha_a, or unbounded widening.
inline bool should_widen(std::size_t num_children, long visits, const VpwConfig& cfg) {
  if (num_children == 0 || cfg.widen_unbounded) return true;
  return static_cast<double>(num_children) <=
         cfg.k_a * std::pow(static_cast<double>(visits), cfg.alpha_a);
}

struct ActionChoice {
  Action action;
  bool is_new = false;
  // index into the children when !is_new; children.size() otherwise
  std::size_t index = 0;
};

/// Voronoi progressive widening. A new action comes from voo_sample; the
/// caller is responsible for appending it to the children.
inline ActionChoice vpw_select(CenterView children, std::span<const int> counts, long total_visits,
                               const ActionSpace& space, const VpwConfig& cfg, Rng& rng) {
  if (counts.size() != children.size()) throw std::invalid_argument("vpw_select: counts length mismatch");
  if (should_widen(children.size(), total_visits, cfg)) {
    return {voo_sample(children, space, cfg.voo, rng), true, children.size()};
  }
  const std::size_t i = ucb_select(children, counts, total_visits, cfg.c);
  return {children.centers[i], false, i};
}

/// Plain action progressive widening: VPW with omega pinned to one. The
/// Unif[0,1] draw inside voo_sample still happens, so under a shared stream
/// this is bit-identical to vpw_select with omega = 1.
inline ActionChoice pw_select(CenterView children, std::span<const int> counts, long total_visits,
                              const ActionSpace& space, const VpwConfig& cfg, Rng& rng) {
  VpwConfig pw = cfg;
  pw.voo.omega = 1.0;
  return vpw_select(children, counts, total_visits, space, pw, rng);
}

enum class WideningKind { kVoronoi, kUniform };

inline ActionChoice select_action(WideningKind kind, CenterView children, std::span<const int> counts,
                                  long total_visits, const ActionSpace& space, const VpwConfig& cfg, Rng& rng) {
  return kind == WideningKind::kVoronoi ? vpw_select(children, counts, total_visits, space, cfg, rng)
                                        : pw_select(children, counts, total_visits, space, cfg, rng);
}

}  // namespace vpw
