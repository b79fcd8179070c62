#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpw/rng.hpp"

namespace vpw {

/// A point in a (possibly hybrid) action space: continuous coordinates plus
/// one label index per discrete dimension.
struct Action {
  std::vector<double> continuous;
  std::vector<int> discrete;

  friend bool operator==(const Action&, const Action&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Action& a) {
  os << '[';
  for (std::size_t i = 0; i < a.continuous.size(); ++i) {
    if (i) os << ", ";
    os << a.continuous[i];
  }
  for (int label : a.discrete) os << " | " << label;
  return os << ']';
}

struct ContinuousDim {
  double lower = 0.0;
  double upper = 1.0;
  // Periodic dims live on [lower, upper) and wrap around.
  bool periodic = false;

  [[nodiscard]] double width() const { return upper - lower; }
};

/// Distance on hybrid actions.
///
/// Continuous part: Euclidean, with periodic dims using the wrapped absolute
/// difference. Discrete part: a fixed `label_penalty` per differing label.
/// Defaults the penalty to the largest continuous distance, so two actions
/// sharing labels are never farther apart than two that differ.
class DistanceMetric {
 public:
  DistanceMetric() = default;
  DistanceMetric(const std::vector<ContinuousDim>& dims, std::optional<double> label_penalty)
      : periods_(dims.size(), 0.0) {
    double diam_sq = 0.0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const double w = dims[i].width();
      if (dims[i].periodic) {
        periods_[i] = w;
        diam_sq += 0.25 * w * w;
      } else {
        diam_sq += w * w;
      }
    }
    diameter_ = std::sqrt(diam_sq);
    label_penalty_ = label_penalty.value_or(diameter_);
  }

  [[nodiscard]] double operator()(const Action& x, const Action& y) const {
    double sq = 0.0;
    for (std::size_t i = 0; i < x.continuous.size(); ++i) {
      double d = std::abs(x.continuous[i] - y.continuous[i]);
      if (i < periods_.size() && periods_[i] > 0.0) {
        d = std::fmod(d, periods_[i]);
        d = std::min(d, periods_[i] - d);
      }
      sq += d * d;
    }
    double dist = std::sqrt(sq);
    for (std::size_t j = 0; j < x.discrete.size(); ++j) {
      if (x.discrete[j] != y.discrete[j]) dist += label_penalty_;
    }
    return dist;
  }

  [[nodiscard]] bool is_periodic(std::size_t dim) const { return periods_.at(dim) > 0.0; }
  [[nodiscard]] double diameter() const { return diameter_; }
  [[nodiscard]] double label_penalty() const { return label_penalty_; }

 private:
  std::vector<double> periods_;
  double diameter_ = 0.0;
  double label_penalty_ = 0.0;
};

/// Box of continuous dims times a product of finite label sets.
class ActionSpace {
 public:
  ActionSpace() = default;

  explicit ActionSpace(std::vector<ContinuousDim> continuous, std::vector<int> label_counts = {},
                       std::optional<double> label_penalty = std::nullopt)
      : continuous_(std::move(continuous)), label_counts_(std::move(label_counts)) {
    for (const auto& d : continuous_) {
      if (!(d.upper >= d.lower)) throw std::invalid_argument("action bound with upper < lower");
      if (d.periodic && !(d.upper > d.lower)) throw std::invalid_argument("periodic dim needs positive width");
    }
    for (int n : label_counts_) {
      if (n < 1) throw std::invalid_argument("discrete dimension needs at least one label");
    }
    metric_ = DistanceMetric(continuous_, label_penalty);
  }

  /// Plain non-periodic box.
  static ActionSpace box(const std::vector<std::pair<double, double>>& bounds) {
    std::vector<ContinuousDim> dims;
    dims.reserve(bounds.size());
    for (auto [lo, hi] : bounds) dims.push_back({lo, hi, false});
    return ActionSpace(std::move(dims));
  }

  [[nodiscard]] const std::vector<ContinuousDim>& continuous_dims() const { return continuous_; }
  [[nodiscard]] const std::vector<int>& label_counts() const { return label_counts_; }
  [[nodiscard]] std::size_t continuous_size() const { return continuous_.size(); }
  [[nodiscard]] std::size_t discrete_size() const { return label_counts_.size(); }
  [[nodiscard]] const DistanceMetric& metric() const { return metric_; }

  [[nodiscard]] double distance(const Action& x, const Action& y) const { return metric_(x, y); }

  [[nodiscard]] bool contains(const Action& a) const {
    if (a.continuous.size() != continuous_.size() || a.discrete.size() != label_counts_.size()) return false;
    for (std::size_t i = 0; i < continuous_.size(); ++i) {
      const auto& d = continuous_[i];
      const double v = a.continuous[i];
      if (!std::isfinite(v) || v < d.lower) return false;
      if (d.periodic ? v >= d.upper : v > d.upper) return false;
    }
    for (std::size_t j = 0; j < label_counts_.size(); ++j) {
      if (a.discrete[j] < 0 || a.discrete[j] >= label_counts_[j]) return false;
    }
    return true;
  }

  /// Clamp non-periodic coordinates and wrap periodic ones into the space.
  void project(Action& a) const {
    for (std::size_t i = 0; i < continuous_.size(); ++i) {
      const auto& d = continuous_[i];
      double& v = a.continuous[i];
      if (d.periodic) {
        v = d.lower + std::fmod(v - d.lower, d.width());
        if (v < d.lower) v += d.width();
        if (v >= d.upper) v = d.lower;  // fmod rounding at the seam
      } else {
        v = std::clamp(v, d.lower, d.upper);
      }
    }
  }

  /// Independent uniform draw per dimension.
  Action sample_uniform(Rng& rng) const {
    Action a;
    a.continuous.reserve(continuous_.size());
    for (const auto& d : continuous_) {
      a.continuous.push_back(d.width() > 0.0 ? rng.uniform(d.lower, d.upper) : d.lower);
    }
    a.discrete.reserve(label_counts_.size());
    for (int n : label_counts_) a.discrete.push_back(static_cast<int>(rng.index(static_cast<std::size_t>(n))));
    return a;
  }

 private:
  std::vector<ContinuousDim> continuous_;
  std::vector<int> label_counts_;
  DistanceMetric metric_;
};

inline Action uniform_action(const ActionSpace& space, Rng& rng) { return space.sample_uniform(rng); }

}  // namespace vpw
