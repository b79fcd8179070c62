#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpw/rng.hpp"

namespace vpw {

struct CemParameter {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  // sample and refit in log space (bounds must be positive)
  bool log_scale = false;
  double initial_mean = 0.5;
  double initial_std = 0.25;
};

/// Objective: parameter assignment (natural scale) and a private stream;
/// higher is better. Throwing counts as a failed evaluation.
using CemObjective = std::function<double(const std::vector<double>&, Rng&)>;

struct CemSpec {
  std::vector<CemParameter> parameters;
  int population = 50;
  double elite_fraction = 0.2;
  int iterations = 20;
  // new = smoothing * refit + (1 - smoothing) * old, for mean and std
  double smoothing = 0.7;
  // floor on the per-parameter std as a fraction of the (search-space) width
  double std_floor_fraction = 0.01;
  CemObjective objective;

  [[nodiscard]] int elite_count() const {
    return std::max(1, static_cast<int>(std::lround(elite_fraction * population)));
  }

  void validate() const {
    if (parameters.empty()) throw std::invalid_argument("cem: no parameters");
    for (const auto& p : parameters) {
      if (!(p.upper >= p.lower)) throw std::invalid_argument("cem: parameter " + p.name + " has upper < lower");
      if (p.log_scale && !(p.lower > 0.0)) throw std::invalid_argument("cem: log-scale parameter needs lower > 0");
    }
    if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) throw std::invalid_argument("cem: elite fraction");
    // elite_fraction = 1 is the degenerate full-population refit
    if (elite_fraction < 1.0 && population < 2 * elite_count()) {
      throw std::invalid_argument("cem: population must be at least twice the elite count");
    }
    if (iterations < 0) throw std::invalid_argument("cem: negative iterations");
    if (!(smoothing > 0.0 && smoothing <= 1.0)) throw std::invalid_argument("cem: smoothing outside (0,1]");
    if (!objective) throw std::invalid_argument("cem: missing objective");
  }
};

struct CemIteration {
  int iteration = 0;
  std::vector<double> mean;      // natural scale
  std::vector<double> stddev;    // search scale
  double elite_mean_score = 0.0;
  double best_score = 0.0;
  int failures = 0;
};

struct CemResult {
  std::vector<double> best_params;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<CemIteration> history;
};

/// Cross-entropy search over a box with a diagonal Gaussian.
///
/// Elites are drawn from the current population together with the previous
/// elites, so for a deterministic objective the elite mean score never
/// decreases. Member j of iteration i evaluates on stream (i, j).
inline CemResult cem_optimize(const CemSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t dim = spec.parameters.size();
  auto to_search = [&](std::size_t i, double v) { return spec.parameters[i].log_scale ? std::log(v) : v; };
  auto to_natural = [&](std::size_t i, double v) { return spec.parameters[i].log_scale ? std::exp(v) : v; };

  std::vector<double> lo(dim), hi(dim), mean(dim), sd(dim), floor(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto& p = spec.parameters[i];
    lo[i] = to_search(i, p.lower);
    hi[i] = to_search(i, p.upper);
    mean[i] = std::clamp(to_search(i, p.initial_mean), lo[i], hi[i]);
    floor[i] = spec.std_floor_fraction * (hi[i] - lo[i]);
    // initial_std is measured in search space (log units for log-scale parameters)
    sd[i] = std::max(p.initial_std, floor[i]);
  }

  CemResult result;
  result.best_params.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) result.best_params[i] = to_natural(i, mean[i]);

  struct Member {
    std::vector<double> x;  // search scale
    double score;
  };
  std::vector<Member> elites;
  const auto n_elite = static_cast<std::size_t>(spec.elite_count());
  const Rng base = rng.split(0xce11);

  for (int it = 0; it < spec.iterations; ++it) {
    std::vector<Member> pool = elites;
    int failures = 0;
    for (int j = 0; j < spec.population; ++j) {
      Rng member_rng = base.split(static_cast<std::uint64_t>(it)).split(static_cast<std::uint64_t>(j));
      Member m{std::vector<double>(dim), 0.0};
      for (std::size_t i = 0; i < dim; ++i) m.x[i] = std::clamp(member_rng.normal(mean[i], sd[i]), lo[i], hi[i]);
      std::vector<double> natural(dim);
      for (std::size_t i = 0; i < dim; ++i) natural[i] = to_natural(i, m.x[i]);
      Rng eval_rng = member_rng.split(1);
      try {
        m.score = spec.objective(natural, eval_rng);
        if (std::isnan(m.score)) m.score = -std::numeric_limits<double>::infinity();
      } catch (const std::exception&) {
        m.score = -std::numeric_limits<double>::infinity();
      }
      if (!std::isfinite(m.score) && m.score < 0) ++failures;
      if (m.score > result.best_score) {
        result.best_score = m.score;
        result.best_params = natural;
      }
      pool.push_back(std::move(m));
    }

    std::stable_sort(pool.begin(), pool.end(), [](const Member& a, const Member& b) { return a.score > b.score; });
    std::vector<Member> next_elites;
    for (const auto& m : pool) {
      if (next_elites.size() == n_elite) break;
      if (std::isfinite(m.score)) next_elites.push_back(m);
    }

    if (!next_elites.empty()) {
      elites = std::move(next_elites);
      for (std::size_t i = 0; i < dim; ++i) {
        double mu = 0.0;
        for (const auto& m : elites) mu += m.x[i];
        mu /= static_cast<double>(elites.size());
        double var = 0.0;
        for (const auto& m : elites) var += (m.x[i] - mu) * (m.x[i] - mu);
        var /= static_cast<double>(elites.size());
        mean[i] = spec.smoothing * mu + (1.0 - spec.smoothing) * mean[i];
        sd[i] = std::max(spec.smoothing * std::sqrt(var) + (1.0 - spec.smoothing) * sd[i], floor[i]);
      }
    }

    CemIteration rec;
    rec.iteration = it;
    rec.mean.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) rec.mean[i] = to_natural(i, mean[i]);
    rec.stddev = sd;
    double s = 0.0;
    for (const auto& m : elites) s += m.score;
    rec.elite_mean_score = elites.empty() ? -std::numeric_limits<double>::infinity()
                                          : s / static_cast<double>(elites.size());
    rec.best_score = result.best_score;
    rec.failures = failures;
    result.history.push_back(std::move(rec));
  }
  return result;
}

}  // namespace vpw
