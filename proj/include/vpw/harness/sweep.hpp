#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "vpw/harness/runner.hpp"

namespace vpw::harness {

struct WidthSweepSpec {
  std::vector<int> state_widths{2, 5, 10};
  std::vector<int> action_widths{20, 60, 200};
  double action_width_decay = 0.4;
  int episodes = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  // filter size for the initial belief the C_s root particles are drawn from
  int particles = 10000;
  nlohmann::json env_params = nlohmann::json::object();
};

struct WidthSweepRow {
  int state_width = 0;
  int action_width = 0;
  MetricSummary distance;
};

inline ExperimentSpec width_cell_spec(const WidthSweepSpec& sweep, int state_width, int action_width) {
  ExperimentSpec spec;
  spec.env = "lqg";
  spec.env_params = sweep.env_params;
  spec.solver = "vowss";
  spec.preset = "lqg-vowss";
  spec.solver_params = {{"state_width", state_width},
                        {"action_width", action_width},
                        {"action_width_decay", sweep.action_width_decay}};
  spec.episodes = sweep.episodes;
  spec.seed = sweep.seed;
  spec.threads = sweep.threads;
  spec.particles = sweep.particles;
  // only the first action is scored
  spec.max_steps = 1;
  spec.timing = false;
  return spec;
}

/// First-action distance to the analytic LQG optimum over the (C_s, C_a)
/// grid; every cell reuses the same episode seeds.
inline std::vector<WidthSweepRow> vowss_width_sweep(const WidthSweepSpec& sweep) {
  for (int w : sweep.state_widths) {
    if (w < 1) throw SpecError("state widths must be positive");
  }
  for (int w : sweep.action_widths) {
    if (w < 1) throw SpecError("action widths must be positive");
  }
  std::vector<WidthSweepRow> out;
  for (int cs : sweep.state_widths) {
    for (int ca : sweep.action_widths) {
      const auto result = run_experiment(width_cell_spec(sweep, cs, ca));
      out.push_back({cs, ca, result.summaries.front().distance});
    }
  }
  return out;
}

inline void write_width_sweep_csv(std::ostream& os, const std::vector<WidthSweepRow>& rows) {
  os << "state_width,action_width,episodes,mean_distance,stderr_distance\n";
  for (const auto& r : rows) {
    os << r.state_width << ',' << r.action_width << ',' << r.distance.n << ',' << fmt(r.distance.mean) << ','
       << (r.distance.stderr_ ? fmt(*r.distance.stderr_) : "") << '\n';
  }
}

}  // namespace vpw::harness
