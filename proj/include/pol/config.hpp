#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pol/baselines.hpp"
#include "pol/model.hpp"
#include "pol/planner.hpp"

namespace pol {

/// Raised for invalid configuration; the message starts with the key path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  DistributionSpec arrival = DistributionSpec::exponential(5.0);
  std::vector<QueueParams> queues;
  RewardSpec reward = RewardSpec::combined(100.0);
  PlannerParams planner;
  std::vector<Strategy> strategies;
  std::size_t t_m = 20;
  std::size_t t_e = 2000;
  std::uint64_t base_seed = 1;
  std::size_t run_offset = 0;
  std::string output_dir = "results";
  std::size_t workers = 1;  // 0 = one per hardware thread
  bool write_response_times = true;
  bool belief_trace = false;
  bool heatmap = true;

  std::size_t n_queues() const { return queues.size(); }
  ModelParams model() const { return ModelParams(arrival, queues, reward); }
  double offered_load() const { return model().offered_load(); }
};

/// Parses a JSON config document. `overrides` are "dotted.key=value" pairs
/// applied to the document first; values parse as JSON, falling back to a
/// plain string.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

/// The paper-default two-server setup (lambda = 5, mu = [4, 2], p = 0.6,
/// capacity 10, combined reward with kappa = 100).
std::string default_config_json();

/// Resolved config serialized back to JSON (written next to the results).
std::string to_json(const ExperimentConfig& config);

}  // namespace pol
