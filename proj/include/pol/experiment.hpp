#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "pol/config.hpp"
#include "pol/environment.hpp"

namespace pol {

/// One line of runs.csv.
struct RunRow {
  std::size_t run_id = 0;
  std::string strategy;
  std::uint64_t seed = 0;
  double eta = 0.0;
  long jobs_arrived = 0;
  long jobs_dropped = 0;
  double drop_rate = 0.0;
  double mean_response = 0.0;
  double p95_response = 0.0;
  double cumulative_reward = 0.0;
};

struct BeliefTracePoint {
  std::size_t epoch;
  std::size_t queue;
  int true_filling;
  double mean;
  double p10;
  double p90;
};

struct PolDiagnostics {
  std::size_t decisions = 0;
  std::size_t degenerate_updates = 0;
  std::size_t reused_roots = 0;
  double total_latency = 0.0;
  std::size_t simulations = 0;
};

/// (b1, b2, action) -> count, for two-queue systems.
using HeatmapCounts = std::map<std::tuple<int, int, int>, long>;

struct RunOutcome {
  RunRow row;
  RunMetrics metrics;
  std::vector<BeliefTracePoint> belief_trace;
  HeatmapCounts heatmap;
  PolDiagnostics pol;
};

/// Replays run `run_id` (CRN seed base_seed + run_id) under one strategy.
RunOutcome run_strategy(const ExperimentConfig& config, const Strategy& strategy,
                        std::size_t run_id, bool record_belief_trace = false);

/// Seed of the decision randomness for (run, strategy); independent of the
/// CRN streams so those stay identical across strategies.
std::uint64_t strategy_seed(std::uint64_t base_seed, std::size_t run_id, const std::string& strategy);

struct StrategySummary {
  std::string strategy;
  std::size_t runs = 0;
  double drop_median = 0.0;
  double drop_p5 = 0.0;
  double drop_p95 = 0.0;
  double mean_response = 0.0;
  double mean_reward = 0.0;
};

struct Summary {
  std::vector<StrategySummary> strategies;

  const StrategySummary* find(const std::string& strategy) const;
  std::string to_text() const;
};

struct ExperimentResult {
  std::vector<RunOutcome> outcomes;  // ordered by run_id, then config strategy order
  Summary summary;
  std::string summary_text;
};

/// Runs every (run, strategy) pair, writes the result CSVs into
/// config.output_dir and returns the summary recomputed from runs.csv text.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Aggregates runs.csv from one or more result directories.
Summary summarize(const std::vector<std::string>& result_dirs);

Summary summarize_rows(const std::vector<RunRow>& rows);
std::string format_runs_csv(const std::vector<RunRow>& rows);
std::vector<RunRow> parse_runs_csv(const std::string& text, const std::string& source);

/// Fixed 9-significant-digit formatting used in every CSV.
std::string format_number(double v);

struct SweepPoint {
  double eta;
  std::string output_dir;
  Summary summary;
};

/// Rescales the arrival distribution to each target offered load and runs
/// the experiment into output_dir/eta_<value>.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& config, const std::vector<double>& etas);

std::string format_sweep(const std::vector<SweepPoint>& points);

}  // namespace pol
