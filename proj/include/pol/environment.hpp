#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "pol/model.hpp"

namespace pol {

/// Common-random-number streams for one run. Every strategy replaying the
/// run builds its own copy from the same seed and therefore sees the same
/// inter-arrival sequence and, per queue, the same j-th service requirement.
class CrnStreams {
 public:
  CrnStreams(const ModelParams& params, std::size_t n_jobs, std::uint64_t run_seed);

  const std::vector<double>& inter_arrivals() const { return inter_arrivals_; }
  /// Service requirement of the `position`-th job accepted at `queue`.
  double service_time(std::size_t queue, std::size_t position);
  /// Next uniform ack coin of `queue`.
  double ack_coin(std::size_t queue);

 private:
  std::vector<DistributionSpec> services_;
  std::vector<double> inter_arrivals_;
  std::vector<Rng> service_rngs_;
  std::vector<std::vector<double>> service_cache_;
  std::vector<Rng> ack_rngs_;
};

struct EndOfRun : std::runtime_error {
  EndOfRun() : std::runtime_error("all arrivals of the run have been consumed") {}
};

struct StepResult {
  Observation observation;
  std::vector<int> fillings_after_routing;
  std::vector<int> fillings;  // end of the epoch, just before the next arrival
  double reward = 0.0;
  bool dropped = false;
};

struct RunMetrics {
  long jobs_arrived = 0;
  long jobs_dropped = 0;
  long jobs_completed = 0;
  long residual_jobs = 0;  // still queued at the horizon; in no other count
  double drop_rate = 0.0;  // NaN before the first arrival
  std::vector<double> response_times;
  double cumulative_reward = 0.0;
  std::vector<double> reward_trace;
  std::vector<double> decision_latencies;  // seconds, filled by the harness

  double mean_response() const;
  /// Linear-interpolated percentile, q in [0, 1]; NaN when empty.
  double response_percentile(double q) const;
};

/// Continuous-time FIFO network with finite buffers, exact residual service
/// across epochs and per-epoch binomial thinning of pending acks.
class Environment {
 public:
  Environment(ModelParams params, std::size_t n_jobs, std::uint64_t run_seed);

  std::size_t num_queues() const { return queues_.size(); }
  bool done() const { return next_arrival_ >= streams_.inter_arrivals().size(); }
  double clock() const { return clock_; }
  std::vector<int> fillings() const;
  const ModelParams& params() const { return params_; }
  const CrnStreams& streams() const { return streams_; }

  /// Route the arriving job, serve for one inter-arrival time, thin acks.
  StepResult step(Action action);

  RunMetrics finalize() const;

  struct QueueCounters {
    long routed = 0;  // accepted into the buffer
    long dropped = 0;
    long completed = 0;
    long acks_observed = 0;
    int ack_pool = 0;
  };
  const QueueCounters& counters(std::size_t queue) const { return counters_[queue]; }
  int queue_length(std::size_t queue) const { return static_cast<int>(queues_[queue].size()); }

 private:
  struct Job {
    double arrival_time;
    double service_requirement;
    double remaining_work;
  };

  ModelParams params_;
  CrnStreams streams_;
  std::vector<std::deque<Job>> queues_;
  std::vector<QueueCounters> counters_;
  std::size_t next_arrival_ = 0;
  double clock_ = 0.0;
  RunMetrics metrics_;
};

inline Environment make_env(const ModelParams& params, std::size_t n_jobs, std::uint64_t run_seed) {
  return Environment(params, n_jobs, run_seed);
}

}  // namespace pol
