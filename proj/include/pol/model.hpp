#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pol/distribution.hpp"
#include "pol/random.hpp"
#include "pol/rewards.hpp"

namespace pol {

struct QueueParams {
  int buffer_capacity;
  DistributionSpec service;
  double ack_probability;
};

/// Per-queue latent triple: buffer filling b, in-flight acks x, and acks
/// observed by the balancer in the latest epoch y.
struct QueueState {
  int filling = 0;
  int in_flight = 0;
  int observed = 0;

  friend bool operator==(const QueueState&, const QueueState&) = default;
};

struct AugmentedState {
  std::vector<QueueState> queues;

  static AugmentedState empty(std::size_t n) { return {std::vector<QueueState>(n)}; }
  std::size_t size() const { return queues.size(); }
  std::vector<int> fillings() const;

  friend bool operator==(const AugmentedState&, const AugmentedState&) = default;
};

struct Observation {
  std::vector<int> acks;

  static Observation zeros(std::size_t n) { return {std::vector<int>(n, 0)}; }
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct ObservationHash {
  std::size_t operator()(const Observation& z) const noexcept;
};

struct Action {
  int queue = 0;
  friend bool operator==(const Action&, const Action&) = default;
};

/// The planner's world model: arrival process, per-queue parameters, and the
/// reward it optimizes. May differ from the environment's true parameters.
class ModelParams {
 public:
  ModelParams(DistributionSpec arrival, std::vector<QueueParams> queues, RewardSpec reward);

  std::size_t num_queues() const { return queues_.size(); }
  const DistributionSpec& arrival() const { return arrival_; }
  const std::vector<QueueParams>& queues() const { return queues_; }
  const RewardSpec& reward_spec() const { return reward_; }

  std::span<const int> capacities() const { return capacities_; }
  std::span<const double> service_rates() const { return service_rates_; }
  std::span<const double> ack_probabilities() const { return ack_probs_; }

  /// lambda / sum(mu_i), each taken as the reciprocal mean of its spec.
  double offered_load() const;

 private:
  DistributionSpec arrival_;
  std::vector<QueueParams> queues_;
  RewardSpec reward_;
  std::vector<int> capacities_;
  std::vector<double> service_rates_;
  std::vector<double> ack_probs_;
};

/// Outcome of one generative epoch. `available` is min(b, k) + x per queue,
/// i.e. the binomial trial count the observation was drawn from; the belief
/// filter needs it to weight particles.
struct Transition {
  AugmentedState next;
  Observation observation;
  double reward = 0.0;
  std::vector<int> available;
  bool dropped = false;  // the routed job hit a full buffer
};

/// P(K = k) for exponential inter-arrivals (rate lambda) and exponential
/// service (rate mu): geometric on {0, 1, ...} with P(K = 0) = lambda/(lambda+mu).
double job_count_pmf_mm(double arrival_rate, double service_rate, int k);

/// Number of back-to-back service times that fit into `inter_arrival`.
/// No residual service carries over between calls.
int sample_job_count(const DistributionSpec& service, double inter_arrival, Rng& rng);

/// Acks observed this epoch out of `available` outstanding ones.
int sample_ack_observation(int available, double p, Rng& rng);

/// One epoch of the generative model with the served-job counts k given.
/// Only the ack thinning is random.
void step_with_job_counts(const AugmentedState& state, Action action, std::span<const int> k,
                          const ModelParams& model, Rng& rng, Transition& out);

/// One epoch of the generative model: draws u, then k_i per queue, then acks.
/// Writes into `out`, reusing its buffers.
void step_generative_into(const AugmentedState& state, Action action, const ModelParams& model,
                          Rng& rng, Transition& out);

Transition step_generative(const AugmentedState& state, Action action, const ModelParams& model,
                           Rng& rng);

}  // namespace pol
