#include "pol/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pol {

std::vector<int> AugmentedState::fillings() const {
  std::vector<int> b(queues.size());
  for (std::size_t i = 0; i < queues.size(); ++i) b[i] = queues[i].filling;
  return b;
}

std::size_t ObservationHash::operator()(const Observation& z) const noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (int v : z.acks) h = mix_seed(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
  return static_cast<std::size_t>(h);
}

ModelParams::ModelParams(DistributionSpec arrival, std::vector<QueueParams> queues,
                         RewardSpec reward)
    : arrival_(std::move(arrival)), queues_(std::move(queues)), reward_(reward) {
  if (queues_.empty()) throw std::invalid_argument("model needs at least one queue");
  for (std::size_t i = 0; i < queues_.size(); ++i) {
    const auto& q = queues_[i];
    if (q.buffer_capacity < 1) {
      throw std::invalid_argument("queue " + std::to_string(i) + ": buffer_capacity must be >= 1");
    }
    if (!(q.ack_probability > 0.0 && q.ack_probability <= 1.0)) {
      throw std::invalid_argument("queue " + std::to_string(i) + ": ack_probability must be in (0, 1]");
    }
    capacities_.push_back(q.buffer_capacity);
    service_rates_.push_back(q.service.rate());
    ack_probs_.push_back(q.ack_probability);
  }
}

double ModelParams::offered_load() const {
  double total = 0.0;
  for (double mu : service_rates_) total += mu;
  return arrival_.rate() / total;
}

double job_count_pmf_mm(double arrival_rate, double service_rate, int k) {
  if (k < 0) return 0.0;
  const double success = arrival_rate / (arrival_rate + service_rate);
  return std::pow(1.0 - success, k) * success;
}

int sample_job_count(const DistributionSpec& service, double inter_arrival, Rng& rng) {
  if (const auto* d = std::get_if<Deterministic>(&service.kind())) {
    return static_cast<int>(std::floor(inter_arrival / d->value));
  }
  int served = 0;
  double elapsed = sample_duration(service, rng);
  while (elapsed <= inter_arrival) {
    ++served;
    elapsed += sample_duration(service, rng);
  }
  return served;
}

int sample_ack_observation(int available, double p, Rng& rng) {
  return sample_binomial(available, p, rng);
}

void step_with_job_counts(const AugmentedState& state, Action action, std::span<const int> k,
                          const ModelParams& model, Rng& rng, Transition& out) {
  const std::size_t n = state.size();
  const auto cap = model.capacities();
  const auto p = model.ack_probabilities();
  out.next.queues.resize(n);
  out.observation.acks.resize(n);
  out.available.resize(n);
  out.dropped = false;
  for (std::size_t i = 0; i < n; ++i) {
    const QueueState& s = state.queues[i];
    const int departed = std::min(s.filling, k[i]);
    int b = std::max(s.filling - k[i], 0);
    if (static_cast<int>(i) == action.queue) {
      if (b + 1 > cap[i]) {
        out.dropped = true;
      } else {
        ++b;
      }
    }
    const int available = departed + s.in_flight;
    const int seen = sample_ack_observation(available, p[i], rng);
    out.next.queues[i] = QueueState{b, available - seen, seen};
    out.observation.acks[i] = seen;
    out.available[i] = available;
  }
  thread_local std::vector<int> fill;
  fill.resize(n);
  for (std::size_t i = 0; i < n; ++i) fill[i] = out.next.queues[i].filling;
  out.reward = reward(model.reward_spec(), fill, cap, model.service_rates());
}

void step_generative_into(const AugmentedState& state, Action action, const ModelParams& model,
                          Rng& rng, Transition& out) {
  const std::size_t n = state.size();
  const double u = sample_duration(model.arrival(), rng);
  thread_local std::vector<int> k;
  k.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // An empty queue cannot serve anything; skip the draws.
    k[i] = state.queues[i].filling == 0 ? 0
                                         : sample_job_count(model.queues()[i].service, u, rng);
  }
  step_with_job_counts(state, action, k, model, rng, out);
}

Transition step_generative(const AugmentedState& state, Action action, const ModelParams& model,
                           Rng& rng) {
  Transition t;
  step_generative_into(state, action, model, rng, t);
  return t;
}

}  // namespace pol
