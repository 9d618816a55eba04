#include "pol/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pol {
namespace {

constexpr std::uint64_t kArrivalStream = 1;
constexpr std::uint64_t kServiceStream = 2;
constexpr std::uint64_t kAckStream = 3;

}  // namespace

CrnStreams::CrnStreams(const ModelParams& params, std::size_t n_jobs, std::uint64_t run_seed) {
  Rng arrivals(derive_seed(run_seed, kArrivalStream));
  inter_arrivals_.reserve(n_jobs);
  for (std::size_t j = 0; j < n_jobs; ++j) {
    inter_arrivals_.push_back(sample_duration(params.arrival(), arrivals));
  }
  for (std::size_t i = 0; i < params.num_queues(); ++i) {
    services_.push_back(params.queues()[i].service);
    service_rngs_.emplace_back(derive_seed(run_seed, kServiceStream, i));
    ack_rngs_.emplace_back(derive_seed(run_seed, kAckStream, i));
  }
  service_cache_.resize(params.num_queues());
}

double CrnStreams::service_time(std::size_t queue, std::size_t position) {
  auto& cache = service_cache_[queue];
  while (cache.size() <= position) {
    cache.push_back(sample_duration(services_[queue], service_rngs_[queue]));
  }
  return cache[position];
}

double CrnStreams::ack_coin(std::size_t queue) { return uniform01(ack_rngs_[queue]); }

double RunMetrics::mean_response() const {
  if (response_times.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double r : response_times) s += r;
  return s / static_cast<double>(response_times.size());
}

double RunMetrics::response_percentile(double q) const {
  if (response_times.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> sorted = response_times;
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Environment::Environment(ModelParams params, std::size_t n_jobs, std::uint64_t run_seed)
    : params_(std::move(params)),
      streams_(params_, n_jobs, run_seed),
      queues_(params_.num_queues()),
      counters_(params_.num_queues()) {}

std::vector<int> Environment::fillings() const {
  std::vector<int> b(queues_.size());
  for (std::size_t i = 0; i < queues_.size(); ++i) b[i] = static_cast<int>(queues_[i].size());
  return b;
}

StepResult Environment::step(Action action) {
  if (done()) throw EndOfRun();
  const std::size_t n = queues_.size();
  if (action.queue < 0 || static_cast<std::size_t>(action.queue) >= n) {
    throw std::out_of_range("action targets a queue that does not exist");
  }
  StepResult out;

  ++metrics_.jobs_arrived;
  const auto a = static_cast<std::size_t>(action.queue);
  auto& target = counters_[a];
  if (static_cast<int>(queues_[a].size()) >= params_.capacities()[a]) {
    ++target.dropped;
    ++metrics_.jobs_dropped;
    out.dropped = true;
  } else {
    const double s = streams_.service_time(a, static_cast<std::size_t>(target.routed));
    ++target.routed;
    queues_[a].push_back(Job{clock_, s, s});
  }
  out.fillings_after_routing = fillings();

  const double u = streams_.inter_arrivals()[next_arrival_++];
  for (std::size_t i = 0; i < n; ++i) {
    auto& q = queues_[i];
    double used = 0.0;
    while (!q.empty()) {
      Job& head = q.front();
      if (head.remaining_work <= u - used) {
        used += head.remaining_work;
        metrics_.response_times.push_back(clock_ + used - head.arrival_time);
        ++counters_[i].completed;
        ++counters_[i].ack_pool;
        q.pop_front();
      } else {
        head.remaining_work -= u - used;
        break;
      }
    }
  }
  clock_ += u;

  out.observation.acks.assign(n, 0);
  const auto p = params_.ack_probabilities();
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = counters_[i];
    int seen = 0;
    for (int k = 0; k < c.ack_pool; ++k) seen += streams_.ack_coin(i) < p[i] ? 1 : 0;
    c.ack_pool -= seen;
    c.acks_observed += seen;
    out.observation.acks[i] = seen;
  }

  out.fillings = fillings();
  out.reward = reward(params_.reward_spec(), out.fillings_after_routing, params_.capacities(),
                      params_.service_rates());
  metrics_.cumulative_reward += out.reward;
  metrics_.reward_trace.push_back(out.reward);
  return out;
}

RunMetrics Environment::finalize() const {
  RunMetrics m = metrics_;
  m.jobs_completed = 0;
  m.residual_jobs = 0;
  for (std::size_t i = 0; i < queues_.size(); ++i) {
    m.jobs_completed += counters_[i].completed;
    m.residual_jobs += static_cast<long>(queues_[i].size());
  }
  m.drop_rate = m.jobs_arrived == 0
                    ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(m.jobs_dropped) / static_cast<double>(m.jobs_arrived);
  return m;
}

}  // namespace pol
