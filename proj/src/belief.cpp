#include "pol/belief.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pol {
namespace {

constexpr int kLogFactorialTable = 512;

const std::array<double, kLogFactorialTable>& log_factorials() {
  static const auto table = [] {
    std::array<double, kLogFactorialTable> t{};
    for (int i = 1; i < kLogFactorialTable; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  return table;
}

double log_factorial(int n) {
  if (n < kLogFactorialTable) return log_factorials()[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double percentile(std::span<const int> sorted, double q) {
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void condition_on(AugmentedState& s, std::span<const int> available, const Observation& z) {
  for (std::size_t i = 0; i < z.acks.size(); ++i) {
    s.queues[i].observed = z.acks[i];
    s.queues[i].in_flight = available[i] - z.acks[i];
  }
}

QueueState clamped(QueueState q, int z) {
  q.in_flight = std::max(q.in_flight + q.observed - z, 0);
  q.observed = z;
  return q;
}

// Re-draws the departures of one queue from its source particle so that z is
// possible: at least z - x jobs leave, exactly that many when p = 1.
QueueState repaired(const QueueState& prev, int departed, int z, double p, bool routed, int cap) {
  int d = p >= 1.0 ? z - prev.in_flight : std::max(departed, z - prev.in_flight);
  d = std::clamp(d, 0, prev.filling);
  int b = prev.filling - d;
  if (routed && b < cap) ++b;
  return QueueState{b, std::max(d + prev.in_flight - z, 0), z};
}

}  // namespace

double binomial_pmf(int n, int k, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  const double log_c = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
  return std::exp(log_c + k * std::log(p) + (n - k) * std::log1p(-p));
}

Belief init_belief(std::size_t n_particles, const AugmentedState& initial) {
  if (n_particles == 0) throw std::invalid_argument("belief needs at least one particle");
  return Belief{std::vector<AugmentedState>(n_particles, initial)};
}

double observation_likelihood(std::span<const int> prev_available, const Observation& z,
                              std::span<const double> p) {
  double w = 1.0;
  for (std::size_t i = 0; i < z.acks.size(); ++i) {
    w *= binomial_pmf(prev_available[i], z.acks[i], p[i]);
    if (w == 0.0) return 0.0;
  }
  return w;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count,
                                             Rng& rng) {
  double total = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i];
    if (weights[i] > 0.0) last_positive = i;
  }
  std::vector<std::size_t> picks;
  picks.reserve(count);
  const double step = total / static_cast<double>(count);
  double target = uniform01(rng) * step;
  double cumulative = 0.0;
  std::size_t j = 0;
  for (std::size_t m = 0; m < count; ++m) {
    while (j < last_positive && cumulative + weights[j] <= target) {
      cumulative += weights[j];
      ++j;
    }
    picks.push_back(j);
    target += step;
  }
  return picks;
}

Belief sir_update(const Belief& belief, Action action, const Observation& z,
                  const ModelParams& model, const SirBudget& budget, Rng& rng,
                  SirReport* report) {
  if (belief.particles.empty()) throw std::invalid_argument("sir_update on an empty belief");
  const std::size_t n = belief.size();
  const auto p = model.ack_probabilities();

  std::vector<AugmentedState> candidates;
  std::vector<std::vector<int>> available;
  std::vector<std::size_t> sources;
  std::vector<double> weights;
  candidates.reserve(budget.simulations);
  sources.reserve(budget.simulations);
  available.reserve(budget.simulations);
  weights.reserve(budget.simulations);

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const bool timed = budget.seconds > 0.0;
  // Sources cycle through a random permutation of the particles: every
  // particle is propagated equally often, so uninformative weights add no
  // drift, and systematic resampling never sees a structured order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  Transition t;
  std::size_t nonzero = 0;
  for (std::size_t sim = 0; sim < budget.simulations; ++sim) {
    if (timed && (sim & 63) == 0 && sim > 0 &&
        std::chrono::duration<double>(Clock::now() - start).count() >= budget.seconds) {
      break;
    }
    const std::size_t src = order[sim % n];
    step_generative_into(belief.particles[src], action, model, rng, t);
    const double w = observation_likelihood(t.available, z, p);
    if (w > 0.0) {
      ++nonzero;
      condition_on(t.next, t.available, z);
    }
    candidates.push_back(t.next);
    available.push_back(t.available);
    sources.push_back(src);
    weights.push_back(w);
  }
  const std::size_t simulated = weights.size();

  Belief out;
  out.particles.reserve(n);
  if (nonzero > 0) {
    for (std::size_t idx : systematic_resample(weights, n, rng)) {
      out.particles.push_back(candidates[idx]);
    }
  } else if (!candidates.empty()) {
    // No candidate explains every queue at once (common for many queues and
    // ack probabilities near one). Resample each queue on its own
    // likelihood factor; queues no candidate explains are repaired.
    out.particles.assign(n, AugmentedState::empty(z.acks.size()));
    std::vector<double> wq(candidates.size());
    for (std::size_t i = 0; i < z.acks.size(); ++i) {
      double total = 0.0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        wq[c] = binomial_pmf(available[c][i], z.acks[i], p[i]);
        total += wq[c];
      }
      if (total > 0.0) {
        auto picks = systematic_resample(wq, n, rng);
        std::shuffle(picks.begin(), picks.end(), rng);
        for (std::size_t m = 0; m < n; ++m) {
          QueueState q = candidates[picks[m]].queues[i];
          q.observed = z.acks[i];
          q.in_flight = available[picks[m]][i] - z.acks[i];
          out.particles[m].queues[i] = q;
        }
      } else {
        std::uniform_int_distribution<std::size_t> any(0, candidates.size() - 1);
        const bool routed = static_cast<int>(i) == action.queue;
        const int cap = model.capacities()[i];
        for (std::size_t m = 0; m < n; ++m) {
          const std::size_t c = any(rng);
          const QueueState& prev = belief.particles[sources[c]].queues[i];
          out.particles[m].queues[i] =
              repaired(prev, available[c][i] - prev.in_flight, z.acks[i], p[i], routed, cap);
        }
      }
    }
  } else {
    // Zero budget: propagate the prior once per particle, no reweighting.
    for (const auto& s : belief.particles) {
      step_generative_into(s, action, model, rng, t);
      for (std::size_t i = 0; i < t.next.size(); ++i) {
        t.next.queues[i] = clamped(t.next.queues[i], z.acks[i]);
      }
      out.particles.push_back(t.next);
    }
  }

  if (report != nullptr) {
    report->simulations = simulated;
    report->nonzero_weights = nonzero;
    report->degenerate = nonzero == 0;
  }
  return out;
}

std::vector<QueueBeliefStats> belief_stats(const Belief& belief) {
  if (belief.particles.empty()) throw std::invalid_argument("belief_stats on an empty belief");
  const std::size_t nq = belief.particles.front().size();
  std::vector<QueueBeliefStats> stats(nq);
  std::vector<int> column(belief.size());
  for (std::size_t i = 0; i < nq; ++i) {
    double sum = 0.0;
    for (std::size_t m = 0; m < belief.size(); ++m) {
      column[m] = belief.particles[m].queues[i].filling;
      sum += column[m];
    }
    std::sort(column.begin(), column.end());
    stats[i] = {sum / static_cast<double>(column.size()), percentile(column, 0.10),
                percentile(column, 0.90)};
  }
  return stats;
}

}  // namespace pol
