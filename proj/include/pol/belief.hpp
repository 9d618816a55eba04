#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pol/model.hpp"

namespace pol {

/// Unweighted particle approximation of the filtering distribution over
/// the latent augmented state.
struct Belief {
  std::vector<AugmentedState> particles;

  std::size_t size() const { return particles.size(); }
};

Belief init_belief(std::size_t n_particles, const AugmentedState& initial);

/// p(z | transition): product over queues of Binomial(available_i, p_i) at z_i.
double observation_likelihood(std::span<const int> prev_available, const Observation& z,
                              std::span<const double> p);

/// How much simulation effort one filter update may spend. A positive
/// `seconds` adds a wall-clock cap on top of the simulation count; a zero
/// count with zero seconds is the documented degenerate budget.
struct SirBudget {
  std::size_t simulations = 1000;
  double seconds = 0.0;
};

struct SirReport {
  std::size_t simulations = 0;
  std::size_t nonzero_weights = 0;
  bool degenerate = false;  // fallback path taken
};

/// Sequential importance resampling: propagate the particles of `belief`
/// (cycled in a random order until the budget is spent) through the
/// generative model under `action`, weight by the likelihood of the real
/// observation `z`, and resample (systematic) back to belief.size().
/// Weighted particles are conditioned on z: y' = z, x' = available - z.
///
/// If every joint weight is zero, each queue is resampled separately on its
/// own binomial factor. A queue no candidate explains takes the departures of a
/// random candidate's source particle, raised to at least z - x (exactly z - x
/// when p = 1) within the source filling. With a zero budget the prior is propagated once per
/// particle, unweighted, with the ack bookkeeping forced to agree with z:
/// x' = max(x' + y' - z, 0), y' = z.
Belief sir_update(const Belief& belief, Action action, const Observation& z,
                  const ModelParams& model, const SirBudget& budget, Rng& rng,
                  SirReport* report = nullptr);

struct QueueBeliefStats {
  double mean = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

/// Per-queue statistics of the filling marginal. Percentiles interpolate
/// linearly between order statistics.
std::vector<QueueBeliefStats> belief_stats(const Belief& belief);

/// Systematic resampling of indices proportional to `weights`.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count,
                                             Rng& rng);

double binomial_pmf(int n, int k, double p);

}  // namespace pol
