#pragma once

#include <span>
#include <string>
#include <vector>

#include "pol/random.hpp"

namespace pol {

/// Gamma(alpha, beta) over an exponential rate, beta being a rate parameter.
struct GammaPosterior {
  double alpha = 1.0;
  double beta = 1.0;

  double mean_rate() const { return alpha / beta; }
  /// Mean of the posterior predictive duration; infinite for alpha <= 1.
  double predictive_mean() const;
};

/// Conjugate update of a Gamma prior with exponential observations:
/// (alpha0 + n, beta0 + sum d).
GammaPosterior fit_exponential(std::span<const double> data, const GammaPosterior& prior);

/// Draws from the posterior predictive (a translated Pareto law) through
/// the compound m ~ Gamma(alpha, beta), d ~ Exp(m).
double posterior_predictive_sample(const GammaPosterior& post, Rng& rng);

/// Reads positive durations, one per line, or the named column of a
/// comma-separated file with a header row. Blank lines and lines starting
/// with '#' are skipped. Errors name the offending line number.
std::vector<double> load_trace(const std::string& path, const std::string& column = "");

}  // namespace pol
