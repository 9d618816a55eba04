#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pol/random.hpp"

namespace pol {

struct Exponential {
  double rate;
};
struct Gamma {
  double shape;
  double rate;
};
struct Pareto {
  double scale;
  double tail_index;
};
struct Deterministic {
  double value;
};
struct Empirical {
  std::vector<double> samples;
};

/// A positive duration distribution (inter-arrival or service time).
/// Construct through the factory functions; they reject non-positive
/// parameters so sampling never has to re-check.
class DistributionSpec {
 public:
  using Kind = std::variant<Exponential, Gamma, Pareto, Deterministic, Empirical>;

  static DistributionSpec exponential(double rate);
  static DistributionSpec gamma(double shape, double rate);
  static DistributionSpec pareto(double scale, double tail_index);
  static DistributionSpec deterministic(double value);
  static DistributionSpec empirical(std::vector<double> samples);

  const Kind& kind() const { return kind_; }
  std::string name() const;

  /// Mean duration; infinite for Pareto with tail index <= 1.
  double mean() const;
  /// Reciprocal of the mean (the "rate" lambda or mu_i).
  double rate() const;

  /// Same family rescaled so that mean() == target_mean.
  DistributionSpec with_mean(double target_mean) const;

 private:
  explicit DistributionSpec(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

double sample_duration(const DistributionSpec& spec, Rng& rng);

}  // namespace pol
