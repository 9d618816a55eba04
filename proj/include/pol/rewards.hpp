#pragma once

#include <span>
#include <string>
#include <variant>

namespace pol {

/// Reward catalog for a transition, evaluated on the post-action buffer
/// fillings b'. None of the catalog entries depends on the previous state or
/// the action itself, so only b' and the static queue shape are taken.
struct RewardSpec {
  enum class Kind {
    kQueueLenLinear,       // -sum b'
    kQueueLenExponential,  // -sum chi^b'
    kQueueLenVariance,     // +Var(b'), population variance, sign as published
    kProportional,         // -sum b'/mu
    kLossPenalty,          // -sum 1(b' = cap)
    kIdlePenalty,          // -sum 1(b' = 0)
    kCombined,             // -(sum b' + kappa * sum 1(b' = cap))
  };

  Kind kind = Kind::kCombined;
  double chi = 2.0;
  double kappa = 100.0;

  static RewardSpec linear() { return {Kind::kQueueLenLinear}; }
  static RewardSpec exponential(double chi);
  static RewardSpec variance() { return {Kind::kQueueLenVariance}; }
  static RewardSpec proportional() { return {Kind::kProportional}; }
  static RewardSpec loss() { return {Kind::kLossPenalty}; }
  static RewardSpec idle() { return {Kind::kIdlePenalty}; }
  static RewardSpec combined(double kappa);

  static RewardSpec parse(const std::string& name, double chi = 2.0, double kappa = 100.0);
  std::string name() const;
};

/// `service_rates` is read only by the proportional kind.
double reward(const RewardSpec& spec, std::span<const int> next_fillings,
              std::span<const int> capacities, std::span<const double> service_rates);

}  // namespace pol
