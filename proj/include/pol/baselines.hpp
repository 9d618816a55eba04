#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pol/model.hpp"

namespace pol {

enum class StrategyKind { kPol, kJsqFi, kDjsqFi, kSedFi, kJmo, kJmoE };

struct Strategy {
  StrategyKind kind = StrategyKind::kPol;
  int d = 2;                   // DJSQ sample size
  double explore_prob = 0.2;   // JMO-E

  /// CLI identifiers: pol, jsq, djsq, sed, jmo, jmo-e.
  static Strategy parse(const std::string& name);
  std::string name() const;
  bool full_information() const;
  bool limited_information() const;
};

/// JSQ / DJSQ(d) / SED on the exact fillings; ties are broken uniformly.
Action decide_full_info(const Strategy& strategy, std::span<const int> fillings,
                        std::span<const double> service_rates, Rng& rng);

/// JMO / JMO-E on last-epoch ack counts. `idle` marks servers eligible for
/// the JMO-E exploration step.
Action decide_limited_info(const Strategy& strategy, std::span<const int> last_epoch_acks,
                           const std::vector<bool>& idle, Rng& rng);

/// A server counts as idle when it produced no acks last epoch and did not
/// receive the previous job.
std::vector<bool> idle_servers(std::span<const int> last_epoch_acks,
                               std::optional<Action> last_action);

}  // namespace pol
