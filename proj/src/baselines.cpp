#include "pol/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pol {
namespace {

// Index of the extreme `key` among `candidates`, uniform over ties.
template <class Key, class Better>
int pick_extreme(std::span<const int> candidates, Key key, Better better, Rng& rng) {
  int best = candidates.front();
  int ties = 1;
  for (std::size_t j = 1; j < candidates.size(); ++j) {
    const int i = candidates[j];
    if (better(key(i), key(best))) {
      best = i;
      ties = 1;
    } else if (!better(key(best), key(i))) {
      ++ties;
      if (std::uniform_int_distribution<int>(0, ties - 1)(rng) == 0) best = i;
    }
  }
  return best;
}

std::vector<int> all_indices(std::size_t n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

Strategy Strategy::parse(const std::string& name) {
  if (name == "pol") return {StrategyKind::kPol};
  if (name == "jsq") return {StrategyKind::kJsqFi};
  if (name == "djsq") return {StrategyKind::kDjsqFi};
  if (name == "sed") return {StrategyKind::kSedFi};
  if (name == "jmo") return {StrategyKind::kJmo};
  if (name == "jmo-e") return {StrategyKind::kJmoE};
  throw std::invalid_argument("unknown strategy '" + name + "' (expected pol, jsq, djsq, sed, jmo, jmo-e)");
}

std::string Strategy::name() const {
  switch (kind) {
    case StrategyKind::kPol: return "pol";
    case StrategyKind::kJsqFi: return "jsq";
    case StrategyKind::kDjsqFi: return "djsq";
    case StrategyKind::kSedFi: return "sed";
    case StrategyKind::kJmo: return "jmo";
    case StrategyKind::kJmoE: return "jmo-e";
  }
  return "?";
}

bool Strategy::full_information() const {
  return kind == StrategyKind::kJsqFi || kind == StrategyKind::kDjsqFi ||
         kind == StrategyKind::kSedFi;
}

bool Strategy::limited_information() const {
  return kind == StrategyKind::kJmo || kind == StrategyKind::kJmoE;
}

Action decide_full_info(const Strategy& strategy, std::span<const int> fillings,
                        std::span<const double> service_rates, Rng& rng) {
  const std::size_t n = fillings.size();
  const auto less = [](double a, double b) { return a < b; };
  const auto filling = [&](int i) { return static_cast<double>(fillings[i]); };
  switch (strategy.kind) {
    case StrategyKind::kJsqFi: {
      const auto idx = all_indices(n);
      return Action{pick_extreme(idx, filling, less, rng)};
    }
    case StrategyKind::kDjsqFi: {
      if (strategy.d < 1 || static_cast<std::size_t>(strategy.d) > n) {
        throw std::invalid_argument("djsq needs 1 <= d <= N");
      }
      auto idx = all_indices(n);
      // Partial Fisher-Yates: the first d entries become a uniform d-subset.
      for (int j = 0; j < strategy.d; ++j) {
        const int r = std::uniform_int_distribution<int>(j, static_cast<int>(n) - 1)(rng);
        std::swap(idx[j], idx[r]);
      }
      idx.resize(strategy.d);
      return Action{pick_extreme(idx, filling, less, rng)};
    }
    case StrategyKind::kSedFi: {
      const auto idx = all_indices(n);
      const auto delay = [&](int i) { return fillings[i] / service_rates[i]; };
      return Action{pick_extreme(idx, delay, less, rng)};
    }
    default:
      throw std::invalid_argument("decide_full_info needs jsq, djsq or sed");
  }
}

Action decide_limited_info(const Strategy& strategy, std::span<const int> last_epoch_acks,
                           const std::vector<bool>& idle, Rng& rng) {
  if (!strategy.limited_information()) {
    throw std::invalid_argument("decide_limited_info needs jmo or jmo-e");
  }
  const std::size_t n = last_epoch_acks.size();
  if (strategy.kind == StrategyKind::kJmoE && strategy.explore_prob > 0.0 &&
      uniform01(rng) < strategy.explore_prob) {
    std::vector<int> candidates;
    for (std::size_t i = 0; i < n; ++i) {
      if (i < idle.size() && idle[i]) candidates.push_back(static_cast<int>(i));
    }
    if (!candidates.empty()) {
      const auto k = std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng);
      return Action{candidates[k]};
    }
  }
  const auto idx = all_indices(n);
  const auto acks = [&](int i) { return static_cast<double>(last_epoch_acks[i]); };
  return Action{pick_extreme(idx, acks, [](double a, double b) { return a > b; }, rng)};
}

std::vector<bool> idle_servers(std::span<const int> last_epoch_acks,
                               std::optional<Action> last_action) {
  std::vector<bool> idle(last_epoch_acks.size());
  for (std::size_t i = 0; i < idle.size(); ++i) {
    const bool routed = last_action && last_action->queue == static_cast<int>(i);
    idle[i] = last_epoch_acks[i] == 0 && !routed;
  }
  return idle;
}

}  // namespace pol
