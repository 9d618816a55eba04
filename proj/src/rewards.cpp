#include "pol/rewards.hpp"

#include <cmath>
#include <stdexcept>

namespace pol {

RewardSpec RewardSpec::exponential(double chi) {
  if (!(chi > 1.0)) throw std::invalid_argument("exponential reward needs chi > 1");
  return {Kind::kQueueLenExponential, chi};
}

RewardSpec RewardSpec::combined(double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("combined reward needs kappa > 0");
  RewardSpec s{Kind::kCombined};
  s.kappa = kappa;
  return s;
}

RewardSpec RewardSpec::parse(const std::string& name, double chi, double kappa) {
  if (name == "linear") return linear();
  if (name == "exponential") return exponential(chi);
  if (name == "variance") return variance();
  if (name == "proportional") return proportional();
  if (name == "loss") return loss();
  if (name == "idle") return idle();
  if (name == "combined") return combined(kappa);
  throw std::invalid_argument("unknown reward kind '" + name + "'");
}

std::string RewardSpec::name() const {
  switch (kind) {
    case Kind::kQueueLenLinear: return "linear";
    case Kind::kQueueLenExponential: return "exponential";
    case Kind::kQueueLenVariance: return "variance";
    case Kind::kProportional: return "proportional";
    case Kind::kLossPenalty: return "loss";
    case Kind::kIdlePenalty: return "idle";
    case Kind::kCombined: return "combined";
  }
  return "?";
}

double reward(const RewardSpec& spec, std::span<const int> b, std::span<const int> cap,
              std::span<const double> service_rates) {
  const std::size_t n = b.size();
  double r = 0.0;
  switch (spec.kind) {
    case RewardSpec::Kind::kQueueLenLinear:
      for (int v : b) r -= v;
      return r;
    case RewardSpec::Kind::kQueueLenExponential:
      for (int v : b) r -= std::pow(spec.chi, v);
      return r;
    case RewardSpec::Kind::kQueueLenVariance: {
      if (n == 0) return 0.0;
      double mean = 0.0;
      for (int v : b) mean += v;
      mean /= static_cast<double>(n);
      for (int v : b) r += (v - mean) * (v - mean);
      return r / static_cast<double>(n);
    }
    case RewardSpec::Kind::kProportional:
      for (std::size_t i = 0; i < n; ++i) r -= b[i] / service_rates[i];
      return r;
    case RewardSpec::Kind::kLossPenalty:
      for (std::size_t i = 0; i < n; ++i) r -= b[i] == cap[i] ? 1.0 : 0.0;
      return r;
    case RewardSpec::Kind::kIdlePenalty:
      for (int v : b) r -= v == 0 ? 1.0 : 0.0;
      return r;
    case RewardSpec::Kind::kCombined: {
      double fill = 0.0;
      double full = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        fill += b[i];
        full += b[i] == cap[i] ? 1.0 : 0.0;
      }
      return -(fill + spec.kappa * full);
    }
  }
  return r;
}

}  // namespace pol
