#include "pol/distribution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pol {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be a positive finite number");
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

DistributionSpec DistributionSpec::exponential(double rate) {
  require_positive(rate, "exponential rate");
  return DistributionSpec(Exponential{rate});
}

DistributionSpec DistributionSpec::gamma(double shape, double rate) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  return DistributionSpec(Gamma{shape, rate});
}

DistributionSpec DistributionSpec::pareto(double scale, double tail_index) {
  require_positive(scale, "pareto scale");
  require_positive(tail_index, "pareto tail index");
  return DistributionSpec(Pareto{scale, tail_index});
}

DistributionSpec DistributionSpec::deterministic(double value) {
  require_positive(value, "deterministic value");
  return DistributionSpec(Deterministic{value});
}

DistributionSpec DistributionSpec::empirical(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical sample list is empty");
  for (double s : samples) require_positive(s, "empirical sample");
  return DistributionSpec(Empirical{std::move(samples)});
}

std::string DistributionSpec::name() const {
  return std::visit(overloaded{[](const Exponential&) { return "exponential"; },
                               [](const Gamma&) { return "gamma"; },
                               [](const Pareto&) { return "pareto"; },
                               [](const Deterministic&) { return "deterministic"; },
                               [](const Empirical&) { return "empirical"; }},
                    kind_);
}

double DistributionSpec::mean() const {
  return std::visit(
      overloaded{[](const Exponential& d) { return 1.0 / d.rate; },
                 [](const Gamma& d) { return d.shape / d.rate; },
                 [](const Pareto& d) {
                   if (d.tail_index <= 1.0) return std::numeric_limits<double>::infinity();
                   return d.tail_index * d.scale / (d.tail_index - 1.0);
                 },
                 [](const Deterministic& d) { return d.value; },
                 [](const Empirical& d) {
                   double s = 0.0;
                   for (double x : d.samples) s += x;
                   return s / static_cast<double>(d.samples.size());
                 }},
      kind_);
}

double DistributionSpec::rate() const { return 1.0 / mean(); }

DistributionSpec DistributionSpec::with_mean(double target_mean) const {
  require_positive(target_mean, "target mean");
  const double m = mean();
  if (!std::isfinite(m)) throw std::invalid_argument("cannot rescale a distribution with infinite mean");
  const double f = target_mean / m;
  return std::visit(
      overloaded{[&](const Exponential& d) { return exponential(d.rate / f); },
                 [&](const Gamma& d) { return gamma(d.shape, d.rate / f); },
                 [&](const Pareto& d) { return pareto(d.scale * f, d.tail_index); },
                 [&](const Deterministic& d) { return deterministic(d.value * f); },
                 [&](const Empirical& d) {
                   std::vector<double> s = d.samples;
                   for (double& x : s) x *= f;
                   return empirical(std::move(s));
                 }},
      kind_);
}

double sample_duration(const DistributionSpec& spec, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const Exponential& d) { return std::exponential_distribution<double>(d.rate)(rng); },
          [&](const Gamma& d) { return std::gamma_distribution<double>(d.shape, 1.0 / d.rate)(rng); },
          [&](const Pareto& d) {
            // Inverse CDF; 1 - U keeps the argument in (0, 1].
            const double u = 1.0 - uniform01(rng);
            return d.scale * std::pow(u, -1.0 / d.tail_index);
          },
          [](const Deterministic& d) { return d.value; },
          [&](const Empirical& d) {
            std::uniform_int_distribution<std::size_t> pick(0, d.samples.size() - 1);
            return d.samples[pick(rng)];
          }},
      spec.kind());
}

}  // namespace pol
