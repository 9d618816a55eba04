#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pol/model.hpp"

using namespace pol;

namespace {

ModelParams two_queue_model(double p0, double p1, int cap = 10) {
  return ModelParams(DistributionSpec::exponential(5.0),
                     {QueueParams{cap, DistributionSpec::exponential(4.0), p0},
                      QueueParams{cap, DistributionSpec::exponential(2.0), p1}},
                     RewardSpec::combined(100.0));
}

Transition forced(const AugmentedState& s, int action, std::vector<int> k, const ModelParams& m) {
  Rng rng(99);
  Transition t;
  step_with_job_counts(s, Action{action}, k, m, rng, t);
  return t;
}

AugmentedState state_of(std::vector<QueueState> q) { return AugmentedState{std::move(q)}; }

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("job-count pmf closed form at the reference rates") {
    CHECK(job_count_pmf_mm(5.0, 4.0, 0) == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
    CHECK(job_count_pmf_mm(5.0, 4.0, 1) == doctest::Approx(4.0 / 9.0 * 5.0 / 9.0).epsilon(1e-12));
    CHECK(job_count_pmf_mm(5.0, 4.0, -1) == 0.0);
  }

  TEST_CASE("job-count pmf agrees with a direct Monte Carlo count of completions") {
    const std::size_t draws = 1000000;
    const auto mc = oracle::mc_job_count_pmf(5.0, 4.0, draws, 2024);
    for (int k = 0; k <= 3; ++k) {
      const double exact = job_count_pmf_mm(5.0, 4.0, k);
      const double se = std::sqrt(exact * (1.0 - exact) / draws);
      CAPTURE(k);
      CHECK(std::abs(mc[k] - exact) < 4.0 * se);
    }
  }

  TEST_CASE("job-count pmf sums to one") {
    // Pairs keep mu/(lambda+mu) <= 0.9 so the tail beyond k = 200 is below 1e-9.
    const double rates[] = {0.5, 1.0, 2.0, 5.0, 9.0};
    for (double lambda : rates) {
      for (double mu : rates) {
        if (mu / lambda > 9.0) continue;
        double sum = 0.0;
        for (int k = 0; k <= 200; ++k) sum += job_count_pmf_mm(lambda, mu, k);
        CAPTURE(lambda);
        CAPTURE(mu);
        CHECK(std::abs(sum - 1.0) < 1e-9);
      }
    }
  }

  TEST_CASE("sample_job_count with deterministic service is the floor of u/v") {
    Rng rng(1);
    CHECK(sample_job_count(DistributionSpec::deterministic(1.0), 3.5, rng) == 3);
    CHECK(sample_job_count(DistributionSpec::deterministic(2.0), 1.0, rng) == 0);
    CHECK(sample_job_count(DistributionSpec::deterministic(0.5), 1.0, rng) == 2);
  }

  TEST_CASE("sample_job_count under exponential specs matches the geometric law") {
    Rng rng(17);
    const auto arrival = DistributionSpec::exponential(5.0);
    const auto service = DistributionSpec::exponential(4.0);
    std::vector<int> ks;
    for (int i = 0; i < 100000; ++i) ks.push_back(sample_job_count(service, sample_duration(arrival, rng), rng));
    std::vector<double> exact(61);
    double head = 0.0;
    for (int k = 0; k < 60; ++k) head += exact[k] = job_count_pmf_mm(5.0, 4.0, k);
    exact[60] = 1.0 - head;
    CHECK(oracle::tv_distance(oracle::empirical_pmf(ks, 60), exact) < 0.01);
  }

  TEST_CASE("sample_job_count with gamma service matches direct simulation") {
    // Oracle: renewal count with the standard library's gamma sampler.
    std::mt19937_64 gen(5);
    std::gamma_distribution<double> v(2.0, 0.25);
    std::vector<double> direct(41, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      double t = v(gen);
      int k = 0;
      while (t <= 1.0) {
        ++k;
        t += v(gen);
      }
      direct[std::min(k, 40)] += 1.0 / n;
    }
    Rng rng(6);
    std::vector<int> ks;
    for (int i = 0; i < n; ++i) ks.push_back(sample_job_count(DistributionSpec::gamma(2.0, 4.0), 1.0, rng));
    CHECK(oracle::tv_distance(oracle::empirical_pmf(ks, 40), direct) < 0.02);
  }

  TEST_CASE("ack observation examples") {
    Rng rng(3);
    CHECK(sample_ack_observation(7, 1.0, rng) == 7);
    int nonzero = 0;
    for (int i = 0; i < 100000; ++i) nonzero += sample_ack_observation(7, 1e-9, rng) > 0 ? 1 : 0;
    CHECK(nonzero == 0);

    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_ack_observation(10, 0.6, rng);
    const double se = std::sqrt(10 * 0.6 * 0.4 / n);
    CHECK(std::abs(sum / n - 6.0) < 3.0 * se);

    // The large-n path goes through the library binomial.
    sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_ack_observation(100, 0.3, rng);
    CHECK(std::abs(sum / n - 30.0) < 3.0 * std::sqrt(100 * 0.3 * 0.7 / n));
  }

  TEST_CASE("forced-k transition arithmetic") {
    const auto m = two_queue_model(0.6, 0.6);
    const auto t1 = forced(state_of({{3, 0, 0}, {2, 0, 0}}), 0, {5, 1}, m);
    CHECK(t1.next.fillings() == std::vector<int>{1, 1});
    CHECK_FALSE(t1.dropped);
    CHECK(t1.available == std::vector<int>{3, 1});

    const auto t2 = forced(state_of({{10, 0, 0}, {0, 0, 0}}), 0, {0, 0}, m);
    CHECK(t2.next.fillings() == std::vector<int>{10, 0});
    CHECK(t2.dropped);
    CHECK(t2.reward == doctest::Approx(-(10.0 + 100.0)));

    const auto m1 = two_queue_model(1.0, 1.0);
    const auto t3 = forced(state_of({{2, 1, 0}, {2, 0, 0}}), 1, {1, 0}, m1);
    CHECK(t3.observation.acks == std::vector<int>{2, 0});
    CHECK(t3.next.queues[0].in_flight == 0);
    CHECK(t3.next.queues[1].in_flight == 0);
    CHECK(t3.next.fillings() == std::vector<int>{1, 3});
  }

  TEST_CASE("random transitions respect bounds and conserve acks") {
    const auto m = two_queue_model(0.3, 0.8, 5);
    Rng rng(123);
    std::uniform_int_distribution<int> b(0, 5), x(0, 8), a(0, 1);
    Transition t;
    for (int i = 0; i < 100000; ++i) {
      const auto s = state_of({{b(rng), x(rng), x(rng)}, {b(rng), x(rng), x(rng)}});
      step_generative_into(s, Action{a(rng)}, m, rng, t);
      for (std::size_t q = 0; q < 2; ++q) {
        const auto& n = t.next.queues[q];
        REQUIRE(n.filling >= 0);
        REQUIRE(n.filling <= 5);
        REQUIRE(n.in_flight >= 0);
        REQUIRE(n.observed >= 0);
        REQUIRE(n.observed == t.observation.acks[q]);
        // available = min(b, k) + x, and min(b, k) = b - (b' - routed job).
        REQUIRE(n.in_flight + n.observed == t.available[q]);
        REQUIRE(t.available[q] - s.queues[q].in_flight >= 0);
        REQUIRE(t.available[q] - s.queues[q].in_flight <= s.queues[q].filling);
      }
    }
  }

  TEST_CASE("with p = 1 in-flight acks are always flushed") {
    const auto m = two_queue_model(1.0, 1.0);
    Rng rng(8);
    std::uniform_int_distribution<int> b(0, 10), a(0, 1);
    Transition t;
    for (int i = 0; i < 20000; ++i) {
      const auto s = state_of({{b(rng), 0, b(rng)}, {b(rng), 0, b(rng)}});
      step_generative_into(s, Action{a(rng)}, m, rng, t);
      REQUIRE(t.next.queues[0].in_flight == 0);
      REQUIRE(t.next.queues[1].in_flight == 0);
    }
  }

  TEST_CASE("same seed gives the same transition sequence") {
    const auto m = two_queue_model(0.6, 0.6);
    Rng r1(42), r2(42);
    AugmentedState s1 = AugmentedState::empty(2), s2 = s1;
    for (int i = 0; i < 1000; ++i) {
      const auto t1 = step_generative(s1, Action{i % 2}, m, r1);
      const auto t2 = step_generative(s2, Action{i % 2}, m, r2);
      REQUIRE(t1.next == t2.next);
      REQUIRE(t1.reward == t2.reward);
      s1 = t1.next;
      s2 = t2.next;
    }
  }

  TEST_CASE("model parameters are validated and summarized") {
    const auto m = two_queue_model(0.6, 0.6);
    CHECK(m.offered_load() == doctest::Approx(5.0 / 6.0));
    CHECK(m.capacities()[1] == 10);
    CHECK(m.service_rates()[1] == doctest::Approx(2.0));
    const auto service = DistributionSpec::exponential(1.0);
    CHECK_THROWS_AS(ModelParams(service, {}, RewardSpec::linear()), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(service, {QueueParams{0, service, 0.5}}, RewardSpec::linear()),
                    std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(service, {QueueParams{3, service, 0.0}}, RewardSpec::linear()),
                    std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(service, {QueueParams{3, service, 1.5}}, RewardSpec::linear()),
                    std::invalid_argument);
  }

  TEST_CASE("observation hashing distinguishes vectors and agrees on equal ones") {
    ObservationHash h;
    CHECK(h(Observation{{1, 2}}) == h(Observation{{1, 2}}));
    CHECK(h(Observation{{1, 2}}) != h(Observation{{2, 1}}));
  }
}
