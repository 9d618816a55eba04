#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pol/belief.hpp"
#include "scenarios.hpp"

using namespace pol;

namespace {

ModelParams homogeneous_model(int n, double lambda, double p, int cap = 10) {
  return ModelParams(DistributionSpec::exponential(lambda),
                     std::vector<QueueParams>(n, QueueParams{cap, DistributionSpec::exponential(1.0), p}),
                     RewardSpec::combined(100.0));
}

}  // namespace

TEST_SUITE("belief") {
  TEST_CASE("init_belief replicates the initial state") {
    const auto b = init_belief(1000, AugmentedState::empty(3));
    CHECK(b.size() == 1000);
    for (const auto& s : b.particles) REQUIRE(s == AugmentedState::empty(3));

    AugmentedState s = AugmentedState::empty(2);
    s.queues[0] = {4, 1, 2};
    s.queues[1] = {7, 0, 0};
    const auto one = init_belief(1, s);
    REQUIRE(one.size() == 1);
    CHECK(one.particles[0] == s);
    const auto stats = belief_stats(init_belief(50, s));
    CHECK(stats[0].mean == 4.0);
    CHECK(stats[1].mean == 7.0);
    CHECK_THROWS_AS(init_belief(0, s), std::invalid_argument);
  }

  TEST_CASE("observation likelihood examples") {
    const std::vector<double> p1{1.0, 1.0};
    CHECK(observation_likelihood(std::vector<int>{3, 0}, Observation{{3, 0}}, p1) == 1.0);
    const std::vector<double> p6{0.6, 0.6};
    CHECK(observation_likelihood(std::vector<int>{3, 1}, Observation{{1, 2}}, p6) == 0.0);
    CHECK(observation_likelihood(std::vector<int>{2}, Observation{{1}}, std::vector<double>{0.6}) ==
          doctest::Approx(0.48));
  }

  TEST_CASE("binomial pmf matches a direct product formula") {
    for (int n = 0; n <= 30; ++n) {
      for (int k = 0; k <= n; ++k) {
        for (double p : {0.1, 0.6, 0.95}) {
          REQUIRE(binomial_pmf(n, k, p) == doctest::Approx(oracle::binom(n, k, p)).epsilon(1e-10));
        }
      }
    }
    CHECK(binomial_pmf(5, 6, 0.5) == 0.0);
    CHECK(binomial_pmf(5, 5, 1.0) == 1.0);
    CHECK(binomial_pmf(5, 4, 1.0) == 0.0);
  }

  TEST_CASE("systematic resampling follows the weights and skips zero weights") {
    Rng rng(4);
    const std::vector<double> w{0.0, 1.0, 0.0, 3.0, 0.0};
    std::vector<int> hits(w.size(), 0);
    for (int rep = 0; rep < 100; ++rep) {
      for (std::size_t i : systematic_resample(w, 1000, rng)) ++hits[i];
    }
    CHECK(hits[0] == 0);
    CHECK(hits[2] == 0);
    CHECK(hits[4] == 0);
    CHECK(std::abs(hits[1] / 100000.0 - 0.25) < 0.002);
  }

  TEST_CASE("with p = 1 a concentrated belief tracks the true state exactly") {
    const auto model = homogeneous_model(3, 2.5, 1.0);
    Rng world(10), filter(11);
    AugmentedState truth = AugmentedState::empty(3);
    Belief belief = init_belief(300, truth);
    std::size_t degenerate = 0;
    for (int e = 0; e < 300; ++e) {
      const Action a{e % 3};
      const auto t = step_generative(truth, a, model, world);
      SirReport report;
      belief = sir_update(belief, a, t.observation, model, SirBudget{300, 0.0}, filter, &report);
      degenerate += report.degenerate ? 1 : 0;
      truth = t.next;
      REQUIRE(belief.size() == 300);
      for (const auto& s : belief.particles) {
        for (std::size_t i = 0; i < 3; ++i) {
          REQUIRE(s.queues[i].observed == t.observation.acks[i]);
          REQUIRE(s.queues[i].filling == truth.queues[i].filling);
          REQUIRE(s.queues[i].in_flight == 0);
        }
      }
    }
    MESSAGE("fallback updates: " << degenerate);
  }

  TEST_CASE("survivors agree with the observation and keep the particle count") {
    const auto model = homogeneous_model(2, 1.5, 0.6);
    Rng world(20), filter(21);
    AugmentedState truth = AugmentedState::empty(2);
    Belief belief = init_belief(500, truth);
    for (int e = 0; e < 200; ++e) {
      const Action a{e % 2};
      const auto t = step_generative(truth, a, model, world);
      belief = sir_update(belief, a, t.observation, model, SirBudget{500, 0.0}, filter);
      truth = t.next;
      REQUIRE(belief.size() == 500);
      for (const auto& s : belief.particles) {
        for (std::size_t i = 0; i < 2; ++i) {
          REQUIRE(s.queues[i].observed == t.observation.acks[i]);
          REQUIRE(s.queues[i].in_flight >= 0);
          REQUIRE(s.queues[i].filling >= 0);
          REQUIRE(s.queues[i].filling <= 10);
        }
      }
    }
  }

  TEST_CASE("zero budget propagates the prior and forces ack bookkeeping onto z") {
    const auto model = homogeneous_model(2, 2.0, 0.5);
    Rng rng(30);
    AugmentedState s = AugmentedState::empty(2);
    s.queues[0] = {3, 2, 0};
    const Belief prior = init_belief(200, s);
    const Observation z{{1, 0}};
    SirReport report;
    const Belief post = sir_update(prior, Action{1}, z, model, SirBudget{0, 0.0}, rng, &report);
    CHECK(report.degenerate);
    CHECK(report.simulations == 0);
    REQUIRE(post.size() == 200);
    for (const auto& p : post.particles) {
      REQUIRE(p.queues[0].observed == 1);
      REQUIRE(p.queues[1].observed == 0);
      REQUIRE(p.queues[0].in_flight >= 0);
      REQUIRE(p.queues[1].filling == 1);
    }
  }

  TEST_CASE("an observation no candidate explains is repaired from the source particle") {
    // Queue 0 never completes a job in the model, yet two acks arrive.
    const ModelParams model(DistributionSpec::exponential(1.0),
                            {QueueParams{5, DistributionSpec::deterministic(1e9), 1.0},
                             QueueParams{5, DistributionSpec::deterministic(1e9), 1.0}},
                            RewardSpec::combined(100.0));
    AugmentedState s = AugmentedState::empty(2);
    s.queues[0].filling = 3;
    s.queues[1].filling = 1;
    Rng rng(31);
    SirReport report;
    const Belief post =
        sir_update(init_belief(100, s), Action{0}, Observation{{2, 0}}, model, SirBudget{100, 0.0}, rng, &report);
    CHECK(report.degenerate);
    CHECK(report.nonzero_weights == 0);
    for (const auto& p : post.particles) {
      REQUIRE(p.queues[0] == QueueState{2, 0, 2});
      REQUIRE(p.queues[1] == QueueState{1, 0, 0});
    }
  }

  TEST_CASE("particle filter agrees with the exact filter on the forced chain") {
    const double tv = scenario::forced_chain_max_tv(10000, 10000, 30, 0.5, 77);
    MESSAGE("max TV over 30 epochs: " << tv);
    CHECK(tv < 0.05);
  }

  TEST_CASE("belief statistics") {
    const auto same = belief_stats(init_belief(10, AugmentedState{{QueueState{6, 0, 0}}}));
    CHECK(same[0].mean == 6.0);
    CHECK(same[0].p10 == 6.0);
    CHECK(same[0].p90 == 6.0);

    Belief two{{AugmentedState{{QueueState{0, 0, 0}}}, AugmentedState{{QueueState{10, 0, 0}}}}};
    CHECK(belief_stats(two)[0].mean == 5.0);

    Rng rng(40);
    std::uniform_int_distribution<int> fill(0, 10), size(1, 200);
    for (int trial = 0; trial < 2000; ++trial) {
      Belief b;
      const int n = size(rng);
      for (int m = 0; m < n; ++m) b.particles.push_back(AugmentedState{{QueueState{fill(rng), 0, 0}}});
      const auto st = belief_stats(b)[0];
      REQUIRE(st.p10 <= st.p90);
      // Uniform draws are symmetric, so the mean sits between the deciles.
      if (n >= 20) {
        REQUIRE(st.p10 <= st.mean);
        REQUIRE(st.mean <= st.p90);
      }
    }
    CHECK_THROWS_AS(belief_stats(Belief{}), std::invalid_argument);
    CHECK_THROWS_AS(sir_update(Belief{}, Action{0}, Observation{{0}}, scenario::forced_chain(0.5),
                               SirBudget{}, rng),
                    std::invalid_argument);
  }
}
