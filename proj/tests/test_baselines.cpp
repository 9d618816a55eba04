#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pol/baselines.hpp"

using namespace pol;

namespace {

std::vector<int> argmin_set(const std::vector<double>& v) {
  const double best = *std::min_element(v.begin(), v.end());
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    if (v[i] == best) out.push_back(i);
  }
  return out;
}

bool contains(const std::vector<int>& s, int v) { return std::find(s.begin(), s.end(), v) != s.end(); }

const Strategy kJsq = Strategy::parse("jsq");
const Strategy kSed = Strategy::parse("sed");
const Strategy kJmo = Strategy::parse("jmo");

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("full-information examples") {
    Rng rng(1);
    const std::vector<double> mu3{1.0, 1.0, 1.0};
    CHECK(decide_full_info(kJsq, std::vector<int>{3, 1, 4}, mu3, rng).queue == 1);

    const std::vector<double> mu2{4.0, 2.0};
    int zero = 0;
    for (int i = 0; i < 10000; ++i) zero += decide_full_info(kSed, std::vector<int>{4, 2}, mu2, rng).queue == 0;
    CHECK(std::abs(zero / 10000.0 - 0.5) < 0.05);
    CHECK(decide_full_info(kSed, std::vector<int>{4, 3}, mu2, rng).queue == 0);
  }

  TEST_CASE("DJSQ with d = N picks from the JSQ argmin set, uniformly over ties") {
    Strategy djsq = Strategy::parse("djsq");
    djsq.d = 4;
    Rng rng(2);
    std::uniform_int_distribution<int> fill(0, 3);
    for (int trial = 0; trial < 5000; ++trial) {
      std::vector<int> b(4);
      for (int& v : b) v = fill(rng);
      const auto best = argmin_set(std::vector<double>(b.begin(), b.end()));
      REQUIRE(contains(best, decide_full_info(djsq, b, std::vector<double>(4, 1.0), rng).queue));
      REQUIRE(contains(best, decide_full_info(kJsq, b, std::vector<double>(4, 1.0), rng).queue));
    }
    std::vector<int> hits(4, 0);
    for (int i = 0; i < 8000; ++i) ++hits[decide_full_info(djsq, std::vector<int>{2, 2, 5, 2}, std::vector<double>(4, 1.0), rng).queue];
    CHECK(hits[2] == 0);
    for (int q : {0, 1, 3}) CHECK(std::abs(hits[q] / 8000.0 - 1.0 / 3.0) < 0.03);
  }

  TEST_CASE("DJSQ never prefers a fuller queue inside its sample") {
    Strategy djsq = Strategy::parse("djsq");
    Rng rng(3);
    // With d = 2 on {0, 9, 9}: queue 0 is sampled with probability 2/3 and then always wins.
    int zero = 0;
    const int n = 30000;
    for (int i = 0; i < n; ++i) zero += decide_full_info(djsq, std::vector<int>{0, 9, 9}, std::vector<double>(3, 1.0), rng).queue == 0;
    CHECK(std::abs(zero / double(n) - 2.0 / 3.0) < 0.02);
    djsq.d = 5;
    CHECK_THROWS_AS(decide_full_info(djsq, std::vector<int>{0, 1}, std::vector<double>(2, 1.0), rng),
                    std::invalid_argument);
  }

  TEST_CASE("SED with homogeneous rates coincides with JSQ") {
    Rng rng(4);
    std::uniform_int_distribution<int> fill(0, 10);
    const std::vector<double> mu(5, 2.5);
    for (int trial = 0; trial < 5000; ++trial) {
      std::vector<int> b(5);
      for (int& v : b) v = fill(rng);
      const auto best = argmin_set(std::vector<double>(b.begin(), b.end()));
      REQUIRE(contains(best, decide_full_info(kSed, b, mu, rng).queue));
    }
  }

  TEST_CASE("limited-information examples") {
    Rng rng(5);
    const std::vector<bool> none(3, false);
    CHECK(decide_limited_info(kJmo, std::vector<int>{0, 5, 2}, none, rng).queue == 1);

    std::vector<int> hits(4, 0);
    for (int i = 0; i < 10000; ++i) ++hits[decide_limited_info(kJmo, std::vector<int>(4, 0), std::vector<bool>(4, false), rng).queue];
    for (int h : hits) CHECK(std::abs(h / 10000.0 - 0.25) < 0.02);
  }

  TEST_CASE("JMO-E with zero exploration replays JMO exactly") {
    Strategy e = Strategy::parse("jmo-e");
    e.explore_prob = 0.0;
    Rng r1(6), r2(6), gen(7);
    std::uniform_int_distribution<int> acks(0, 3);
    for (int i = 0; i < 5000; ++i) {
      std::vector<int> z(3);
      for (int& v : z) v = acks(gen);
      const auto idle = idle_servers(z, Action{i % 3});
      REQUIRE(decide_limited_info(e, z, idle, r1) == decide_limited_info(kJmo, z, idle, r2));
    }
  }

  TEST_CASE("JMO-E explores idle servers with the configured probability") {
    const Strategy e = Strategy::parse("jmo-e");
    CHECK(e.explore_prob == 0.2);
    Rng rng(8);
    // Queue 0 has the most acks; queue 2 is the only idle one.
    const std::vector<int> z{3, 1, 0};
    const auto idle = idle_servers(z, Action{1});
    REQUIRE(idle == std::vector<bool>{false, false, true});
    int explored = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) explored += decide_limited_info(e, z, idle, rng).queue == 2;
    CHECK(std::abs(explored / double(n) - 0.2) < 0.02);

    // Without idle servers the decision falls back to JMO.
    for (int i = 0; i < 1000; ++i) REQUIRE(decide_limited_info(e, z, std::vector<bool>(3, false), rng).queue == 0);
  }

  TEST_CASE("idle rule and decision range") {
    CHECK(idle_servers(std::vector<int>{0, 0, 2}, std::nullopt) == std::vector<bool>{true, true, false});
    CHECK(idle_servers(std::vector<int>{0, 0, 2}, Action{0}) == std::vector<bool>{false, true, false});

    Rng rng(9);
    std::uniform_int_distribution<int> v(0, 6);
    const Strategy all[] = {kJsq, Strategy::parse("djsq"), kSed, kJmo, Strategy::parse("jmo-e")};
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<int> b(6);
      for (int& x : b) x = v(rng);
      const std::vector<double> mu{1, 2, 3, 4, 5, 6};
      for (const auto& s : all) {
        const int a = s.full_information() ? decide_full_info(s, b, mu, rng).queue
                                           : decide_limited_info(s, b, idle_servers(b, std::nullopt), rng).queue;
        REQUIRE(a >= 0);
        REQUIRE(a < 6);
      }
    }
  }

  TEST_CASE("strategy names round-trip and misuse is rejected") {
    for (const char* name : {"pol", "jsq", "djsq", "sed", "jmo", "jmo-e"}) CHECK(Strategy::parse(name).name() == name);
    CHECK(Strategy::parse("djsq").d == 2);
    CHECK_THROWS_AS(Strategy::parse("random"), std::invalid_argument);
    Rng rng(10);
    CHECK_THROWS_AS(decide_full_info(kJmo, std::vector<int>{0}, std::vector<double>{1.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(decide_limited_info(kJsq, std::vector<int>{0}, std::vector<bool>{false}, rng), std::invalid_argument);
    CHECK_FALSE(Strategy::parse("pol").full_information());
    CHECK_FALSE(Strategy::parse("pol").limited_information());
  }
}
