#include <cmath>
#include <random>

#include "doctest.h"
#include "ehcr/baselines.hpp"
#include "ehcr/primal_solver.hpp"
#include "oracles.hpp"

using namespace ehcr;

TEST_CASE("oracle without binary variables is one power solve") {
  ScenarioParams p;
  p.M = 0;
  p.N = 4;
  p.E0 = 2.0;
  ChannelRealization ch{{0.3, 0.1, 0.2, 0.05}, {}, {}};
  const auto policy = exhaustive_policy_oracle(p, ch);
  const auto direct = solve_primal(p, ch, Schedule());
  CHECK(policy.allocation.p_s == direct.allocation.p_s);
  CHECK(policy.allocation.objective == direct.allocation.objective);
  CHECK(policy.iterations == 1);
}

TEST_CASE("oracle picks the better of two branches") {
  ScenarioParams p;
  p.M = 1;
  p.N = 2;
  p.E0 = 0.5;
  p.alpha = 1.0;
  p.p_p = 1.0;
  p.P_int = 1.0;
  p.sigma2 = 0.1;
  ChannelRealization ch{{0.1, 0.3}, {0.1}, {0.1}};
  // Transmit: 0.5 J over both slots. Harvest: 1.5 J in the tail slot alone.
  const double harvest = std::log2(1.0 + 0.3 * 1.5 / 0.1);
  const auto tx = solve_primal(p, ch, Schedule::all_transmit(1));
  const auto policy = exhaustive_policy_oracle(p, ch);
  CHECK(harvest > tx.allocation.objective);
  CHECK(policy.schedule == Schedule::all_harvest(1));
  CHECK(policy.allocation.objective == doctest::Approx(harvest).epsilon(1e-9));

  p.alpha = 0.0;
  CHECK(exhaustive_policy_oracle(p, ch).schedule == Schedule::all_transmit(1));
}

TEST_CASE("oracle capacity limit") {
  ScenarioParams p;
  p.M = 17;
  p.N = 17;
  ChannelRealization ch{std::vector<double>(17, 0.1), std::vector<double>(17, 0.1), std::vector<double>(17, 0.1)};
  CHECK_THROWS_AS(exhaustive_policy_oracle(p, ch), CapacityError);
}

TEST_CASE("greedy never harvests when the battery never runs dry") {
  ScenarioParams p;
  p.M = 5;
  p.N = 7;
  p.E0 = 100.0;
  p.P_int = 0.1;
  ChannelRealization ch{std::vector<double>(7, 0.2), std::vector<double>(5, 0.2), std::vector<double>(5, 0.2)};
  const auto g = greedy_myopic_policy(p, ch);
  CHECK(g.schedule == Schedule::all_transmit(5));
  for (std::size_t i = 0; i < 5; ++i) CHECK(g.allocation.p_s[i] == doctest::Approx(0.5));
}

TEST_CASE("greedy harvests first with an empty battery") {
  ScenarioParams p;
  p.M = 3;
  p.N = 5;
  p.E0 = 0.0;
  p.alpha = 0.5;
  ChannelRealization ch{{0.1, 0.2, 0.3, 0.1, 0.2}, {0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}};
  const auto g = greedy_myopic_policy(p, ch);
  CHECK(g.schedule.harvests(0));
  CHECK(g.allocation.p_s[0] == 0.0);
}

TEST_CASE("greedy equal split after the primary leaves") {
  ScenarioParams p;
  p.M = 1;
  p.N = 4;
  p.E0 = 0.0;
  p.alpha = 0.9;
  p.p_p = 1.0;
  ChannelRealization ch{{0.1, 0.2, 0.3, 0.1}, {0.1}, {0.1}};
  const auto g = greedy_myopic_policy(p, ch);
  CHECK(g.schedule == Schedule::all_harvest(1));
  for (std::size_t i = 1; i < 4; ++i) CHECK(g.allocation.p_s[i] == doctest::Approx(0.3));
}

TEST_CASE("oracle dominates greedy and both are feasible") {
  std::mt19937_64 rng(67);
  for (int k = 0; k < 200; ++k) {
    const auto p = oracle::random_params(rng, 6, 4);
    const auto ch = oracle::random_channel(rng, p);
    const auto best = exhaustive_policy_oracle(p, ch);
    const auto g = greedy_myopic_policy(p, ch);
    CHECK(best.allocation.objective >= g.allocation.objective - 1e-9);
    CHECK(g.allocation.objective >= 0.0);
    CHECK(check_feasible_p1(p, ch, g.schedule, g.allocation.p_s).feasible());
    CHECK(check_feasible_p1(p, ch, best.schedule, best.allocation.p_s).feasible(1e-8));
    CHECK(g.allocation.objective == doctest::Approx(oracle::rate_bits(p, ch, g.allocation.p_s)).epsilon(1e-12));
  }
}
