#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ehcr/master_solver.hpp"
#include "oracles.hpp"

using namespace ehcr;

namespace {

PrimalSolution random_solution(std::mt19937_64& rng, const ScenarioParams& p, const ChannelRealization& ch) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PrimalSolution sol;
  sol.allocation.p_s.resize(p.N);
  for (auto& x : sol.allocation.p_s) x = u(rng);
  sol.allocation.objective = rate(p, ch, sol.allocation.p_s);
  sol.duals = DualSet::zeros(p);
  sol.duals.theta = u(rng);
  for (auto* v : {&sol.duals.lambda, &sol.duals.gamma, &sol.duals.delta, &sol.duals.mu}) {
    for (auto& x : *v) x = u(rng);
  }
  return sol;
}

std::vector<BendersCut> random_cuts(std::mt19937_64& rng, std::size_t M, bool integral) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> small(-3, 3);
  std::vector<BendersCut> cuts(static_cast<std::size_t>(count(rng)));
  for (auto& cut : cuts) {
    cut.c.resize(M);
    for (auto& c : cut.c) c = integral ? small(rng) : u(rng);
    cut.c0 = integral ? small(rng) + 3 : 2.0 * u(rng) + 1.0;
  }
  return cuts;
}

}  // namespace

TEST_CASE("cut with zero multipliers is the objective") {
  ScenarioParams p;
  p.M = 3;
  p.N = 5;
  p.E0 = 1.0;
  ChannelRealization ch{{0.2, 0.3, 0.1, 0.4, 0.2}, {0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}};
  PrimalSolution sol;
  sol.allocation.p_s = {0.1, 0.2, 0.0, 0.3, 0.1};
  sol.allocation.objective = rate(p, ch, sol.allocation.p_s);
  sol.duals = DualSet::zeros(p);
  const auto cut = build_cut(p, ch, sol);
  CHECK(cut.c0 == sol.allocation.objective);
  CHECK(cut.c == std::vector<double>(3, 0.0));
}

TEST_CASE("single first-slot multiplier") {
  ScenarioParams p;
  p.M = 3;
  p.N = 3;
  p.E0 = 2.0;
  ChannelRealization ch{{0.2, 0.3, 0.1}, {0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}};
  PrimalSolution sol;
  sol.allocation.p_s = {0.0, 0.0, 0.0};
  sol.duals = DualSet::zeros(p);
  sol.duals.theta = 1.0;
  const auto cut = build_cut(p, ch, sol);
  // Multipliers are priced in nats; the cut is in bits.
  CHECK(cut.c0 == doctest::Approx(2.0 / std::numbers::ln2).epsilon(1e-15));
  CHECK(cut.c[0] == doctest::Approx(-2.0 / std::numbers::ln2).epsilon(1e-15));
  CHECK(cut.c[1] == 0.0);
  CHECK(cut.c[2] == 0.0);
}

TEST_CASE("cut coefficients reproduce the Lagrangian at every schedule") {
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int k = 0; k < 300; ++k) {
    const auto p = oracle::random_params(rng, 7, 4);
    const auto ch = oracle::random_channel(rng, p);
    const auto sol = random_solution(rng, p, ch);
    const auto cut = build_cut(p, ch, sol);
    for (int r = 0; r < 50; ++r) {
      const auto s = oracle::random_schedule(rng, p.M);
      const double direct = oracle::lagrangian_bits(p, ch, s, sol.allocation.p_s, sol.duals);
      worst = std::max(worst, std::abs(cut.evaluate(s) - direct));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("cuts are valid everywhere and tight where generated") {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 60; ++k) {
    const auto p = oracle::random_params(rng, 5, 3);
    const auto ch = oracle::random_channel(rng, p);
    const std::size_t count = std::size_t{1} << p.M;
    std::vector<double> value(count);
    std::vector<BendersCut> cuts(count);
    for (std::size_t code = 0; code < count; ++code) {
      const auto s = Schedule::from_code(p.M, code);
      const auto sol = solve_primal(p, ch, s);
      value[code] = sol.allocation.objective;
      cuts[code] = build_cut(p, ch, sol);
      CHECK(std::abs(cuts[code].evaluate(s) - value[code]) <= 1e-6);
    }
    for (std::size_t g = 0; g < count; ++g) {
      for (std::size_t code = 0; code < count; ++code) {
        CHECK(cuts[g].evaluate(Schedule::from_code(p.M, code)) >= value[code] - 1e-6);
      }
    }
  }
}

TEST_CASE("master: single flat cut") {
  const std::vector<BendersCut> cuts = {{5.0, {0.0, 0.0, 0.0}}};
  const auto m = solve_master(cuts, 3);
  CHECK(m.t == 5.0);
  CHECK(m.schedule == Schedule::all_transmit(3));
  CHECK(solve_master_exhaustive(cuts, 3).schedule == Schedule::all_transmit(3));
}

TEST_CASE("master: two crossing cuts") {
  const std::vector<BendersCut> cuts = {{1.0, {1.0, 0.0}}, {3.0, {-1.0, -1.0}}};
  for (const auto& m : {solve_master(cuts, 2), solve_master_exhaustive(cuts, 2)}) {
    CHECK(m.t == doctest::Approx(2.0));
    CHECK(m.schedule == Schedule(std::vector<int>{1, 0}));
  }
  CHECK(master_value(cuts, Schedule(std::vector<int>{0, 0})) == 1.0);
  CHECK(master_value(cuts, Schedule(std::vector<int>{1, 1})) == 1.0);
}

TEST_CASE("master: negative cuts clamp at zero") {
  const std::vector<BendersCut> cuts = {{-1.0, {-1.0, -2.0}}};
  const auto m = solve_master(cuts, 2);
  CHECK(m.t == 0.0);
  CHECK(m.schedule == Schedule::all_transmit(2));
}

TEST_CASE("master: no binary variables") {
  const std::vector<BendersCut> cuts = {{2.5, {}}, {1.5, {}}};
  const auto m = solve_master(cuts, 0);
  CHECK(m.t == 1.5);
  CHECK(m.schedule.size() == 0);
}

TEST_CASE("master: usage and capacity errors") {
  CHECK_THROWS_AS(solve_master({}, 3), UsageError);
  CHECK_THROWS_AS(solve_master_exhaustive({}, 3), UsageError);
  const std::vector<BendersCut> wide = {{1.0, std::vector<double>(25, 0.0)}};
  CHECK_THROWS_AS(solve_master_exhaustive(wide, 25), CapacityError);
  const std::vector<BendersCut> mismatched = {{1.0, {0.0}}};
  CHECK_THROWS(solve_master(mismatched, 2));
}

TEST_CASE("branch and bound equals enumeration on random cut systems") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> m_dist(1, 10);
  for (int k = 0; k < 1500; ++k) {
    const std::size_t M = m_dist(rng);
    const auto cuts = random_cuts(rng, M, k % 2 == 0);
    const auto bb = solve_master(cuts, M);
    const auto ex = solve_master_exhaustive(cuts, M);
    const auto ref = oracle::master_by_enumeration(cuts, M);
    CHECK(std::abs(bb.t - ref.t) <= 1e-9);
    CHECK(std::abs(ex.t - ref.t) <= 1e-9);
    CHECK(bb.schedule.code() == ref.code);
    CHECK(ex.schedule.code() == ref.code);
    CHECK(std::abs(master_value(cuts, bb.schedule) - bb.t) <= 1e-9);
  }
}

TEST_CASE("adding a cut never raises the master optimum") {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 300; ++k) {
    const std::size_t M = 1 + k % 8;
    auto cuts = random_cuts(rng, M, false);
    double previous = solve_master(std::span<const BendersCut>(cuts.data(), 1), M).t;
    for (std::size_t n = 2; n <= cuts.size(); ++n) {
      const double t = solve_master(std::span<const BendersCut>(cuts.data(), n), M).t;
      CHECK(t <= previous + 1e-12);
      previous = t;
    }
  }
}
