#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ehcr/model.hpp"
#include "ehcr/primal_solver.hpp"

namespace ehcr {

/// Two schedules whose master values differ by at most this are tied; ties go
/// to the lexicographically smallest schedule.
inline constexpr double kMasterTieTol = 1e-9;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Affine optimality cut  t <= c0 + sum_i c[i] * I_H[i]  (bits/s/Hz).
struct BendersCut {
  double c0 = 0.0;
  std::vector<double> c;

  double evaluate(const Schedule& sched) const;
};

struct MasterSolution {
  double t = 0.0;
  Schedule schedule;
  std::size_t node_count = 0;
};

/// Collects the schedule-dependent terms of the primal Lagrangian at a fixed
/// (p_s, multipliers) pair. Multipliers are in nats, the cut is in bits.
BendersCut build_cut(const ScenarioParams& params, const ChannelRealization& chan, const PrimalSolution& sol);

/// max t over t >= 0 and binary schedules, subject to every cut. Schedules
/// whose cuts all go negative are valued at zero.
///
/// Branch and bound on the LP relaxation (dense simplex), branching on the
/// most fractional indicator. A second depth-first pass in lexicographic
/// order picks the smallest schedule within kMasterTieTol of the optimum.
MasterSolution solve_master(std::span<const BendersCut> cuts, std::size_t M);

/// Same problem by enumerating all 2^M schedules. M <= 24.
MasterSolution solve_master_exhaustive(std::span<const BendersCut> cuts, std::size_t M);

/// Value of a schedule in the master: max(0, min over cuts).
double master_value(std::span<const BendersCut> cuts, const Schedule& sched);

}  // namespace ehcr
