#pragma once

#include <cstddef>
#include <vector>

#include "ehcr/model.hpp"

namespace ehcr::detail {

// One affine row  coef * sum_{i=first..last} p_i <= rhs  of the convex
// reformulation for a fixed schedule. Every row has a uniform coefficient.
struct Row {
  ConstraintFamily family;
  std::size_t slot;
  std::size_t first;
  std::size_t last;
  double coef;
  double rhs;

  bool covers(std::size_t i) const { return first <= i && i <= last; }
};

// Rows in a fixed order: first-slot budget, harvest gates, primary-phase
// cumulative budgets, tail budgets, interference caps.
inline std::vector<Row> build_rows(const ScenarioParams& params, const ChannelRealization& chan,
                                   const Schedule& sched) {
  const std::size_t M = params.M;
  const std::size_t N = params.N;
  const double gate = params.harvest_gate_bound();
  const double per_harvest = params.alpha * params.p_p;
  std::vector<Row> rows;
  rows.reserve(2 * M + N);

  if (M >= 1) rows.push_back({ConstraintFamily::kFirstSlotBudget, 0, 0, 0, 1.0, (1 - sched[0]) * params.E0});
  for (std::size_t i = 1; i < M; ++i) {
    rows.push_back({ConstraintFamily::kHarvestGate, i, i, i, 1.0, (1 - sched[i]) * gate});
  }
  double harvested = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double budget = params.E0 + per_harvest * harvested;
    if (i >= M) {
      rows.push_back({ConstraintFamily::kTailBudget, i, 0, i, 1.0, budget});
    } else if (i >= 1) {
      rows.push_back({ConstraintFamily::kPrimaryBudget, i, 0, i, 1.0, budget});
    }
    if (i < M) harvested += sched[i];
  }
  for (std::size_t i = 0; i < M; ++i) {
    rows.push_back({ConstraintFamily::kInterference, i, i, i, chan.h_sp[i], params.P_int});
  }
  return rows;
}

}  // namespace ehcr::detail
