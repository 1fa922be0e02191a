#pragma once

#include "ehcr/gbd.hpp"
#include "ehcr/model.hpp"
#include "ehcr/primal_solver.hpp"

namespace ehcr {

/// Solves the power problem for every schedule in {0,1}^M and keeps the best
/// (first in lexicographic order on ties). M <= 16.
OptimalPolicy exhaustive_policy_oracle(const ScenarioParams& params, const ChannelRealization& chan,
                                       const PrimalOptions& options = {});

/// Slot-by-slot greedy harvest-or-transmit rule.
///
/// While the primary is active, transmitting uses the largest power the
/// battery and the interference cap allow and earns that slot's rate.
/// Harvesting is credited with the rate alpha * p_p joules would earn at the
/// average gain of the remaining slots, but only when transmitting would
/// drain the battery; otherwise extra energy is worth nothing now. Ties go
/// to transmitting. After the primary leaves, the battery is split evenly
/// over the remaining slots.
OptimalPolicy greedy_myopic_policy(const ScenarioParams& params, const ChannelRealization& chan);

}  // namespace ehcr
