#include "ehcr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ehcr {

OptimalPolicy exhaustive_policy_oracle(const ScenarioParams& params, const ChannelRealization& chan,
                                       const PrimalOptions& options) {
  params.validate();
  chan.validate(params);
  if (params.M > 16) {
    std::ostringstream os;
    os << "exhaustive oracle limited to M <= 16, got " << params.M;
    throw CapacityError(os.str());
  }
  OptimalPolicy best;
  double best_value = -std::numeric_limits<double>::infinity();
  const unsigned long long count = 1ULL << params.M;
  for (unsigned long long code = 0; code < count; ++code) {
    Schedule s = Schedule::from_code(params.M, code);
    PrimalSolution sol = solve_primal(params, chan, s, options);
    if (sol.allocation.objective > best_value) {
      best_value = sol.allocation.objective;
      best = {std::move(s), std::move(sol.allocation), std::move(sol.duals), 0.0, 0};
    }
  }
  best.iterations = static_cast<int>(count);
  return best;
}

OptimalPolicy greedy_myopic_policy(const ScenarioParams& params, const ChannelRealization& chan) {
  params.validate();
  chan.validate(params);
  const std::size_t M = params.M;
  const std::size_t N = params.N;

  std::vector<double> gain(N);
  for (std::size_t i = 0; i < N; ++i) gain[i] = slot_gain(params, chan, i);
  std::vector<double> gain_suffix(N + 1, 0.0);
  for (std::size_t i = N; i-- > 0;) gain_suffix[i] = gain_suffix[i + 1] + gain[i];

  std::vector<int> bits(M, 0);
  std::vector<double> p(N, 0.0);
  double battery = params.E0;
  const double harvest = params.alpha * params.p_p;

  for (std::size_t i = 0; i < M; ++i) {
    const double cap = chan.h_sp[i] > 0.0 ? params.P_int / chan.h_sp[i] : std::numeric_limits<double>::infinity();
    const double p_tx = std::min(battery, cap);
    const double r_tx = std::log2(1.0 + gain[i] * p_tx);

    double r_harvest = 0.0;
    const std::size_t remaining = N - i - 1;
    if (remaining > 0 && p_tx >= battery) {
      const double mean_gain = gain_suffix[i + 1] / static_cast<double>(remaining);
      r_harvest = std::log2(1.0 + mean_gain * harvest);
    }

    if (r_harvest > r_tx) {
      bits[i] = 1;
      battery += harvest;  // usable from the next slot on
    } else {
      p[i] = p_tx;
      battery = std::max(0.0, battery - p_tx);
    }
  }
  for (std::size_t i = M; i < N; ++i) {
    p[i] = battery / static_cast<double>(N - i);
    battery = std::max(0.0, battery - p[i]);
  }

  OptimalPolicy policy;
  policy.schedule = Schedule(std::move(bits));
  policy.allocation.objective = rate(params, chan, p);
  policy.allocation.p_s = std::move(p);
  policy.duals = DualSet::zeros(params);
  return policy;
}

}  // namespace ehcr
