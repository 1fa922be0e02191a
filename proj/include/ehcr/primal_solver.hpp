#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehcr/model.hpp"

namespace ehcr {

/// Lagrange multipliers of the fixed-schedule power problem.
///
/// Multipliers are priced against the rate measured in nats, so the
/// stationarity condition for a transmitting slot reads
/// h_ss / (sigma2 + h_ps p_p + h_ss p) = (sum of multipliers covering it).
/// Benders cuts convert them to bits (see build_cut).
struct DualSet {
  double theta = 0.0;          // first-slot budget
  std::vector<double> lambda;  // harvest gate, slots 2..M      (size max(M-1, 0))
  std::vector<double> gamma;   // cumulative budget, slots 2..M (size max(M-1, 0))
  std::vector<double> delta;   // cumulative budget, slots M+1..N (size N-M)
  std::vector<double> mu;      // interference cap, slots 1..M  (size M)

  static DualSet zeros(const ScenarioParams& params);
  /// Multiplier attached to a constraint row; throws for kNonnegative.
  double& at(ConstraintFamily family, std::size_t slot, std::size_t M);
  double at(ConstraintFamily family, std::size_t slot, std::size_t M) const;
};

struct PrimalSolution {
  PowerAllocation allocation;
  DualSet duals;
  double kkt_residual = 0.0;
  int iterations = 0;
};

struct PrimalOptions {
  double tol = 1e-8;          // duality gap target of the interior-point phase
  double kkt_accept = 1e-6;   // largest KKT residual returned without error
  int max_iter = 200;         // barrier weight updates
};

/// Raised when the interior-point loop hits its iteration cap before the KKT
/// residual is acceptable. Carries the best iterate seen.
class PrimalConvergenceError : public std::runtime_error {
 public:
  PrimalConvergenceError(const std::string& what, PrimalSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const PrimalSolution& best() const { return best_; }

 private:
  PrimalSolution best_;
};

/// Raised by waterfill_from_duals when a slot's water level is unbounded.
class UnboundedLevelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Maximizes the sum rate over p_s >= 0 for a fixed harvest schedule.
///
/// Log-barrier interior point on every inequality (damped Newton centering,
/// multipliers read off as barrier weights), followed by an active-set polish that makes zero powers exactly zero and
/// drives the KKT residual to rounding level. Slots that are forced to zero
/// (harvest slots, empty budgets, zero caps, dead channels) are removed up
/// front and their multipliers recovered from stationarity afterwards.
PrimalSolution solve_primal(const ScenarioParams& params, const ChannelRealization& chan,
                            const Schedule& sched, const PrimalOptions& options = {});

struct KktReport {
  double max_residual = 0.0;
  std::string worst;  // e.g. "stationarity[3]" or "first_slot_budget[0]: primal"
};

/// Largest violation of stationarity (one-sided at zero power), complementary
/// slackness, dual sign and primal feasibility.
KktReport kkt_check(const ScenarioParams& params, const ChannelRealization& chan, const Schedule& sched,
                    std::span<const double> p_s, const DualSet& duals);

inline KktReport kkt_check(const ScenarioParams& params, const ChannelRealization& chan,
                           const Schedule& sched, const PrimalSolution& sol) {
  return kkt_check(params, chan, sched, sol.allocation.p_s, sol.duals);
}

/// Marginal rate in nats per joule of slot `slot` at power `p`.
double marginal_rate(const ScenarioParams& params, const ChannelRealization& chan, std::size_t slot, double p);

/// Closed-form powers implied by a multiplier set:
/// p_i = [1/zeta_i - (sigma2 + h_ps p_p)/h_ss]^+ while the primary is active,
/// p_i = [1/sum(delta_j, j >= i-M) - sigma2/h_ss]^+ afterwards.
std::vector<double> waterfill_from_duals(const ScenarioParams& params, const ChannelRealization& chan,
                                         const DualSet& duals);

}  // namespace ehcr
