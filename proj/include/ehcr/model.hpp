#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehcr {

/// Absolute tolerance on constraint slacks used by every feasibility test.
inline constexpr double kFeasibilityTol = 1e-9;

/// Thrown for malformed problem instances (bad sizes, out-of-range or
/// non-finite values).
class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an exhaustive routine is asked to enumerate too many schedules.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Static description of one harvest-or-transmit problem.
///
/// The primary transmitter is active in the first `M` of `N` secondary slots.
/// In those slots the secondary either harvests `alpha * p_p` joules or
/// transmits under the interference cap `P_int`; the remaining `N - M` slots
/// are transmit-only and interference-free. Slot length is one second, so
/// power and energy are interchangeable.
struct ScenarioParams {
  std::size_t M = 0;
  std::size_t N = 1;
  double E0 = 0.0;
  double alpha = 1.0;
  double p_p = 1.0;
  double P_int = 1.0;
  double sigma2 = 0.1;
  double tau = 1.0;

  /// Throws InstanceError if any field is out of range. N < M is rejected.
  void validate() const;

  /// Upper bound used to gate transmit power in harvest slots: E0 + M * p_p.
  double harvest_gate_bound() const { return E0 + static_cast<double>(M) * p_p; }
};

/// Per-slot power gains. `h_ss` has N entries; `h_ps` and `h_sp` have M.
struct ChannelRealization {
  std::vector<double> h_ss;  // ST -> SR
  std::vector<double> h_ps;  // PT -> SR (interference seen by the secondary)
  std::vector<double> h_sp;  // ST -> PR (interference caused at the primary)

  void validate(const ScenarioParams& params) const;
};

/// Harvest indicators for the first M slots: 1 = harvest, 0 = transmit.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(std::vector<int> bits);

  static Schedule all_transmit(std::size_t m) { return Schedule(std::vector<int>(m, 0)); }
  static Schedule all_harvest(std::size_t m) { return Schedule(std::vector<int>(m, 1)); }
  /// Bit i of `code` (most significant first) becomes slot i, so integer
  /// order equals lexicographic order of the indicator vector.
  static Schedule from_code(std::size_t m, unsigned long long code);

  std::size_t size() const { return bits_.size(); }
  bool harvests(std::size_t slot) const { return bits_.at(slot) != 0; }
  int operator[](std::size_t slot) const { return bits_[slot]; }
  const std::vector<int>& bits() const { return bits_; }
  std::size_t harvest_count() const;
  /// "0101"-style rendering, slot 1 first.
  std::string to_string() const;
  unsigned long long code() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
  friend auto operator<=>(const Schedule&, const Schedule&) = default;

 private:
  std::vector<int> bits_;
};

struct PowerAllocation {
  std::vector<double> p_s;
  double objective = 0.0;  // bits/s/Hz
};

/// Effective SINR gain per watt of slot `slot`: h_ss / (sigma2 + h_ps p_p)
/// while the primary is active, h_ss / sigma2 afterwards.
double slot_gain(const ScenarioParams& params, const ChannelRealization& chan, std::size_t slot);

/// Sum achievable rate in bits/s/Hz. Harvest slots need no special case since
/// their power is zero.
double rate(const ScenarioParams& params, const ChannelRealization& chan, std::span<const double> p_s);

enum class ConstraintFamily {
  kFirstSlotBudget,  // energy causality in slot 1
  kHarvestGate,      // transmit power gated to zero in harvest slots
  kPrimaryBudget,    // cumulative energy causality, slots 2..M
  kTailBudget,       // cumulative energy causality, slots M+1..N
  kInterference,     // interference cap at the primary receiver
  kNonnegative,      // p_s >= 0
};

const char* to_string(ConstraintFamily family);

struct ConstraintSlack {
  ConstraintFamily family;
  std::size_t slot;  // zero-based index of the last slot the constraint covers
  double slack;      // rhs - lhs; negative means violated
};

struct FeasibilityReport {
  std::vector<ConstraintSlack> slacks;

  double min_slack() const;
  double max_violation() const { return min_slack() < 0.0 ? -min_slack() : 0.0; }
  bool feasible(double tol = kFeasibilityTol) const { return min_slack() >= -tol; }
  /// Most violated (smallest slack) entry; slacks must be nonempty.
  const ConstraintSlack& worst() const;
};

/// Slacks of the original product-form problem (harvest indicators multiply
/// the powers in the budget and interference constraints).
FeasibilityReport check_feasible_p1(const ScenarioParams& params, const ChannelRealization& chan,
                                    const Schedule& sched, std::span<const double> p_s);

/// Slacks of the convex reformulation, where the schedule only enters the
/// right-hand sides.
FeasibilityReport check_feasible_p2(const ScenarioParams& params, const ChannelRealization& chan,
                                    const Schedule& sched, std::span<const double> p_s);

/// Objective of the product-form problem: rate with harvest slots masked out.
double p1_objective(const ScenarioParams& params, const ChannelRealization& chan, const Schedule& sched,
                    std::span<const double> p_s);

}  // namespace ehcr
