#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehcr/master_solver.hpp"
#include "ehcr/model.hpp"
#include "ehcr/primal_solver.hpp"

namespace ehcr {

struct OptimalPolicy {
  Schedule schedule;
  PowerAllocation allocation;
  DualSet duals;
  double gap = 0.0;
  int iterations = 0;
};

struct GbdIteration {
  int iter = 0;                 // 1-based
  Schedule schedule;            // schedule whose primal was solved
  double lower_bound = 0.0;     // best primal objective so far
  double upper_bound = 0.0;     // master optimum after adding this cut
  double primal_objective = 0.0;
  BendersCut cut;
  Schedule next_schedule;       // master's proposal for the next iteration
};

struct GbdTrace {
  std::vector<GbdIteration> iterations;
  double epsilon = 0.0;
  bool stalled = false;  // master proposed an already solved schedule with gap > epsilon
};

enum class InitialSchedule { kRandom, kAllTransmit };

struct GbdOptions {
  double epsilon = 1e-4;
  std::uint64_t seed = 0;
  int max_iter = 200;
  InitialSchedule init = InitialSchedule::kRandom;
  PrimalOptions primal;
};

class GbdConvergenceError : public std::runtime_error {
 public:
  GbdConvergenceError(const std::string& what, GbdTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const GbdTrace& trace() const { return trace_; }

 private:
  GbdTrace trace_;
};

struct GbdResult {
  OptimalPolicy policy;
  GbdTrace trace;
};

/// Alternates fixed-schedule power solves (lower bounds, cuts) with the
/// master problem (upper bounds, next schedule) until the bounds meet within
/// epsilon. Returns the best primal iterate, not the master's last proposal.
GbdResult solve_gbd(const ScenarioParams& params, const ChannelRealization& chan, const GbdOptions& options = {});

/// Uniform draw from {0,1}^M driven only by `seed`.
Schedule random_schedule(std::size_t M, std::uint64_t seed);

struct BoundHistoryReport {
  bool pass = true;
  std::optional<int> offending_iter;
  std::string message;
};

/// Lower bounds nondecreasing, upper bounds nonincreasing (1e-9 slack each),
/// final gap within the trace's epsilon.
BoundHistoryReport bound_history_check(const GbdTrace& trace);

}  // namespace ehcr
