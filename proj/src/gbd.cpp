#include "ehcr/gbd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "ehcr/rng.hpp"

namespace ehcr {

Schedule random_schedule(std::size_t M, std::uint64_t seed) {
  CounterStream rng(seed, 0);
  std::vector<int> bits(M);
  for (auto& b : bits) b = static_cast<int>(rng() >> 63);
  return Schedule(std::move(bits));
}

GbdResult solve_gbd(const ScenarioParams& params, const ChannelRealization& chan, const GbdOptions& options) {
  params.validate();
  chan.validate(params);
  if (!(options.epsilon > 0.0)) throw InstanceError("epsilon must be positive");

  GbdResult result;
  GbdTrace& trace = result.trace;
  trace.epsilon = options.epsilon;

  Schedule current = options.init == InitialSchedule::kRandom ? random_schedule(params.M, options.seed)
                                                              : Schedule::all_transmit(params.M);
  std::vector<BendersCut> cuts;
  std::set<Schedule> visited;
  double lower = -std::numeric_limits<double>::infinity();
  std::optional<PrimalSolution> incumbent;
  Schedule incumbent_schedule;

  for (int j = 1; j <= options.max_iter; ++j) {
    PrimalSolution primal = solve_primal(params, chan, current, options.primal);
    visited.insert(current);
    if (primal.allocation.objective > lower) {
      lower = primal.allocation.objective;
      incumbent = primal;
      incumbent_schedule = current;
    }
    cuts.push_back(build_cut(params, chan, primal));
    const MasterSolution master = solve_master(cuts, params.M);

    GbdIteration rec;
    rec.iter = j;
    rec.schedule = current;
    rec.lower_bound = lower;
    rec.upper_bound = master.t;
    rec.primal_objective = primal.allocation.objective;
    rec.cut = cuts.back();
    rec.next_schedule = master.schedule;
    trace.iterations.push_back(std::move(rec));

    const double gap = std::abs(master.t - lower);
    const bool repeat = visited.contains(master.schedule);
    if (gap <= options.epsilon || repeat) {
      trace.stalled = gap > options.epsilon;
      result.policy = {incumbent_schedule, incumbent->allocation, incumbent->duals, gap, j};
      return result;
    }
    current = master.schedule;
  }

  std::ostringstream os;
  os << "GBD did not close the gap within " << options.max_iter << " iterations (last gap "
     << std::abs(trace.iterations.back().upper_bound - trace.iterations.back().lower_bound) << ")";
  throw GbdConvergenceError(os.str(), std::move(trace));
}

BoundHistoryReport bound_history_check(const GbdTrace& trace) {
  constexpr double kSlack = 1e-9;
  BoundHistoryReport report;
  if (trace.iterations.empty()) {
    report.pass = false;
    report.message = "empty trace";
    return report;
  }
  for (std::size_t k = 1; k < trace.iterations.size(); ++k) {
    const auto& prev = trace.iterations[k - 1];
    const auto& cur = trace.iterations[k];
    if (cur.lower_bound < prev.lower_bound - kSlack) {
      report.pass = false;
      report.offending_iter = cur.iter;
      report.message = "lower bound decreased";
      return report;
    }
    if (cur.upper_bound > prev.upper_bound + kSlack) {
      report.pass = false;
      report.offending_iter = cur.iter;
      report.message = "upper bound increased";
      return report;
    }
  }
  const auto& last = trace.iterations.back();
  if (std::abs(last.upper_bound - last.lower_bound) > trace.epsilon) {
    report.pass = false;
    report.offending_iter = last.iter;
    report.message = "final gap exceeds epsilon";
  }
  return report;
}

}  // namespace ehcr
