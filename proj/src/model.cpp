#include "ehcr/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ehcr {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void check_dims(const ScenarioParams& params, const ChannelRealization& chan, std::size_t n_power) {
  params.validate();
  chan.validate(params);
  if (n_power != params.N) {
    std::ostringstream os;
    os << "power vector has " << n_power << " entries, expected N = " << params.N;
    throw InstanceError(os.str());
  }
}

void check_schedule(const ScenarioParams& params, const Schedule& sched) {
  if (sched.size() != params.M) {
    std::ostringstream os;
    os << "schedule has " << sched.size() << " entries, expected M = " << params.M;
    throw InstanceError(os.str());
  }
}

}  // namespace

void ScenarioParams::validate() const {
  if (N < 1) throw InstanceError("N must be at least 1");
  if (M > N) throw InstanceError("M > N is not supported (primary active longer than the secondary horizon)");
  if (!finite_nonneg(E0)) throw InstanceError("E0 must be finite and >= 0");
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) throw InstanceError("alpha must lie in [0, 1]");
  if (!finite_nonneg(p_p)) throw InstanceError("p_p must be finite and >= 0");
  if (!finite_nonneg(P_int)) throw InstanceError("P_int must be finite and >= 0");
  if (!std::isfinite(sigma2) || sigma2 <= 0.0) throw InstanceError("sigma2 must be finite and > 0");
  if (tau != 1.0) throw InstanceError("only tau = 1 is supported");
}

void ChannelRealization::validate(const ScenarioParams& params) const {
  if (h_ss.size() != params.N || h_ps.size() != params.M || h_sp.size() != params.M) {
    std::ostringstream os;
    os << "channel sizes (" << h_ss.size() << ", " << h_ps.size() << ", " << h_sp.size()
       << ") do not match (N, M, M) = (" << params.N << ", " << params.M << ", " << params.M << ")";
    throw InstanceError(os.str());
  }
  auto bad = [](const std::vector<double>& v) { return !std::all_of(v.begin(), v.end(), finite_nonneg); };
  if (bad(h_ss) || bad(h_ps) || bad(h_sp)) throw InstanceError("channel gains must be finite and >= 0");
}

Schedule::Schedule(std::vector<int> bits) : bits_(std::move(bits)) {
  for (int b : bits_) {
    if (b != 0 && b != 1) throw InstanceError("schedule entries must be 0 or 1");
  }
}

Schedule Schedule::from_code(std::size_t m, unsigned long long code) {
  std::vector<int> bits(m);
  for (std::size_t i = 0; i < m; ++i) bits[i] = static_cast<int>((code >> (m - 1 - i)) & 1ULL);
  return Schedule(std::move(bits));
}

std::size_t Schedule::harvest_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::string Schedule::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (int b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

unsigned long long Schedule::code() const {
  unsigned long long c = 0;
  for (int b : bits_) c = (c << 1) | static_cast<unsigned long long>(b);
  return c;
}

double slot_gain(const ScenarioParams& params, const ChannelRealization& chan, std::size_t slot) {
  if (slot < params.M) return chan.h_ss[slot] / (params.sigma2 + chan.h_ps[slot] * params.p_p);
  return chan.h_ss[slot] / params.sigma2;
}

double rate(const ScenarioParams& params, const ChannelRealization& chan, std::span<const double> p_s) {
  check_dims(params, chan, p_s.size());
  double total = 0.0;
  for (std::size_t i = 0; i < params.N; ++i) {
    if (p_s[i] < 0.0) throw InstanceError("transmit powers must be >= 0");
    total += std::log2(1.0 + slot_gain(params, chan, i) * p_s[i]);
  }
  return total;
}

double p1_objective(const ScenarioParams& params, const ChannelRealization& chan, const Schedule& sched,
                    std::span<const double> p_s) {
  check_dims(params, chan, p_s.size());
  check_schedule(params, sched);
  double total = 0.0;
  for (std::size_t i = 0; i < params.N; ++i) {
    if (i < params.M && sched.harvests(i)) continue;
    total += std::log2(1.0 + slot_gain(params, chan, i) * p_s[i]);
  }
  return total;
}

const char* to_string(ConstraintFamily family) {
  switch (family) {
    case ConstraintFamily::kFirstSlotBudget: return "first_slot_budget";
    case ConstraintFamily::kHarvestGate: return "harvest_gate";
    case ConstraintFamily::kPrimaryBudget: return "primary_budget";
    case ConstraintFamily::kTailBudget: return "tail_budget";
    case ConstraintFamily::kInterference: return "interference";
    case ConstraintFamily::kNonnegative: return "nonnegative";
  }
  return "unknown";
}

double FeasibilityReport::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : slacks) m = std::min(m, s.slack);
  return m;
}

const ConstraintSlack& FeasibilityReport::worst() const {
  return *std::min_element(slacks.begin(), slacks.end(),
                           [](const auto& a, const auto& b) { return a.slack < b.slack; });
}

FeasibilityReport check_feasible_p1(const ScenarioParams& params, const ChannelRealization& chan,
                                    const Schedule& sched, std::span<const double> p_s) {
  check_dims(params, chan, p_s.size());
  check_schedule(params, sched);
  const std::size_t M = params.M;
  const std::size_t N = params.N;
  FeasibilityReport report;

  double spent = 0.0;
  double harvested = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const bool tx = i >= M || !sched.harvests(i);
    if (tx) spent += p_s[i];
    const double budget = params.E0 + params.alpha * harvested;
    ConstraintFamily family = ConstraintFamily::kTailBudget;
    if (i < M) family = i == 0 ? ConstraintFamily::kFirstSlotBudget : ConstraintFamily::kPrimaryBudget;
    report.slacks.push_back({family, i, budget - spent});
    if (i < M && sched.harvests(i)) harvested += params.p_p;
  }
  for (std::size_t i = 0; i < M; ++i) {
    const double used = sched.harvests(i) ? 0.0 : chan.h_sp[i] * p_s[i];
    report.slacks.push_back({ConstraintFamily::kInterference, i, params.P_int - used});
  }
  for (std::size_t i = 0; i < N; ++i) report.slacks.push_back({ConstraintFamily::kNonnegative, i, p_s[i]});
  return report;
}

FeasibilityReport check_feasible_p2(const ScenarioParams& params, const ChannelRealization& chan,
                                    const Schedule& sched, std::span<const double> p_s) {
  check_dims(params, chan, p_s.size());
  check_schedule(params, sched);
  const std::size_t M = params.M;
  const std::size_t N = params.N;
  const double gate = params.harvest_gate_bound();
  FeasibilityReport report;

  if (M >= 1) {
    report.slacks.push_back({ConstraintFamily::kFirstSlotBudget, 0, (1 - sched[0]) * params.E0 - p_s[0]});
  }
  for (std::size_t i = 1; i < M; ++i) {
    report.slacks.push_back({ConstraintFamily::kHarvestGate, i, (1 - sched[i]) * gate - p_s[i]});
  }

  double cumulative = 0.0;
  double harvested = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    cumulative += p_s[i];
    const double budget = params.E0 + params.alpha * params.p_p * harvested;
    if (i >= M) {
      report.slacks.push_back({ConstraintFamily::kTailBudget, i, budget - cumulative});
    } else if (i >= 1) {
      report.slacks.push_back({ConstraintFamily::kPrimaryBudget, i, budget - cumulative});
    }
    if (i < M) harvested += sched[i];
  }
  for (std::size_t i = 0; i < M; ++i) {
    report.slacks.push_back({ConstraintFamily::kInterference, i, params.P_int - chan.h_sp[i] * p_s[i]});
  }
  for (std::size_t i = 0; i < N; ++i) report.slacks.push_back({ConstraintFamily::kNonnegative, i, p_s[i]});
  return report;
}

}  // namespace ehcr
