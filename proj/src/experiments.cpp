#include "ehcr/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>

#include "ehcr/baselines.hpp"
#include "ehcr/gbd.hpp"
#include "ehcr/rng.hpp"

namespace ehcr {

void ChannelStatistics::validate() const {
  for (double v : {var_pp, var_ps, var_sp, var_ss}) {
    if (!std::isfinite(v) || v <= 0.0) throw InstanceError("channel means must be finite and > 0");
  }
}

ChannelRealization generate_channel(const ChannelStatistics& stats, const ScenarioParams& params,
                                    std::uint64_t seed, std::uint64_t stream) {
  stats.validate();
  params.validate();
  CounterStream rng(seed, stream);
  ChannelRealization chan;
  chan.h_ss.resize(params.N);
  chan.h_ps.resize(params.M);
  chan.h_sp.resize(params.M);
  for (auto& h : chan.h_ss) h = rng.exponential(stats.var_ss);
  for (auto& h : chan.h_ps) h = rng.exponential(stats.var_ps);
  for (auto& h : chan.h_sp) h = rng.exponential(stats.var_sp);
  return chan;
}

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::kInterference: return "P_int";
    case SweepVariable::kSlots: return "N";
    case SweepVariable::kPrimaryPower: return "p_p";
    case SweepVariable::kProfile: return "profile";
    case SweepVariable::kAlpha: return "alpha";
  }
  return "unknown";
}

SweepVariable sweep_variable_from_string(const std::string& s) {
  for (auto v : {SweepVariable::kInterference, SweepVariable::kSlots, SweepVariable::kPrimaryPower,
                 SweepVariable::kProfile, SweepVariable::kAlpha}) {
    if (s == to_string(v)) return v;
  }
  throw InstanceError("unknown sweep variable '" + s + "'");
}

void SweepSpec::validate() const {
  if (trials < 1) throw InstanceError("sweep needs at least one trial per grid point");
  if (grid.empty()) throw InstanceError("sweep grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw InstanceError("sweep grid must be sorted");
  if (!(epsilon > 0.0)) throw InstanceError("epsilon must be positive");
  stats.validate();
  if (variable == SweepVariable::kProfile) {
    for (double x : grid) {
      if (x < 0.0 || x != std::floor(x) || static_cast<std::size_t>(x) >= profiles.size()) {
        throw InstanceError("profile sweep grid must index the profile list");
      }
    }
    for (const auto& p : profiles) p.stats.validate();
  }
  for (double x : grid) params_at(x).validate();
}

ScenarioParams SweepSpec::params_at(double x) const {
  ScenarioParams p = base;
  switch (variable) {
    case SweepVariable::kInterference: p.P_int = x; break;
    case SweepVariable::kPrimaryPower: p.p_p = x; break;
    case SweepVariable::kAlpha: p.alpha = x; break;
    case SweepVariable::kProfile: break;
    case SweepVariable::kSlots: {
      if (x < 1.0 || x != std::floor(x)) throw InstanceError("slot sweep grid must hold positive integers");
      p.N = static_cast<std::size_t>(x);
      if (primary_gap) {
        if (*primary_gap > p.N) throw InstanceError("primary_gap exceeds N");
        p.M = p.N - *primary_gap;
      }
      break;
    }
  }
  return p;
}

ChannelStatistics SweepSpec::stats_at(double x) const {
  if (variable == SweepVariable::kProfile) return profiles.at(static_cast<std::size_t>(x)).stats;
  return stats;
}

namespace {

struct TrialOutcome {
  double rate_opt = 0.0;
  double rate_greedy = 0.0;
  double eh_slots = 0.0;
  double tx_slots = 0.0;
  double iters = 0.0;
  bool resampled = false;
};

TrialOutcome run_trial(const SweepSpec& spec, const ScenarioParams& params, const ChannelStatistics& stats,
                       std::size_t trial) {
  std::string first_error;
  for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
    const std::uint64_t stream = static_cast<std::uint64_t>(trial) | (attempt << 40);
    try {
      const ChannelRealization chan = generate_channel(stats, params, spec.seed, stream);
      GbdOptions opt;
      opt.epsilon = spec.epsilon;
      opt.seed = CounterStream(spec.seed, stream | (std::uint64_t{1} << 63))();
      const GbdResult gbd = solve_gbd(params, chan, opt);
      const OptimalPolicy greedy = greedy_myopic_policy(params, chan);
      TrialOutcome out;
      out.rate_opt = gbd.policy.allocation.objective;
      out.rate_greedy = greedy.allocation.objective;
      out.eh_slots = static_cast<double>(gbd.policy.schedule.harvest_count());
      out.tx_slots = static_cast<double>(params.M) - out.eh_slots;
      out.iters = gbd.policy.iterations;
      out.resampled = attempt > 0;
      return out;
    } catch (const std::exception& e) {
      if (attempt == 0) {
        first_error = e.what();
        continue;
      }
      std::ostringstream os;
      os << "sweep '" << spec.name << "': trial " << trial << " failed twice (seed " << spec.seed
         << "): first: " << first_error << "; second: " << e.what();
      throw SweepError(os.str());
    }
  }
  return {};
}

double mean(const std::vector<TrialOutcome>& v, double TrialOutcome::*field) {
  double s = 0.0;
  for (const auto& o : v) s += o.*field;
  return s / static_cast<double>(v.size());
}

double sem(const std::vector<TrialOutcome>& v, double TrialOutcome::*field) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v, field);
  double ss = 0.0;
  for (const auto& o : v) ss += (o.*field - m) * (o.*field - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.spec = spec;
  unsigned workers = spec.workers != 0 ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, spec.trials));

  for (double x : spec.grid) {
    const ScenarioParams params = spec.params_at(x);
    const ChannelStatistics stats = spec.stats_at(x);
    std::vector<TrialOutcome> outcomes(spec.trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
      for (std::size_t k = next++; k < spec.trials && !failed; k = next++) {
        try {
          outcomes[k] = run_trial(spec, params, stats, k);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    };
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    SweepRow row;
    row.x_value = x;
    row.mean_rate_opt = mean(outcomes, &TrialOutcome::rate_opt);
    row.mean_rate_greedy = mean(outcomes, &TrialOutcome::rate_greedy);
    row.mean_eh_slots = mean(outcomes, &TrialOutcome::eh_slots);
    row.mean_tx_slots = mean(outcomes, &TrialOutcome::tx_slots);
    row.mean_iters = mean(outcomes, &TrialOutcome::iters);
    row.trials = spec.trials;
    row.seed = spec.seed;
    row.sem_rate_opt = sem(outcomes, &TrialOutcome::rate_opt);
    row.sem_rate_greedy = sem(outcomes, &TrialOutcome::rate_greedy);
    row.resampled = static_cast<std::size_t>(
        std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.resampled; }));
    result.rows.push_back(row);
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  char buf[64];
  auto put = [&](auto v, char sep) {
    const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
    out.append(buf, end);
    out += sep;
  };
  for (const auto& r : result.rows) {
    put(r.x_value, ',');
    put(r.mean_rate_opt, ',');
    put(r.mean_rate_greedy, ',');
    put(r.mean_eh_slots, ',');
    put(r.mean_tx_slots, ',');
    put(r.mean_iters, ',');
    put(r.trials, ',');
    put(r.seed, ',');
    put(r.sem_rate_opt, ',');
    put(r.sem_rate_greedy, '\n');
  }
  return out;
}

}  // namespace ehcr
