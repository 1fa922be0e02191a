#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehcr/model.hpp"

namespace ehcr {

/// Mean power gain of each link. Gains are exponential (Rayleigh amplitude),
/// so the published "variance" of a link is read as the mean of its power
/// gain. The PT-PR mean never enters the secondary's problem.
struct ChannelStatistics {
  double var_pp = 0.1;
  double var_ps = 0.1;
  double var_sp = 0.1;
  double var_ss = 0.1;

  void validate() const;
};

struct ChannelProfile {
  std::string name;
  ChannelStatistics stats;
};

/// Draws h_ss (N values), then h_ps and h_sp (M values each) from the Philox
/// stream (seed, stream). Equal uniforms are reused across statistics, so
/// changing a mean rescales a realization instead of redrawing it.
ChannelRealization generate_channel(const ChannelStatistics& stats, const ScenarioParams& params,
                                    std::uint64_t seed, std::uint64_t stream = 0);

enum class SweepVariable { kInterference, kSlots, kPrimaryPower, kProfile, kAlpha };

const char* to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

struct SweepSpec {
  std::string name = "sweep";  // CSV stem
  SweepVariable variable = SweepVariable::kInterference;
  std::vector<double> grid;
  std::size_t trials = 500;
  std::uint64_t seed = 0;
  double epsilon = 1e-4;
  ScenarioParams base;
  ChannelStatistics stats;
  std::vector<ChannelProfile> profiles;     // kProfile: grid values index this list
  std::optional<std::size_t> primary_gap;   // kSlots: M = N - primary_gap (else M is kept)
  unsigned workers = 0;                     // 0 = hardware concurrency

  void validate() const;
  /// Instance parameters and channel statistics at one grid value.
  ScenarioParams params_at(double x) const;
  ChannelStatistics stats_at(double x) const;
};

struct SweepRow {
  double x_value = 0.0;
  double mean_rate_opt = 0.0;
  double mean_rate_greedy = 0.0;
  double mean_eh_slots = 0.0;
  double mean_tx_slots = 0.0;
  double mean_iters = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double sem_rate_opt = 0.0;
  double sem_rate_greedy = 0.0;
  std::size_t resampled = 0;  // trials redrawn after an instance-level failure
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;
};

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monte-Carlo averages of the GBD optimum and the greedy baseline at every
/// grid value. Trial k uses channel stream k at every grid value (common
/// random numbers). A failing trial is redrawn once from a fresh stream; a
/// second failure aborts with SweepError.
SweepResult run_sweep(const SweepSpec& spec);

inline constexpr const char* kSweepCsvHeader =
    "x_value,mean_rate_opt,mean_rate_greedy,mean_eh_slots,mean_tx_slots,mean_iters,trials,seed,"
    "sem_rate_opt,sem_rate_greedy";

std::string sweep_csv(const SweepResult& result);

}  // namespace ehcr
