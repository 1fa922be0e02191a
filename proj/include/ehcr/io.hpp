#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ehcr/experiments.hpp"
#include "ehcr/gbd.hpp"
#include "ehcr/master_solver.hpp"
#include "ehcr/model.hpp"

namespace ehcr {

/// Malformed input documents (bad JSON, missing or mistyped fields).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Instance {
  ScenarioParams params;
  ChannelRealization channel;
};

// Instance: {"params": {...}, "channel": {"h_ss": [...], "h_ps": [...], "h_sp": [...]}}
nlohmann::json to_json(const ScenarioParams& params);
nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DualSet& duals);
DualSet duals_from_json(const nlohmann::json& j);

// Policy: {"schedule": [...], "p_s": [...], "objective": x, "gap": x, "iterations": n, "duals": {...}}
nlohmann::json to_json(const OptimalPolicy& policy);
OptimalPolicy policy_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BendersCut& cut);
BendersCut cut_from_json(const nlohmann::json& j);
nlohmann::json cuts_to_json(std::span<const BendersCut> cuts);

/// Columns: iter,lower_bound,upper_bound,schedule_bits,primal_objective
std::string trace_csv(const GbdTrace& trace);

/// A single sweep object, or {"sweeps": [...]} for several.
std::vector<SweepSpec> sweep_specs_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepSpec& spec);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ehcr
