#include "ehcr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ehcr {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw FormatError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key);
}

ScenarioParams params_from_json(const json& j) {
  ScenarioParams p;
  p.M = get<std::size_t>(j, "M");
  p.N = get<std::size_t>(j, "N");
  p.E0 = get<double>(j, "E0");
  p.alpha = get<double>(j, "alpha");
  p.p_p = get<double>(j, "p_p");
  p.P_int = get<double>(j, "P_int");
  p.sigma2 = get<double>(j, "sigma2");
  p.tau = get_or<double>(j, "tau", 1.0);
  return p;
}

ChannelStatistics stats_from_json(const json& j, ChannelStatistics s = {}) {
  s.var_pp = get_or(j, "var_pp", s.var_pp);
  s.var_ps = get_or(j, "var_ps", s.var_ps);
  s.var_sp = get_or(j, "var_sp", s.var_sp);
  s.var_ss = get_or(j, "var_ss", s.var_ss);
  return s;
}

json stats_to_json(const ChannelStatistics& s) {
  return {{"var_pp", s.var_pp}, {"var_ps", s.var_ps}, {"var_sp", s.var_sp}, {"var_ss", s.var_ss}};
}

}  // namespace

json to_json(const ScenarioParams& p) {
  return {{"M", p.M},         {"N", p.N},         {"E0", p.E0},         {"alpha", p.alpha},
          {"p_p", p.p_p},     {"P_int", p.P_int}, {"sigma2", p.sigma2}, {"tau", p.tau}};
}

json to_json(const Instance& inst) {
  return {{"params", to_json(inst.params)},
          {"channel", {{"h_ss", inst.channel.h_ss}, {"h_ps", inst.channel.h_ps}, {"h_sp", inst.channel.h_sp}}}};
}

Instance instance_from_json(const json& j) {
  Instance inst;
  inst.params = params_from_json(field(j, "params"));
  const json& ch = field(j, "channel");
  inst.channel.h_ss = get<std::vector<double>>(ch, "h_ss");
  inst.channel.h_ps = get<std::vector<double>>(ch, "h_ps");
  inst.channel.h_sp = get<std::vector<double>>(ch, "h_sp");
  return inst;
}

json to_json(const DualSet& d) {
  return {{"theta", d.theta}, {"lambda", d.lambda}, {"gamma", d.gamma}, {"delta", d.delta}, {"mu", d.mu}};
}

DualSet duals_from_json(const json& j) {
  DualSet d;
  d.theta = get<double>(j, "theta");
  d.lambda = get<std::vector<double>>(j, "lambda");
  d.gamma = get<std::vector<double>>(j, "gamma");
  d.delta = get<std::vector<double>>(j, "delta");
  d.mu = get<std::vector<double>>(j, "mu");
  return d;
}

json to_json(const OptimalPolicy& policy) {
  return {{"schedule", policy.schedule.bits()},
          {"p_s", policy.allocation.p_s},
          {"objective", policy.allocation.objective},
          {"gap", policy.gap},
          {"iterations", policy.iterations},
          {"duals", to_json(policy.duals)}};
}

OptimalPolicy policy_from_json(const json& j) {
  OptimalPolicy p;
  try {
    p.schedule = Schedule(get<std::vector<int>>(j, "schedule"));
  } catch (const InstanceError& e) {
    throw FormatError(e.what());
  }
  p.allocation.p_s = get<std::vector<double>>(j, "p_s");
  p.allocation.objective = get<double>(j, "objective");
  p.gap = get_or(j, "gap", 0.0);
  p.iterations = get_or(j, "iterations", 0);
  if (j.contains("duals")) p.duals = duals_from_json(j.at("duals"));
  return p;
}

json to_json(const BendersCut& cut) { return {{"c0", cut.c0}, {"c", cut.c}}; }

BendersCut cut_from_json(const json& j) { return {get<double>(j, "c0"), get<std::vector<double>>(j, "c")}; }

json cuts_to_json(std::span<const BendersCut> cuts) {
  json arr = json::array();
  for (const auto& c : cuts) arr.push_back(to_json(c));
  return arr;
}

std::string trace_csv(const GbdTrace& trace) {
  std::string out = "iter,lower_bound,upper_bound,schedule_bits,primal_objective\n";
  char buf[256];
  for (const auto& it : trace.iterations) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,", it.iter, it.lower_bound, it.upper_bound);
    out += buf;
    out += it.schedule.size() == 0 ? "-" : it.schedule.to_string();
    std::snprintf(buf, sizeof buf, ",%.17g\n", it.primal_objective);
    out += buf;
  }
  return out;
}

std::vector<SweepSpec> sweep_specs_from_json(const json& j) {
  if (j.is_object() && j.contains("sweeps")) {
    std::vector<SweepSpec> all;
    for (const auto& s : field(j, "sweeps")) {
      auto one = sweep_specs_from_json(s);
      all.insert(all.end(), one.begin(), one.end());
    }
    return all;
  }
  SweepSpec s;
  s.name = get<std::string>(j, "name");
  try {
    s.variable = sweep_variable_from_string(get<std::string>(j, "variable"));
  } catch (const InstanceError& e) {
    throw FormatError(e.what());
  }
  s.grid = get<std::vector<double>>(j, "grid");
  s.trials = get_or<std::size_t>(j, "trials", 500);
  s.seed = get_or<std::uint64_t>(j, "seed", 0);
  s.epsilon = get_or(j, "epsilon", 1e-4);
  s.base = params_from_json(field(j, "params"));
  if (j.contains("stats")) s.stats = stats_from_json(j.at("stats"));
  if (j.contains("profiles")) {
    for (const auto& p : j.at("profiles")) s.profiles.push_back({get<std::string>(p, "name"), stats_from_json(p)});
  }
  if (j.contains("primary_gap")) s.primary_gap = get<std::size_t>(j, "primary_gap");
  s.workers = get_or(j, "workers", 0u);
  return {s};
}

json to_json(const SweepSpec& s) {
  json j = {{"name", s.name},     {"variable", to_string(s.variable)}, {"grid", s.grid},
            {"trials", s.trials}, {"seed", s.seed},                    {"epsilon", s.epsilon},
            {"params", to_json(s.base)}, {"stats", stats_to_json(s.stats)}};
  if (!s.profiles.empty()) {
    json arr = json::array();
    for (const auto& p : s.profiles) {
      json pj = stats_to_json(p.stats);
      pj["name"] = p.name;
      arr.push_back(pj);
    }
    j["profiles"] = arr;
  }
  if (s.primary_gap) j["primary_gap"] = *s.primary_gap;
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace ehcr
