#include "ehcr/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "ehcr/baselines.hpp"
#include "ehcr/experiments.hpp"
#include "ehcr/gbd.hpp"
#include "ehcr/io.hpp"
#include "ehcr/primal_solver.hpp"
#include "ehcr/rng.hpp"

namespace ehcr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct GlobalFlags {
  std::uint64_t seed = 0;
  bool seed_set = false;
  double epsilon = 1e-4;
  bool epsilon_set = false;
  std::string out_dir = "out";
  std::optional<std::size_t> trials;
  std::string init = "random";
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path prepare_out_dir(const GlobalFlags& flags) {
  fs::path dir(flags.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_metadata(const fs::path& dir, const std::string& command, const GlobalFlags& flags, json extra = {}) {
  json meta = {{"tool", "ehcr"},         {"version", kVersion},         {"command", command},
               {"seed", flags.seed},     {"epsilon", flags.epsilon},    {"rng", Philox4x32::kAlgorithm},
               {"timestamp", utc_timestamp()}};
  if (extra.is_object()) meta.update(extra);
  write_text_file(dir / "metadata.json", meta.dump(2) + "\n");
}

Instance load_instance(const std::string& path) {
  Instance inst = instance_from_json(read_json_file(path));
  try {
    inst.params.validate();
    inst.channel.validate(inst.params);
  } catch (const InstanceError& e) {
    throw FormatError(path + ": " + e.what());
  }
  return inst;
}

int run_solve(const GlobalFlags& flags, const std::string& instance_path) {
  const Instance inst = load_instance(instance_path);
  GbdOptions opt;
  opt.epsilon = flags.epsilon;
  opt.seed = flags.seed;
  opt.init = flags.init == "zeros" ? InitialSchedule::kAllTransmit : InitialSchedule::kRandom;
  const GbdResult res = solve_gbd(inst.params, inst.channel, opt);

  const fs::path dir = prepare_out_dir(flags);
  std::vector<BendersCut> cuts;
  for (const auto& it : res.trace.iterations) cuts.push_back(it.cut);
  write_text_file(dir / "instance.json", to_json(inst).dump(2) + "\n");
  write_text_file(dir / "policy.json", to_json(res.policy).dump(2) + "\n");
  write_text_file(dir / "trace.csv", trace_csv(res.trace));
  write_text_file(dir / "cuts.json", cuts_to_json(cuts).dump(2) + "\n");
  write_metadata(dir, "solve", flags, {{"stalled", res.trace.stalled}});

  std::cout << "schedule " << (res.policy.schedule.size() ? res.policy.schedule.to_string() : "-") << "  rate "
            << res.policy.allocation.objective << " bits/s/Hz  gap " << res.policy.gap << "  iterations "
            << res.policy.iterations << "\n";
  return kExitOk;
}

int run_oracle(const GlobalFlags& flags, const std::string& instance_path) {
  const Instance inst = load_instance(instance_path);
  const OptimalPolicy policy = exhaustive_policy_oracle(inst.params, inst.channel);
  const fs::path dir = prepare_out_dir(flags);
  write_text_file(dir / "instance.json", to_json(inst).dump(2) + "\n");
  write_text_file(dir / "policy.json", to_json(policy).dump(2) + "\n");
  write_metadata(dir, "oracle", flags);
  std::cout << "schedule " << (policy.schedule.size() ? policy.schedule.to_string() : "-") << "  rate "
            << policy.allocation.objective << " bits/s/Hz\n";
  return kExitOk;
}

int run_sweep_cmd(const GlobalFlags& flags, const std::string& spec_path) {
  const json doc = read_json_file(spec_path);
  std::vector<SweepSpec> specs = sweep_specs_from_json(doc);
  for (auto& s : specs) {
    if (flags.seed_set) s.seed = flags.seed;
    if (flags.epsilon_set) s.epsilon = flags.epsilon;
    if (flags.trials) s.trials = *flags.trials;
    try {
      s.validate();
    } catch (const InstanceError& e) {
      throw FormatError(spec_path + ": " + e.what());
    }
  }
  const fs::path dir = prepare_out_dir(flags);
  write_text_file(dir / "spec.json", doc.dump(2) + "\n");
  json resampled = json::object();
  for (const auto& s : specs) {
    const SweepResult res = run_sweep(s);
    write_text_file(dir / (s.name + ".csv"), sweep_csv(res));
    std::size_t n = 0;
    for (const auto& r : res.rows) n += r.resampled;
    resampled[s.name] = n;
    std::cout << "wrote " << (dir / (s.name + ".csv")).string() << "\n";
  }
  write_metadata(dir, "sweep", flags, {{"resampled_trials", resampled}});
  return kExitOk;
}

int run_check(const std::string& instance_path, const std::string& policy_path) {
  const Instance inst = load_instance(instance_path);
  const json pj = read_json_file(policy_path);
  const OptimalPolicy policy = policy_from_json(pj);
  const auto& params = inst.params;
  if (policy.schedule.size() != params.M || policy.allocation.p_s.size() != params.N) {
    throw FormatError("policy dimensions do not match the instance");
  }

  const auto p1 = check_feasible_p1(params, inst.channel, policy.schedule, policy.allocation.p_s);
  const auto p2 = check_feasible_p2(params, inst.channel, policy.schedule, policy.allocation.p_s);
  const double recomputed = rate(params, inst.channel, policy.allocation.p_s);
  const double objective_error = std::abs(recomputed - policy.allocation.objective);
  bool pass = p1.feasible() && p2.feasible() && objective_error <= 1e-9 * std::max(1.0, std::abs(recomputed));

  std::cout << "p1 max violation " << p1.max_violation() << "\n";
  std::cout << "p2 max violation " << p2.max_violation() << "\n";
  std::cout << "objective " << policy.allocation.objective << " (recomputed " << recomputed << ")\n";
  if (pj.contains("duals")) {
    const DualSet ref = DualSet::zeros(params);
    const DualSet& d = policy.duals;
    if (d.lambda.size() != ref.lambda.size() || d.gamma.size() != ref.gamma.size() ||
        d.delta.size() != ref.delta.size() || d.mu.size() != ref.mu.size()) {
      throw FormatError("policy multipliers do not match the instance");
    }
    const KktReport kkt = kkt_check(params, inst.channel, policy.schedule, policy.allocation.p_s, d);
    std::cout << "kkt residual " << kkt.max_residual << " (" << (kkt.worst.empty() ? "-" : kkt.worst) << ")\n";
    pass = pass && kkt.max_residual <= PrimalOptions{}.kkt_accept;
  }
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitSolver;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Optimal offline harvest-or-transmit scheduling for an energy-harvesting underlay secondary user"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "RNG seed (initial GBD schedule, sweep channels)")
      ->each([&](const std::string&) { flags.seed_set = true; });
  app.add_option("--epsilon", flags.epsilon, "GBD gap tolerance")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { flags.epsilon_set = true; });
  app.add_option("--out-dir", flags.out_dir, "Output directory");
  app.add_option("--trials", flags.trials, "Monte-Carlo trials per grid point")->check(CLI::PositiveNumber);
  app.add_option("--init", flags.init, "Initial GBD schedule")->check(CLI::IsMember({"random", "zeros"}));

  std::string instance_path;
  std::string policy_path;
  std::string spec_path;
  auto* solve = app.add_subcommand("solve", "Solve one instance with generalized Benders decomposition");
  solve->add_option("instance", instance_path, "Instance JSON")->required();
  solve->fallthrough();
  auto* oracle = app.add_subcommand("oracle", "Solve one instance by enumerating every schedule");
  oracle->add_option("instance", instance_path, "Instance JSON")->required();
  oracle->fallthrough();
  auto* sweep = app.add_subcommand("sweep", "Run Monte-Carlo sweeps and write one CSV per sweep");
  sweep->add_option("spec", spec_path, "Sweep spec JSON")->required();
  sweep->fallthrough();
  auto* check = app.add_subcommand("check", "Audit a policy: feasibility, objective and KKT conditions");
  check->add_option("instance", instance_path, "Instance JSON")->required();
  check->add_option("policy", policy_path, "Policy JSON")->required();
  check->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve) return run_solve(flags, instance_path);
    if (*oracle) return run_oracle(flags, instance_path);
    if (*sweep) return run_sweep_cmd(flags, spec_path);
    if (*check) return run_check(instance_path, policy_path);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InstanceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitInput;
}

}  // namespace ehcr
