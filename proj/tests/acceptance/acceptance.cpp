// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ehcr/baselines.hpp"
#include "ehcr/cli.hpp"
#include "ehcr/experiments.hpp"
#include "ehcr/gbd.hpp"
#include "ehcr/io.hpp"
#include "ehcr/master_solver.hpp"
#include "ehcr/primal_solver.hpp"
#include "oracles.hpp"

using namespace ehcr;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = EHCR_CONFIG_DIR;
int failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Case {
  ScenarioParams params;
  ChannelRealization chan;
  GbdResult gbd;
  OptimalPolicy best;
};

std::vector<Case> random_suite() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> m_dist(1, 7), tail(0, 4);
  std::uniform_int_distribution<int> pick2(0, 1), pick3(0, 2);
  std::uniform_int_distribution<std::uint64_t> seeds;
  const double e0s[] = {0.0, 2.0}, alphas[] = {0.3, 0.9}, caps[] = {0.01, 0.1, 1.0};
  std::vector<Case> suite;
  for (int k = 0; k < 200; ++k) {
    Case c;
    c.params.M = m_dist(rng);
    c.params.N = c.params.M + tail(rng);
    c.params.E0 = e0s[pick2(rng)];
    c.params.alpha = alphas[pick2(rng)];
    c.params.P_int = caps[pick3(rng)];
    c.chan = oracle::random_channel(rng, c.params);
    GbdOptions opt;
    opt.seed = seeds(rng);
    c.gbd = solve_gbd(c.params, c.chan, opt);
    c.best = exhaustive_policy_oracle(c.params, c.chan);
    suite.push_back(std::move(c));
  }
  return suite;
}

void oracle_equivalence(const std::vector<Case>& suite, double seconds) {
  int bad = 0;
  double worst = 0.0;
  for (const auto& c : suite) {
    const double ref = c.best.allocation.objective;
    const double err = std::abs(c.gbd.policy.allocation.objective - ref);
    worst = std::max(worst, err);
    if (err > std::max(1e-6, 1e-3 * ref)) ++bad;
  }
  report("oracle_equivalence", bad == 0 && seconds < 120.0,
         fmt("%d/%zu mismatches, worst abs error %.3g, %.1f s", bad, suite.size(), worst, seconds));
}

void kkt_audit(const std::vector<Case>& suite) {
  double worst_kkt = 0.0, worst_slack = 0.0;
  std::size_t solved = 0;
  for (const auto& c : suite) {
    for (std::uint64_t code = 0; code < (1ull << c.params.M); ++code) {
      const Schedule s = Schedule::from_code(c.params.M, code);
      const PrimalSolution sol = solve_primal(c.params, c.chan, s);
      worst_kkt = std::max(worst_kkt, kkt_check(c.params, c.chan, s, sol).max_residual);
      const auto p2 = check_feasible_p2(c.params, c.chan, s, sol.allocation.p_s);
      worst_slack = std::min(worst_slack, p2.min_slack());
      ++solved;
    }
  }
  report("kkt_audit", worst_kkt <= 1e-6 && worst_slack >= -1e-8,
         fmt("%zu primal solves, worst residual %.3g, min slack %.3g", solved, worst_kkt, worst_slack));
}

void bound_monotonicity(const std::vector<Case>& suite) {
  int bad = 0;
  for (const auto& c : suite) {
    if (!bound_history_check(c.gbd.trace).pass || c.gbd.trace.epsilon != 1e-4) ++bad;
  }
  report("bound_monotonicity", bad == 0, fmt("%d/%zu traces rejected", bad, suite.size()));
}

void cut_validity(const std::vector<Case>& suite) {
  double worst_over = 0.0, worst_tight = 0.0;
  std::size_t cuts = 0;
  for (const auto& c : suite) {
    if (c.params.M > 5) continue;
    std::vector<double> value(1ull << c.params.M);
    for (std::uint64_t code = 0; code < value.size(); ++code) {
      value[code] = solve_primal(c.params, c.chan, Schedule::from_code(c.params.M, code)).allocation.objective;
    }
    for (const auto& it : c.gbd.trace.iterations) {
      ++cuts;
      for (std::uint64_t code = 0; code < value.size(); ++code) {
        const double over = it.cut.evaluate(Schedule::from_code(c.params.M, code)) - value[code];
        worst_over = std::min(worst_over, over);
      }
      worst_tight = std::max(worst_tight, std::abs(it.cut.evaluate(it.schedule) - it.primal_objective));
    }
  }
  report("cut_validity", worst_over >= -1e-6 && worst_tight <= 1e-6,
         fmt("%zu cuts, worst overestimate %.3g, worst tightness %.3g", cuts, worst_over, worst_tight));
}

SweepSpec load_one(const std::string& file, std::size_t trials) {
  SweepSpec s = sweep_specs_from_json(read_json_file(kConfigs + "/" + file)).front();
  s.trials = trials;
  return s;
}

const SweepRow& row_at(const SweepResult& r, double x) {
  for (const auto& row : r.rows) {
    if (row.x_value == x) return row;
  }
  throw std::runtime_error("grid value missing");
}

void fig2_limits() {
  SweepSpec s = load_one("fig2.json", 200);
  s.grid = {1e-6, 10.0};
  const SweepResult r = run_sweep(s);
  const double low = row_at(r, 1e-6).mean_eh_slots, high = row_at(r, 10.0).mean_eh_slots;
  report("fig2_limits", low >= 5.9 && high <= 2.0,
         fmt("mean EH slots %.3f at P_int=1e-6 (need >= 5.9), %.3f at P_int=10 (need <= 2)", low, high));
}

int count_drops(const SweepResult& r) {
  int drops = 0;
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    const auto& a = r.rows[k - 1];
    const auto& b = r.rows[k];
    if (b.mean_rate_opt < a.mean_rate_opt - std::max(a.sem_rate_opt, b.sem_rate_opt)) ++drops;
  }
  return drops;
}

void fig3_fig5_monotonicity() {
  int drops = 0;
  std::string detail;
  for (double alpha : {0.3, 0.9}) {
    SweepSpec s;
    s.name = "rate_vs_interference";
    s.variable = SweepVariable::kInterference;
    s.grid = {0.01, 0.1, 1.0};
    s.trials = 500;
    s.seed = 1;
    s.base.M = 8;
    s.base.N = 10;
    s.base.E0 = 2.0;
    s.base.alpha = alpha;
    const SweepResult r = run_sweep(s);
    drops += count_drops(r);
    detail += fmt("P_int alpha=%.1f:", alpha);
    for (const auto& row : r.rows) detail += fmt(" %.3f", row.mean_rate_opt);
    detail += "; ";
  }
  for (const auto& s0 : sweep_specs_from_json(read_json_file(kConfigs + "/fig5.json"))) {
    SweepSpec s = s0;
    s.trials = 500;
    s.grid = {0.5, 1.0, 2.0, 4.0};
    const SweepResult r = run_sweep(s);
    drops += count_drops(r);
    detail += fmt("p_p P_int=%g:", s.base.P_int);
    for (const auto& row : r.rows) detail += fmt(" %.3f", row.mean_rate_opt);
    detail += "; ";
  }
  report("fig3_fig5_monotonicity", drops == 0, fmt("%d drops beyond 1 SE; ", drops) + detail);
}

void fig6_ordering() {
  SweepSpec s = load_one("fig6.json", 500);
  const SweepResult r = run_sweep(s);
  std::size_t strong = s.profiles.size(), weak = s.profiles.size();
  for (std::size_t k = 0; k < s.profiles.size(); ++k) {
    if (s.profiles[k].name == "strong_direct_weak_interference") strong = k;
    if (s.profiles[k].name == "weak_direct_strong_interference") weak = k;
  }
  if (strong == s.profiles.size() || weak == s.profiles.size()) {
    report("fig6_ordering", false, "profiles missing from configuration");
    return;
  }
  const auto& a = row_at(r, static_cast<double>(strong));
  const auto& b = row_at(r, static_cast<double>(weak));
  const double se = std::hypot(a.sem_rate_opt, b.sem_rate_opt);
  const double z = (a.mean_rate_opt - b.mean_rate_opt) / se;
  report("fig6_ordering", z >= 3.0,
         fmt("strong direct %.3f vs weak direct %.3f, difference %.1f standard errors", a.mean_rate_opt,
             b.mean_rate_opt, z));
}

void baseline_dominance() {
  SweepSpec s = load_one("fig4.json", 500);
  const SweepResult r = run_sweep(s);
  bool dominated = true;
  std::string detail = "gap by N:";
  for (const auto& row : r.rows) {
    dominated = dominated && row.mean_rate_opt >= row.mean_rate_greedy;
    detail += fmt(" %g:%.3f", row.x_value, row.mean_rate_opt - row.mean_rate_greedy);
  }
  const auto& n6 = row_at(r, 6.0);
  const auto& n14 = row_at(r, 14.0);
  const bool grows = n14.mean_rate_opt - n14.mean_rate_greedy > n6.mean_rate_opt - n6.mean_rate_greedy;
  report("baseline_dominance", dominated && grows, detail);
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ehcr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void determinism() {
  const fs::path root = fs::temp_directory_path() / "ehcr_acceptance_determinism";
  fs::remove_all(root);
  bool same = true;
  std::size_t compared = 0;
  std::ostringstream sink;
  auto* saved = std::cout.rdbuf(sink.rdbuf());
  for (const char* run : {"a", "b"}) {
    const std::string out = (root / run).string();
    same = same && run_cli({"sweep", kConfigs + "/fig2.json", "--trials", "40", "--seed", "11", "--out-dir", out + "/fig2"}) == 0;
    same = same && run_cli({"sweep", kConfigs + "/fig5.json", "--trials", "20", "--seed", "11", "--out-dir", out + "/fig5"}) == 0;
    same = same && run_cli({"solve", kConfigs + "/instance_small.json", "--seed", "11", "--out-dir", out + "/solve"}) == 0;
  }
  std::cout.rdbuf(saved);
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path twin = root / "b" / fs::relative(entry.path(), root / "a");
    same = same && fs::exists(twin) && slurp(entry.path()) == slurp(twin);
    ++compared;
  }
  fs::remove_all(root);
  report("determinism", same && compared >= 5, fmt("%zu CSV files compared across two runs", compared));
}

}  // namespace

int main() {
  try {
    const auto start = std::chrono::steady_clock::now();
    const auto suite = random_suite();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    oracle_equivalence(suite, seconds);
    kkt_audit(suite);
    bound_monotonicity(suite);
    cut_validity(suite);
  } catch (const std::exception& e) {
    report("random_suite", false, e.what());
  }
  for (auto* check : {fig2_limits, fig3_fig5_monotonicity, fig6_ordering, baseline_dominance, determinism}) {
    try {
      check();
    } catch (const std::exception& e) {
      report("exception", false, e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
