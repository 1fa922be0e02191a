#include "ehcr/master_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <sstream>

namespace ehcr {

double BendersCut::evaluate(const Schedule& sched) const {
  if (sched.size() != c.size()) throw UsageError("cut and schedule sizes differ");
  double v = c0;
  for (std::size_t i = 0; i < c.size(); ++i) v += c[i] * sched[i];
  return v;
}

BendersCut build_cut(const ScenarioParams& params, const ChannelRealization& chan, const PrimalSolution& sol) {
  const std::size_t M = params.M;
  const std::size_t N = params.N;
  const auto& p = sol.allocation.p_s;
  const auto& d = sol.duals;
  const double gate = params.harvest_gate_bound();
  const double per_harvest = params.alpha * params.p_p;

  std::vector<double> prefix(N + 1, 0.0);
  for (std::size_t i = 0; i < N; ++i) prefix[i + 1] = prefix[i] + p[i];

  // Lagrangian terms in nats with every harvest indicator set to zero.
  double base = 0.0;
  if (M >= 1) base += d.theta * (params.E0 - p[0]);
  for (std::size_t i = 0; i < M; ++i) base += d.mu[i] * (params.P_int - chan.h_sp[i] * p[i]);
  for (std::size_t j = 0; j + 1 < M; ++j) {
    base += d.lambda[j] * (gate - p[j + 1]);
    base += d.gamma[j] * (params.E0 - prefix[j + 2]);
  }
  for (std::size_t j = 0; j < N - M; ++j) base += d.delta[j] * (params.E0 - prefix[M + j + 1]);

  double delta_sum = 0.0;
  for (double v : d.delta) delta_sum += v;
  std::vector<double> gamma_tail(d.gamma.size() + 1, 0.0);
  for (std::size_t k = d.gamma.size(); k-- > 0;) gamma_tail[k] = gamma_tail[k + 1] + d.gamma[k];

  BendersCut cut;
  cut.c.assign(M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    // gamma[k] guards slots 0..k+1 and credits harvests in slots 0..k.
    const double credited = per_harvest * (gamma_tail[i] + delta_sum);
    const double gated = i == 0 ? d.theta * params.E0 : d.lambda[i - 1] * gate;
    cut.c[i] = (credited - gated) / std::numbers::ln2;
  }
  cut.c0 = sol.allocation.objective + base / std::numbers::ln2;
  return cut;
}

double master_value(std::span<const BendersCut> cuts, const Schedule& sched) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& cut : cuts) v = std::min(v, cut.evaluate(sched));
  return std::max(0.0, v);
}

namespace {

void check_cuts(std::span<const BendersCut> cuts, std::size_t M) {
  if (cuts.empty()) throw UsageError("master problem needs at least one cut");
  for (const auto& cut : cuts) {
    if (cut.c.size() != M) throw UsageError("cut coefficient count differs from M");
  }
}

// Fixing state per indicator: -1 free, otherwise the fixed value.
using Fixing = std::vector<int>;

struct LpResult {
  double bound;             // max(0, LP optimum)
  std::vector<double> x;    // relaxed indicators (fixed ones included)
};

// max t  s.t.  t <= c0_k + c_k . x,  x in [0,1] on free indicators.
// Dense tableau simplex from the all-slack basis after shifting t by K so the
// origin is feasible.
class RelaxationLp {
 public:
  explicit RelaxationLp(std::span<const BendersCut> cuts) : cuts_(cuts) {}

  LpResult solve(const Fixing& fix) const {
    const std::size_t M = fix.size();
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < M; ++i) {
      if (fix[i] < 0) free.push_back(i);
    }
    const std::size_t nf = free.size();
    const std::size_t nc = cuts_.size();

    std::vector<double> b(nc);
    double shift = 0.0;
    for (std::size_t k = 0; k < nc; ++k) {
      double v = cuts_[k].c0;
      for (std::size_t i = 0; i < M; ++i) {
        if (fix[i] > 0) v += cuts_[k].c[i];
      }
      b[k] = v;
      shift = std::max(shift, -v);
    }

    LpResult out;
    out.x.assign(M, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
      if (fix[i] >= 0) out.x[i] = fix[i];
    }
    if (nf == 0) {
      out.bound = std::max(0.0, *std::min_element(b.begin(), b.end()));
      return out;
    }

    // Columns: t, x_free, cut slacks, bound slacks, rhs.
    const std::size_t rows = nc + nf;
    const std::size_t cols = 1 + nf + nc + nf;
    const std::size_t width = cols + 1;
    std::vector<double> tab((rows + 1) * width, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return tab[r * width + c]; };
    std::vector<std::size_t> basis(rows);
    for (std::size_t k = 0; k < nc; ++k) {
      at(k, 0) = 1.0;
      for (std::size_t j = 0; j < nf; ++j) at(k, 1 + j) = -cuts_[k].c[free[j]];
      at(k, 1 + nf + k) = 1.0;
      at(k, cols) = b[k] + shift;
      basis[k] = 1 + nf + k;
    }
    for (std::size_t j = 0; j < nf; ++j) {
      const std::size_t r = nc + j;
      at(r, 1 + j) = 1.0;
      at(r, 1 + nf + nc + j) = 1.0;
      at(r, cols) = 1.0;
      basis[r] = 1 + nf + nc + j;
    }
    at(rows, 0) = -1.0;  // objective row holds -c; optimal when all entries >= 0

    constexpr double kEps = 1e-11;
    int degenerate_run = 0;
    for (int iter = 0; iter < 10000; ++iter) {
      // Dantzig pricing, Bland's rule after a run of degenerate pivots.
      const bool bland = degenerate_run > 20;
      std::size_t enter = cols;
      double best = -kEps;
      for (std::size_t c = 0; c < cols; ++c) {
        const double rc = at(rows, c);
        if (rc < best) {
          enter = c;
          if (bland) break;
          best = rc;
        }
      }
      if (enter == cols) break;

      std::size_t leave = rows;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows; ++r) {
        const double a = at(r, enter);
        if (a <= kEps) continue;
        const double q = at(r, cols) / a;
        if (q < ratio - 1e-14 || (q <= ratio + 1e-14 && leave < rows && basis[r] < basis[leave])) {
          ratio = q;
          leave = r;
        }
      }
      if (leave == rows) break;  // unbounded cannot happen: t is capped by the cuts
      degenerate_run = ratio <= kEps ? degenerate_run + 1 : 0;

      const double piv = at(leave, enter);
      for (std::size_t c = 0; c <= cols; ++c) at(leave, c) /= piv;
      for (std::size_t r = 0; r <= rows; ++r) {
        if (r == leave) continue;
        const double f = at(r, enter);
        if (f == 0.0) continue;
        for (std::size_t c = 0; c <= cols; ++c) at(r, c) -= f * at(leave, c);
      }
      basis[leave] = enter;
    }

    double t_shifted = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double v = at(r, cols);
      if (basis[r] == 0) t_shifted = v;
      if (basis[r] >= 1 && basis[r] <= nf) out.x[free[basis[r] - 1]] = std::clamp(v, 0.0, 1.0);
    }
    out.bound = std::max(0.0, t_shifted - shift);
    return out;
  }

 private:
  std::span<const BendersCut> cuts_;
};

Schedule schedule_of(const std::vector<double>& x) {
  std::vector<int> bits(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) bits[i] = x[i] >= 0.5 ? 1 : 0;
  return Schedule(std::move(bits));
}

struct Node {
  Fixing fix;
  double parent_bound;
};

// Optimal master value by best-first/depth-first branch and bound.
double optimal_value(std::span<const BendersCut> cuts, std::size_t M, std::size_t& nodes) {
  const RelaxationLp lp(cuts);
  constexpr double kIntTol = 1e-9;
  constexpr double kPruneTol = 1e-12;
  constexpr std::size_t kSwitchToBestBound = 10000;

  double incumbent = -1.0;
  std::vector<Node> open;
  open.push_back({Fixing(M, -1), std::numeric_limits<double>::infinity()});
  bool best_first = false;
  auto heap_cmp = [](const Node& a, const Node& b) { return a.parent_bound < b.parent_bound; };

  while (!open.empty()) {
    Node node;
    if (best_first) {
      std::pop_heap(open.begin(), open.end(), heap_cmp);
    }
    node = std::move(open.back());
    open.pop_back();
    if (node.parent_bound <= incumbent + kPruneTol) continue;

    ++nodes;
    const LpResult res = lp.solve(node.fix);
    const double rounded = master_value(cuts, schedule_of(res.x));
    incumbent = std::max(incumbent, rounded);
    if (res.bound <= incumbent + kPruneTol) continue;

    std::size_t branch = M;
    double frac_best = kIntTol;
    for (std::size_t i = 0; i < M; ++i) {
      if (node.fix[i] >= 0) continue;
      const double frac = std::min(res.x[i], 1.0 - res.x[i]);
      if (frac > frac_best) {
        frac_best = frac;
        branch = i;
      }
    }
    if (branch == M) continue;  // integral relaxation: its rounding is already the incumbent

    for (int v : {1, 0}) {
      Node child{node.fix, res.bound};
      child.fix[branch] = v;
      open.push_back(std::move(child));
      if (best_first) std::push_heap(open.begin(), open.end(), heap_cmp);
    }
    if (!best_first && nodes >= kSwitchToBestBound) {
      best_first = true;
      std::make_heap(open.begin(), open.end(), heap_cmp);
    }
  }
  return std::max(incumbent, 0.0);
}

// Lexicographically smallest schedule whose value is within tolerance of the
// optimum, by ordered depth-first search with LP pruning.
std::optional<Schedule> smallest_optimal(const RelaxationLp& lp, std::span<const BendersCut> cuts, Fixing& fix,
                                         std::size_t depth, double threshold, std::size_t& nodes) {
  const std::size_t M = fix.size();
  ++nodes;
  if (depth == M) {
    Schedule s(std::vector<int>(fix.begin(), fix.end()));
    if (master_value(cuts, s) >= threshold) return s;
    return std::nullopt;
  }
  if (lp.solve(fix).bound < threshold) return std::nullopt;
  for (int v : {0, 1}) {
    fix[depth] = v;
    if (auto s = smallest_optimal(lp, cuts, fix, depth + 1, threshold, nodes)) return s;
  }
  fix[depth] = -1;
  return std::nullopt;
}

}  // namespace

MasterSolution solve_master(std::span<const BendersCut> cuts, std::size_t M) {
  check_cuts(cuts, M);
  MasterSolution sol;
  const double best = optimal_value(cuts, M, sol.node_count);
  const RelaxationLp lp(cuts);
  Fixing fix(M, -1);
  auto found = smallest_optimal(lp, cuts, fix, 0, best - kMasterTieTol, sol.node_count);
  // The schedule attaining `best` always passes the threshold.
  sol.schedule = found ? *found : Schedule::all_transmit(M);
  sol.t = master_value(cuts, sol.schedule);
  return sol;
}

MasterSolution solve_master_exhaustive(std::span<const BendersCut> cuts, std::size_t M) {
  check_cuts(cuts, M);
  if (M > 24) {
    std::ostringstream os;
    os << "exhaustive master limited to M <= 24, got " << M;
    throw CapacityError(os.str());
  }
  const unsigned long long count = 1ULL << M;
  double best = 0.0;
  for (unsigned long long code = 0; code < count; ++code) {
    best = std::max(best, master_value(cuts, Schedule::from_code(M, code)));
  }
  MasterSolution sol;
  for (unsigned long long code = 0; code < count; ++code) {
    Schedule s = Schedule::from_code(M, code);
    const double v = master_value(cuts, s);
    if (v >= best - kMasterTieTol) {
      sol.schedule = std::move(s);
      sol.t = v;
      break;
    }
  }
  sol.node_count = static_cast<std::size_t>(count);
  return sol;
}

}  // namespace ehcr
