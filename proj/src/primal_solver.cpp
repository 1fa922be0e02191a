#include "ehcr/primal_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "constraint_rows.hpp"

namespace ehcr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

DualSet DualSet::zeros(const ScenarioParams& params) {
  const std::size_t inner = params.M > 0 ? params.M - 1 : 0;
  DualSet d;
  d.lambda.assign(inner, 0.0);
  d.gamma.assign(inner, 0.0);
  d.delta.assign(params.N - params.M, 0.0);
  d.mu.assign(params.M, 0.0);
  return d;
}

double& DualSet::at(ConstraintFamily family, std::size_t slot, std::size_t M) {
  switch (family) {
    case ConstraintFamily::kFirstSlotBudget: return theta;
    case ConstraintFamily::kHarvestGate: return lambda.at(slot - 1);
    case ConstraintFamily::kPrimaryBudget: return gamma.at(slot - 1);
    case ConstraintFamily::kTailBudget: return delta.at(slot - M);
    case ConstraintFamily::kInterference: return mu.at(slot);
    case ConstraintFamily::kNonnegative: break;
  }
  throw std::out_of_range("nonnegativity constraints carry no multiplier");
}

double DualSet::at(ConstraintFamily family, std::size_t slot, std::size_t M) const {
  return const_cast<DualSet&>(*this).at(family, slot, M);
}

double marginal_rate(const ScenarioParams& params, const ChannelRealization& chan, std::size_t slot, double p) {
  const double noise = slot < params.M ? params.sigma2 + chan.h_ps[slot] * params.p_p : params.sigma2;
  return chan.h_ss[slot] / (noise + chan.h_ss[slot] * p);
}

namespace {

using detail::Row;

// Dense view of the rows that still involve a free variable after presolve.
struct ReducedProblem {
  std::vector<std::size_t> free_slots;   // slot of each variable
  std::vector<double> gain;              // SINR gain per watt of each variable
  std::vector<std::size_t> row_index;    // index into the full row list
  MatrixXd G;                            // rows x variables
  VectorXd h;
};

struct Iterate {
  VectorXd x, s, z, znn;
};

// Log-barrier method: for increasing weight t, damped Newton minimizes
//   -t * F(x) - sum log(h - G x) - sum log(x)
// where F is the rate in nats. At each center the multipliers are the barrier
// weights z = 1 / (t s), so the duality gap is exactly (rows + vars) / t.
class BarrierMethod {
 public:
  explicit BarrierMethod(const ReducedProblem& rp) : rp_(rp), n_(static_cast<Eigen::Index>(rp.free_slots.size())) {}

  void start() {
    double rho = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < rp_.G.rows(); ++r) rho = std::min(rho, rp_.h[r] / rp_.G.row(r).sum());
    if (!std::isfinite(rho)) rho = 1.0;
    x_ = VectorXd::Constant(n_, 0.5 * rho);
    t_ = 1.0;
  }

  void increase_weight() { t_ *= kGrowth; }

  double gap() const { return static_cast<double>(rp_.G.rows() + n_) / t_; }

  Iterate iterate() const {
    Iterate it;
    it.x = x_;
    it.s = rp_.h - rp_.G * x_;
    it.z = (t_ * it.s).cwiseInverse();
    it.znn = (t_ * x_).cwiseInverse();
    return it;
  }

  // Damped Newton to the current center. Returns false on breakdown.
  bool center() {
    for (int newton = 0; newton < kNewtonCap; ++newton) {
      const VectorXd s = rp_.h - rp_.G * x_;
      const VectorXd inv_s = s.cwiseInverse();
      const VectorXd inv_x = x_.cwiseInverse();
      VectorXd grad(n_);
      VectorXd curv(n_);
      for (Eigen::Index i = 0; i < n_; ++i) {
        const double a = rp_.gain[static_cast<std::size_t>(i)];
        const double d = 1.0 + a * x_[i];
        grad[i] = -t_ * a / d;
        curv[i] = t_ * a * a / (d * d);
      }
      grad += rp_.G.transpose() * inv_s - inv_x;
      MatrixXd K = rp_.G.transpose() * inv_s.cwiseAbs2().asDiagonal() * rp_.G;
      K.diagonal() += curv + inv_x.cwiseAbs2();
      const Eigen::LLT<MatrixXd> llt(K);
      if (llt.info() != Eigen::Success) return false;
      const VectorXd dx = llt.solve(-grad);
      const double decrement = -grad.dot(dx);
      if (!std::isfinite(decrement)) return false;
      if (decrement <= 2.0 * kCentering) return true;

      // Largest step keeping x and s strictly positive, then Armijo backtracking.
      double step = 1.0;
      const VectorXd ds = -(rp_.G * dx);
      for (Eigen::Index i = 0; i < n_; ++i) {
        if (dx[i] < 0.0) step = std::min(step, -0.99 * x_[i] / dx[i]);
      }
      for (Eigen::Index r = 0; r < s.size(); ++r) {
        if (ds[r] < 0.0) step = std::min(step, -0.99 * s[r] / ds[r]);
      }
      if (decrement < kQuadratic && step == 1.0) {
        x_ += dx;
        continue;
      }
      const double phi0 = barrier(x_);
      while (step > 1e-16 && barrier(x_ + step * dx) > phi0 - 0.01 * step * decrement) step *= 0.5;
      if (step <= 1e-16) return true;  // cannot improve further at this precision
      x_ += step * dx;
    }
    return true;
  }

 private:
  static constexpr double kGrowth = 10.0;
  static constexpr double kCentering = 1e-10;
  static constexpr double kQuadratic = 1e-4;
  static constexpr int kNewtonCap = 100;

  double barrier(const VectorXd& x) const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (x[i] <= 0.0) return std::numeric_limits<double>::infinity();
      v -= t_ * std::log1p(rp_.gain[static_cast<std::size_t>(i)] * x[i]) + std::log(x[i]);
    }
    const VectorXd s = rp_.h - rp_.G * x;
    for (Eigen::Index r = 0; r < s.size(); ++r) {
      if (s[r] <= 0.0) return std::numeric_limits<double>::infinity();
      v -= std::log(s[r]);
    }
    return v;
  }

  const ReducedProblem& rp_;
  Eigen::Index n_;
  VectorXd x_;
  double t_ = 1.0;
};

// Lawson-Hanson nonnegative least squares: min |A u - b| subject to u >= 0.
VectorXd nnls(const MatrixXd& A, const VectorXd& b) {
  const Eigen::Index n = A.cols();
  VectorXd u = VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  auto solve_passive = [&] {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    const VectorXd zp = Ap.completeOrthogonalDecomposition().solve(b);
    VectorXd z = VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[static_cast<Eigen::Index>(k)];
    return z;
  };
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const VectorXd w = A.transpose() * (b - A * u);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > 1e-15 && (best < 0 || w[j] > w[best])) best = j;
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      const VectorXd z = solve_passive();
      double step = 1.0;
      bool all_positive = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          all_positive = false;
          step = std::min(step, u[j] / (u[j] - z[j]));
        }
      }
      if (all_positive) {
        u = z;
        break;
      }
      u += step * (z - u);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && u[j] <= 1e-300) {
          passive[static_cast<std::size_t>(j)] = false;
          u[j] = 0.0;
        }
      }
    }
  }
  return u;
}

struct Candidate {
  VectorXd x;       // per free variable
  VectorXd y;       // per reduced row
};

// Active-set finish: starting from the guess implied by the interior iterate,
// solve the equality-constrained KKT system by Newton's method, then repair
// the guess (release or fix a variable, add or drop a row) until the result
// is primal and dual feasible.
std::optional<Candidate> polish(const ReducedProblem& rp, const Iterate& it) {
  const auto n = static_cast<Eigen::Index>(rp.free_slots.size());
  const auto m = rp.G.rows();
  std::vector<bool> at_zero(static_cast<std::size_t>(n)), active(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < n; ++i) at_zero[static_cast<std::size_t>(i)] = it.x[i] < it.znn[i];
  for (Eigen::Index r = 0; r < m; ++r) active[static_cast<std::size_t>(r)] = it.s[r] < it.z[r];
  VectorXd x = it.x;
  VectorXd z = it.z;

  const int rounds = static_cast<int>(2 * (n + m)) + 5;
  for (int round = 0; round < rounds; ++round) {
    std::vector<Eigen::Index> vars;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!at_zero[static_cast<std::size_t>(i)]) vars.push_back(i);
    }
    const auto nf = static_cast<Eigen::Index>(vars.size());

    // Independent subset of the active rows, restricted to the nonzero variables.
    std::vector<Eigen::Index> rows;
    MatrixXd A(0, nf);
    for (Eigen::Index r = 0; r < m; ++r) {
      if (!active[static_cast<std::size_t>(r)]) continue;
      Eigen::RowVectorXd row(nf);
      for (Eigen::Index k = 0; k < nf; ++k) row[k] = rp.G(r, vars[static_cast<std::size_t>(k)]);
      if (row.isZero()) continue;
      MatrixXd trial(A.rows() + 1, nf);
      trial << A, row;
      Eigen::FullPivLU<MatrixXd> lu(trial);
      lu.setThreshold(1e-10);
      if (lu.rank() == trial.rows()) {
        A = std::move(trial);
        rows.push_back(r);
      }
    }
    const auto na = static_cast<Eigen::Index>(rows.size());

    VectorXd xf(nf), y(na), b(na);
    for (Eigen::Index k = 0; k < nf; ++k) xf[k] = std::max(x[vars[static_cast<std::size_t>(k)]], 0.0);
    for (Eigen::Index k = 0; k < na; ++k) {
      y[k] = z[rows[static_cast<std::size_t>(k)]];
      b[k] = rp.h[rows[static_cast<std::size_t>(k)]];
    }

    auto gain_of = [&](Eigen::Index k) {
      return rp.gain[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])];
    };
    auto residual = [&](VectorXd& e) {
      e.resize(nf + na);
      for (Eigen::Index k = 0; k < nf; ++k) e[k] = gain_of(k) / (1.0 + gain_of(k) * xf[k]);
      e.head(nf) -= A.transpose() * y;
      e.tail(na) = A * xf - b;
    };

    VectorXd e;
    residual(e);
    for (int iter = 0; iter < 50 && e.lpNorm<Eigen::Infinity>() > 1e-15; ++iter) {
      MatrixXd J = MatrixXd::Zero(nf + na, nf + na);
      for (Eigen::Index k = 0; k < nf; ++k) {
        const double d = 1.0 + gain_of(k) * xf[k];
        if (d <= 0.0) return std::nullopt;
        J(k, k) = -gain_of(k) * gain_of(k) / (d * d);
      }
      J.topRightCorner(nf, na) = -A.transpose();
      J.bottomLeftCorner(na, nf) = A;
      const VectorXd step = J.partialPivLu().solve(-e);
      if (!step.allFinite()) return std::nullopt;
      xf += step.head(nf);
      y += step.tail(na);
      const double before = e.lpNorm<Eigen::Infinity>();
      residual(e);
      if (e.lpNorm<Eigen::Infinity>() >= before && iter > 5) break;
    }
    if (!e.allFinite()) return std::nullopt;
    for (Eigen::Index k = 0; k < nf; ++k) x[vars[static_cast<std::size_t>(k)]] = xf[k];
    for (Eigen::Index k = 0; k < na; ++k) z[rows[static_cast<std::size_t>(k)]] = y[k];

    // Repair: most negative power goes to zero.
    Eigen::Index worst = -1;
    for (Eigen::Index k = 0; k < nf; ++k) {
      if (xf[k] < -1e-13 && (worst < 0 || xf[k] < xf[worst])) worst = k;
    }
    if (worst >= 0) {
      at_zero[static_cast<std::size_t>(vars[static_cast<std::size_t>(worst)])] = true;
      continue;
    }

    Candidate c{VectorXd::Zero(n), VectorXd::Zero(m)};
    for (Eigen::Index k = 0; k < nf; ++k) c.x[vars[static_cast<std::size_t>(k)]] = std::max(0.0, xf[k]);

    // Repair: most violated row becomes active.
    const VectorXd slack = rp.h - rp.G * c.x;
    Eigen::Index violated;
    if (slack.minCoeff(&violated) < -1e-12) {
      active[static_cast<std::size_t>(violated)] = true;
      continue;
    }

    // Repair: a row that wants a negative multiplier is released.
    worst = -1;
    for (Eigen::Index k = 0; k < na; ++k) {
      if (y[k] < -1e-12 && (worst < 0 || y[k] < y[worst])) worst = k;
    }
    if (worst >= 0) {
      active[static_cast<std::size_t>(rows[static_cast<std::size_t>(worst)])] = false;
      continue;
    }

    // Multipliers: nonnegative fit of stationarity over every tight row, with
    // zero variables allowed a nonnegative surplus.
    std::vector<Eigen::Index> tight;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (slack[r] <= 1e-10 * std::max(1.0, rp.h[r])) tight.push_back(r);
    }
    const auto nt = static_cast<Eigen::Index>(tight.size());
    std::vector<Eigen::Index> zeros;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (c.x[i] == 0.0) zeros.push_back(i);
    }
    MatrixXd S = MatrixXd::Zero(n, nt + static_cast<Eigen::Index>(zeros.size()));
    for (Eigen::Index k = 0; k < nt; ++k) S.col(k) = rp.G.row(tight[static_cast<std::size_t>(k)]).transpose();
    for (std::size_t k = 0; k < zeros.size(); ++k) S(zeros[k], nt + static_cast<Eigen::Index>(k)) = -1.0;
    VectorXd grad(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = rp.gain[static_cast<std::size_t>(i)];
      grad[i] = a / (1.0 + a * c.x[i]);
    }
    const VectorXd u = nnls(S, grad);
    for (Eigen::Index k = 0; k < nt; ++k) c.y[tight[static_cast<std::size_t>(k)]] = u[k];

    // Repair: a zero power whose marginal rate beats its price is released.
    const VectorXd cover = rp.G.transpose() * c.y;
    worst = -1;
    double excess = 1e-12;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (c.x[i] == 0.0 && grad[i] - cover[i] > excess) {
        excess = grad[i] - cover[i];
        worst = i;
      }
    }
    if (worst >= 0 && at_zero[static_cast<std::size_t>(worst)]) {
      at_zero[static_cast<std::size_t>(worst)] = false;
      x[worst] = 0.0;
      continue;
    }
    return c;
  }
  return std::nullopt;
}

Candidate clamp(const ReducedProblem& rp, const Iterate& it) {
  Candidate c{it.x, it.z};
  for (Eigen::Index i = 0; i < c.x.size(); ++i) {
    if (it.x[i] < it.znn[i]) c.x[i] = 0.0;
  }
  (void)rp;
  return c;
}

// Lifts a reduced candidate to a full solution and recovers the multipliers
// of rows and slots removed by presolve.
PrimalSolution assemble(const ScenarioParams& params, const ChannelRealization& chan, const Schedule& sched,
                        const std::vector<Row>& rows, const ReducedProblem& rp, const Candidate& c) {
  PrimalSolution sol;
  sol.allocation.p_s.assign(params.N, 0.0);
  sol.duals = DualSet::zeros(params);
  for (std::size_t k = 0; k < rp.free_slots.size(); ++k) {
    sol.allocation.p_s[rp.free_slots[k]] = c.x[static_cast<Eigen::Index>(k)];
  }
  for (std::size_t k = 0; k < rp.row_index.size(); ++k) {
    const Row& row = rows[rp.row_index[k]];
    sol.duals.at(row.family, row.slot, params.M) = c.y[static_cast<Eigen::Index>(k)];
  }

  std::vector<bool> is_free(params.N, false);
  for (auto s : rp.free_slots) is_free[s] = true;

  for (std::size_t i = params.N; i-- > 0;) {
    if (is_free[i]) continue;
    double cover = 0.0;
    for (const Row& row : rows) {
      if (row.covers(i)) cover += row.coef * sol.duals.at(row.family, row.slot, params.M);
    }
    const double deficit = marginal_rate(params, chan, i, 0.0) - cover;
    if (deficit <= 0.0) continue;

    // Prefer the slot's own zero bound, else the exhausted budget ending here.
    const Row* target = nullptr;
    for (const Row& row : rows) {
      if (row.first == i && row.last == i && row.coef > 0.0 && row.rhs <= 0.0) {
        target = &row;
        break;
      }
    }
    if (target == nullptr) {
      for (const Row& row : rows) {
        if (row.first == 0 && row.last == i && row.rhs <= 0.0 &&
            (row.family == ConstraintFamily::kPrimaryBudget || row.family == ConstraintFamily::kTailBudget)) {
          target = &row;
          break;
        }
      }
    }
    if (target != nullptr) sol.duals.at(target->family, target->slot, params.M) += deficit / target->coef;
  }

  sol.allocation.objective = rate(params, chan, sol.allocation.p_s);
  sol.kkt_residual = kkt_check(params, chan, sched, sol.allocation.p_s, sol.duals).max_residual;
  return sol;
}

}  // namespace

PrimalSolution solve_primal(const ScenarioParams& params, const ChannelRealization& chan, const Schedule& sched,
                            const PrimalOptions& options) {
  params.validate();
  chan.validate(params);
  if (sched.size() != params.M) throw InstanceError("schedule length must equal M");
  if (!(options.tol > 0.0)) throw InstanceError("primal tolerance must be positive");

  const std::vector<Row> rows = detail::build_rows(params, chan, sched);

  // Presolve: drop slots whose power is forced to zero.
  std::vector<bool> is_free(params.N);
  for (std::size_t i = 0; i < params.N; ++i) is_free[i] = chan.h_ss[i] > 0.0;
  for (const Row& row : rows) {
    if (row.coef > 0.0 && row.rhs <= 0.0) {
      for (std::size_t i = row.first; i <= row.last; ++i) is_free[i] = false;
    }
  }

  ReducedProblem rp;
  for (std::size_t i = 0; i < params.N; ++i) {
    if (!is_free[i]) continue;
    rp.free_slots.push_back(i);
    rp.gain.push_back(slot_gain(params, chan, i));
  }
  const std::size_t n = rp.free_slots.size();
  std::vector<std::size_t> var_of(params.N, n);
  for (std::size_t k = 0; k < n; ++k) var_of[rp.free_slots[k]] = k;

  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].coef <= 0.0) continue;
    bool touches = false;
    for (std::size_t i = rows[r].first; i <= rows[r].last; ++i) touches = touches || is_free[i];
    if (touches) rp.row_index.push_back(r);
  }
  const auto m = static_cast<Eigen::Index>(rp.row_index.size());
  rp.G = MatrixXd::Zero(m, static_cast<Eigen::Index>(n));
  rp.h.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Row& row = rows[rp.row_index[static_cast<std::size_t>(k)]];
    for (std::size_t i = row.first; i <= row.last; ++i) {
      if (is_free[i]) rp.G(k, static_cast<Eigen::Index>(var_of[i])) = row.coef;
    }
    rp.h[k] = row.rhs;
  }

  if (n == 0) {
    return assemble(params, chan, sched, rows, rp, Candidate{VectorXd::Zero(0), VectorXd::Zero(m)});
  }

  BarrierMethod ipm(rp);
  ipm.start();
  std::optional<PrimalSolution> best;
  auto consider = [&](PrimalSolution sol) {
    if (!best || sol.kkt_residual < best->kkt_residual) best = std::move(sol);
  };

  double target = options.tol;
  constexpr double kFloor = 1e-14;
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    const bool healthy = ipm.center();
    if (!healthy || ipm.gap() <= target || iter + 1 >= options.max_iter) {
      const Iterate it = ipm.iterate();
      if (auto c = polish(rp, it)) consider(assemble(params, chan, sched, rows, rp, *c));
      consider(assemble(params, chan, sched, rows, rp, clamp(rp, it)));
      best->iterations = iter + 1;
      if (best->kkt_residual <= options.kkt_accept * 1e-3 || !healthy || target <= kFloor) break;
      target = std::max(kFloor, target * 1e-2);
    }
    ipm.increase_weight();
  }

  if (!best) {
    consider(assemble(params, chan, sched, rows, rp, clamp(rp, ipm.iterate())));
    best->iterations = iter;
  }
  if (best->kkt_residual > options.kkt_accept) {
    std::ostringstream os;
    os << "primal solver stopped after " << iter << " iterations with KKT residual " << best->kkt_residual;
    throw PrimalConvergenceError(os.str(), *best);
  }
  return *best;
}

KktReport kkt_check(const ScenarioParams& params, const ChannelRealization& chan, const Schedule& sched,
                    std::span<const double> p_s, const DualSet& duals) {
  params.validate();
  chan.validate(params);
  const std::vector<Row> rows = detail::build_rows(params, chan, sched);
  KktReport report;
  auto note = [&](double v, auto&& label) {
    if (!(v <= report.max_residual)) {  // NaN always wins
      report.max_residual = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
      report.worst = label();
    }
  };
  if (p_s.size() != params.N) throw InstanceError("power vector must have N entries");

  std::vector<double> cover(params.N, 0.0);
  for (const Row& row : rows) {
    const double y = duals.at(row.family, row.slot, params.M);
    double lhs = 0.0;
    for (std::size_t i = row.first; i <= row.last; ++i) {
      lhs += row.coef * p_s[i];
      cover[i] += row.coef * y;
    }
    const double slack = row.rhs - lhs;
    auto label = [&](const char* what) {
      return [&row, what] {
        std::ostringstream os;
        os << to_string(row.family) << '[' << row.slot << "]: " << what;
        return os.str();
      };
    };
    note(-slack, label("primal"));
    note(-y, label("dual sign"));
    note(std::abs(y * slack), label("complementarity"));
  }
  for (std::size_t i = 0; i < params.N; ++i) {
    const double p = std::max(p_s[i], 0.0);
    const double r = marginal_rate(params, chan, i, p) - cover[i];
    auto label = [i](const char* what) {
      return [i, what] {
        std::ostringstream os;
        os << what << '[' << i << ']';
        return os.str();
      };
    };
    note(-p_s[i], label("nonnegative"));
    note(p_s[i] > 0.0 ? std::abs(r) : r, label("stationarity"));
  }
  return report;
}

std::vector<double> waterfill_from_duals(const ScenarioParams& params, const ChannelRealization& chan,
                                         const DualSet& duals) {
  params.validate();
  chan.validate(params);
  const std::size_t M = params.M;
  const std::size_t N = params.N;
  const DualSet ref = DualSet::zeros(params);
  if (duals.lambda.size() != ref.lambda.size() || duals.gamma.size() != ref.gamma.size() ||
      duals.delta.size() != ref.delta.size() || duals.mu.size() != ref.mu.size()) {
    throw InstanceError("dual set dimensions do not match the instance");
  }

  // Suffix sums: gamma_tail[k] = sum_{j >= k} gamma[j], delta likewise.
  std::vector<double> gamma_tail(duals.gamma.size() + 1, 0.0);
  for (std::size_t k = duals.gamma.size(); k-- > 0;) gamma_tail[k] = gamma_tail[k + 1] + duals.gamma[k];
  std::vector<double> delta_tail(duals.delta.size() + 1, 0.0);
  for (std::size_t k = duals.delta.size(); k-- > 0;) delta_tail[k] = delta_tail[k + 1] + duals.delta[k];

  std::vector<double> p(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    if (chan.h_ss[i] <= 0.0) continue;
    double level = 0.0;
    double floor = 0.0;
    if (i < M) {
      level = duals.mu[i] * chan.h_sp[i] + delta_tail[0];
      level += i == 0 ? duals.theta + gamma_tail[0] : duals.lambda[i - 1] + gamma_tail[i - 1];
      floor = (params.sigma2 + chan.h_ps[i] * params.p_p) / chan.h_ss[i];
    } else {
      level = delta_tail[i - M];
      floor = params.sigma2 / chan.h_ss[i];
    }
    if (!(level > 0.0)) {
      std::ostringstream os;
      os << "water level of slot " << i << " is unbounded (multiplier sum " << level << ")";
      throw UnboundedLevelError(os.str());
    }
    p[i] = std::max(0.0, 1.0 / level - floor);
  }
  return p;
}

}  // namespace ehcr
