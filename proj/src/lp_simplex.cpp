#include "rinp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rinp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration-limit";
    case SolveStatus::node_limit: return "node-limit";
  }
  return "?";
}

int LinearProgram::add_var(const std::string& name, double lb, double ub,
                           bool integer) {
  if (lb > ub) throw std::invalid_argument("variable " + name + ": lb > ub");
  int idx = static_cast<int>(vars.size());
  vars.push_back({lb, ub, integer, name});
  obj.push_back(0.0);
  if (!name.empty()) var_index_.emplace(name, idx);
  return idx;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> coef,
                           Relation rel, double rhs, const std::string& name) {
  for (auto& [j, v] : coef)
    if (j < 0 || j >= static_cast<int>(vars.size()))
      throw std::invalid_argument("row references missing variable");
  // canonical form: ascending indices, duplicates merged, zeros dropped;
  // downstream sparse algebra assumes one entry per variable
  std::sort(coef.begin(), coef.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < coef.size();) {
    int j = coef[i].first;
    double v = 0.0;
    while (i < coef.size() && coef[i].first == j) v += coef[i++].second;
    if (v != 0.0) coef[out++] = {j, v};
  }
  coef.resize(out);
  rows.push_back({std::move(coef), rel, rhs, name});
  return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::set_obj(int var, double coeff) { obj[var] = coeff; }
void LinearProgram::add_obj(int var, double coeff) { obj[var] += coeff; }

int LinearProgram::find_var(const std::string& name) const {
  auto it = var_index_.find(name);
  return it == var_index_.end() ? -1 : it->second;
}

bool LinearProgram::has_integers() const {
  for (const auto& v : vars)
    if (v.integer) return true;
  return false;
}

namespace {

// raised when accumulated basis-inverse update error leaves the recorded
// basis numerically singular; the solve is retried with tighter numerics
struct singular_basis_error : std::runtime_error {
  singular_basis_error()
      : std::runtime_error("simplex: singular basis during refactorization") {}
};

enum NonbasicState : int8_t { kAtLower = 0, kAtUpper = 1, kFree = 2, kBasic = 3 };

// Bounded-variable revised simplex over an explicit dense basis inverse.
// Columns: [0,n) structural, [n,n+m) slack, [n+m,n+2m) artificial.
struct Simplex {
  int m = 0, ncols = 0, nstruct = 0;
  std::vector<std::vector<std::pair<int, double>>> cols;  // sparse columns
  std::vector<double> lower, upper, cost, x, b;
  std::vector<int> basis;                 // column in basis at each row
  std::vector<int8_t> state;              // NonbasicState per column
  std::vector<double> binv;               // m*m row-major
  long iterations = 0;
  long iteration_cap = 0;
  long refactor_period = 500;
  int stall_limit = 300;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-10;

  double& bi(int r, int c) { return binv[static_cast<size_t>(r) * m + c]; }

  std::vector<double> basic_inverse_times(
      const std::vector<std::pair<int, double>>& col) const {
    std::vector<double> w(m, 0.0);
    for (int r = 0; r < m; ++r) {
      const double* row = &binv[static_cast<size_t>(r) * m];
      double s = 0.0;
      for (auto [k, v] : col) s += v * row[k];
      w[r] = s;
    }
    return w;
  }

  // y^T = c_B^T B^-1
  std::vector<double> row_prices() const {
    std::vector<double> y(m, 0.0);
    for (int r = 0; r < m; ++r) {
      double cb = cost[basis[r]];
      if (cb == 0.0) continue;
      const double* row = &binv[static_cast<size_t>(r) * m];
      for (int k = 0; k < m; ++k) y[k] += cb * row[k];
    }
    return y;
  }

  double reduced_cost(int j, const std::vector<double>& y) const {
    double d = cost[j];
    for (auto [r, v] : cols[j]) d -= y[r] * v;
    return d;
  }

  void recompute_basics() {
    // x_B = B^-1 (b - N x_N)
    std::vector<double> rhs = b;
    for (int j = 0; j < ncols; ++j) {
      if (state[j] == kBasic || x[j] == 0.0) continue;
      for (auto [r, v] : cols[j]) rhs[r] -= v * x[j];
    }
    for (int r = 0; r < m; ++r) {
      const double* row = &binv[static_cast<size_t>(r) * m];
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += row[k] * rhs[k];
      x[basis[r]] = s;
    }
  }

  void refactorize() {
    // dense Gauss-Jordan inverse of the basis matrix
    std::vector<double> mat(static_cast<size_t>(m) * m, 0.0);
    for (int r = 0; r < m; ++r)
      for (auto [row, v] : cols[basis[r]]) mat[static_cast<size_t>(row) * m + r] = v;
    std::vector<double> inv(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) inv[static_cast<size_t>(i) * m + i] = 1.0;
    for (int c = 0; c < m; ++c) {
      int piv = -1;
      double best = 0.0;
      for (int r = c; r < m; ++r) {
        double a = std::fabs(mat[static_cast<size_t>(r) * m + c]);
        if (a > best) { best = a; piv = r; }
      }
      if (piv < 0 || best < 1e-12) throw singular_basis_error();
      if (piv != c) {
        for (int k = 0; k < m; ++k) {
          std::swap(mat[static_cast<size_t>(piv) * m + k], mat[static_cast<size_t>(c) * m + k]);
          std::swap(inv[static_cast<size_t>(piv) * m + k], inv[static_cast<size_t>(c) * m + k]);
        }
      }
      double p = mat[static_cast<size_t>(c) * m + c];
      for (int k = 0; k < m; ++k) {
        mat[static_cast<size_t>(c) * m + k] /= p;
        inv[static_cast<size_t>(c) * m + k] /= p;
      }
      for (int r = 0; r < m; ++r) {
        if (r == c) continue;
        double f = mat[static_cast<size_t>(r) * m + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m; ++k) {
          mat[static_cast<size_t>(r) * m + k] -= f * mat[static_cast<size_t>(c) * m + k];
          inv[static_cast<size_t>(r) * m + k] -= f * inv[static_cast<size_t>(c) * m + k];
        }
      }
    }
    binv = std::move(inv);
    recompute_basics();
  }

  double objective() const {
    double s = 0.0;
    for (int j = 0; j < ncols; ++j)
      if (x[j] != 0.0) s += cost[j] * x[j];
    return s;
  }

  // returns optimal|unbounded|iteration_limit for the current cost vector
  SolveStatus run() {
    int degenerate_streak = 0;
    bool bland = false;
    long since_refactor = 0;
    while (true) {
      if (iterations >= iteration_cap) return SolveStatus::iteration_limit;
      ++iterations;
      if (++since_refactor >= refactor_period) {
        refactorize();
        since_refactor = 0;
      }

      std::vector<double> y = row_prices();
      int enter = -1;
      double best_violation = opt_tol;
      int direction = 0;
      for (int j = 0; j < ncols; ++j) {
        int8_t st = state[j];
        if (st == kBasic) continue;
        if (lower[j] == upper[j]) continue;  // fixed, cannot move
        double d = reduced_cost(j, y);
        double viol = 0.0;
        int dir = 0;
        if (st == kAtLower || st == kFree) {
          if (d < -opt_tol) { viol = -d; dir = +1; }
        }
        if (dir == 0 && (st == kAtUpper || st == kFree)) {
          if (d > opt_tol) { viol = d; dir = -1; }
        }
        if (dir == 0) continue;
        if (bland) { enter = j; direction = dir; break; }
        if (viol > best_violation) {
          best_violation = viol;
          enter = j;
          direction = dir;
        }
      }
      if (enter < 0) return SolveStatus::optimal;

      std::vector<double> w = basic_inverse_times(cols[enter]);

      // ratio test: how far can the entering variable move
      double limit = kInfRatio;
      if (std::isfinite(upper[enter]) && std::isfinite(lower[enter]))
        limit = upper[enter] - lower[enter];  // bound flip distance
      int leave_row = -1;
      double leave_ratio = limit;
      for (int r = 0; r < m; ++r) {
        double wr = w[r] * direction;
        if (std::fabs(wr) < pivot_tol) continue;
        int jb = basis[r];
        double ratio;
        if (wr > 0) {
          if (!std::isfinite(lower[jb])) continue;
          ratio = (x[jb] - lower[jb]) / wr;
        } else {
          if (!std::isfinite(upper[jb])) continue;
          ratio = (x[jb] - upper[jb]) / wr;
        }
        if (ratio < -1e-9) ratio = 0.0;  // tolerate slight bound drift
        if (ratio < leave_ratio - 1e-10) {
          leave_ratio = ratio;
          leave_row = r;
        } else if (leave_row >= 0 && ratio <= leave_ratio + 1e-10) {
          // tie window: prefer the numerically larger pivot; under Bland's
          // rule prefer the smallest basis column for anti-cycling
          if (bland) {
            if (basis[r] < basis[leave_row]) leave_row = r;
          } else if (std::fabs(w[r]) > std::fabs(w[leave_row])) {
            leave_row = r;
          }
        }
      }

      if (leave_row < 0 && !(leave_ratio < kInfRatio)) return SolveStatus::unbounded;

      double t = std::max(0.0, leave_ratio);
      bool degenerate = t <= 1e-12;
      if (degenerate) {
        if (++degenerate_streak > stall_limit) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }

      // move basics
      if (t != 0.0)
        for (int r = 0; r < m; ++r)
          if (w[r] != 0.0) x[basis[r]] -= direction * t * w[r];

      if (leave_row < 0) {
        // bound flip
        x[enter] = direction > 0 ? upper[enter] : lower[enter];
        state[enter] = direction > 0 ? kAtUpper : kAtLower;
        continue;
      }

      int leave = basis[leave_row];
      double wr = w[leave_row] * direction;
      x[enter] = (state[enter] == kAtUpper ? upper[enter]
                  : state[enter] == kAtLower ? lower[enter] : 0.0) +
                 direction * t;
      x[leave] = wr > 0 ? lower[leave] : upper[leave];
      state[leave] = wr > 0 ? kAtLower : kAtUpper;
      state[enter] = kBasic;
      basis[leave_row] = enter;

      // B^-1 update: divide pivot row, eliminate elsewhere
      double piv = w[leave_row];
      double* prow = &binv[static_cast<size_t>(leave_row) * m];
      for (int k = 0; k < m; ++k) prow[k] /= piv;
      for (int r = 0; r < m; ++r) {
        if (r == leave_row || w[r] == 0.0) continue;
        double f = w[r];
        double* row = &binv[static_cast<size_t>(r) * m];
        for (int k = 0; k < m; ++k) row[k] -= f * prow[k];
      }
    }
  }

  static constexpr double kInfRatio = std::numeric_limits<double>::infinity();
};

// one full two-phase solve; throws singular_basis_error on numerical breakdown
LpSolution run_two_phase(const LinearProgram& lp, const std::vector<double>& lb,
                         const std::vector<double>& ub, const SolveOptions& opt,
                         long refactor_period, double pivot_tol) {
  const int n = static_cast<int>(lp.vars.size());
  const int m = static_cast<int>(lp.rows.size());
  const bool maximize = lp.sense == ObjSense::maximize;

  LpSolution sol;
  sol.x.assign(n, 0.0);
  sol.duals.assign(m, 0.0);
  sol.reduced_costs.assign(n, 0.0);

  Simplex s;
  s.m = m;
  s.nstruct = n;
  s.ncols = n + 2 * m;
  s.opt_tol = opt.opt_tol;
  s.stall_limit = opt.stall_limit;
  s.iteration_cap = opt.max_iterations;
  s.refactor_period = refactor_period;
  s.pivot_tol = pivot_tol;
  s.cols.assign(s.ncols, {});
  s.lower.assign(s.ncols, 0.0);
  s.upper.assign(s.ncols, 0.0);
  s.cost.assign(s.ncols, 0.0);
  s.x.assign(s.ncols, 0.0);
  s.b.assign(m, 0.0);
  s.state.assign(s.ncols, kAtLower);

  for (int j = 0; j < n; ++j) {
    s.lower[j] = lb[j];
    s.upper[j] = ub[j];
  }
  for (int i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    s.b[i] = row.rhs;
    for (auto [j, v] : row.coef)
      if (v != 0.0) s.cols[j].push_back({i, v});
    int sj = n + i;
    s.cols[sj] = {{i, 1.0}};
    switch (row.rel) {
      case Relation::le: s.lower[sj] = 0.0; s.upper[sj] = Simplex::kInfRatio; break;
      case Relation::ge: s.lower[sj] = -Simplex::kInfRatio; s.upper[sj] = 0.0; break;
      case Relation::eq: s.lower[sj] = 0.0; s.upper[sj] = 0.0; break;
    }
  }

  // nonbasic start for structurals and slacks
  double bscale = 1.0;
  for (int i = 0; i < m; ++i) bscale = std::max(bscale, std::fabs(s.b[i]));
  for (int j = 0; j < n + m; ++j) {
    if (std::isfinite(s.lower[j])) {
      s.x[j] = s.lower[j];
      s.state[j] = kAtLower;
    } else if (std::isfinite(s.upper[j])) {
      s.x[j] = s.upper[j];
      s.state[j] = kAtUpper;
    } else {
      s.x[j] = 0.0;
      s.state[j] = kFree;
    }
  }

  // artificial basis absorbing the start residual
  std::vector<double> resid = s.b;
  for (int j = 0; j < n + m; ++j)
    if (s.x[j] != 0.0)
      for (auto [r, v] : s.cols[j]) resid[r] -= v * s.x[j];
  s.basis.resize(m);
  s.binv.assign(static_cast<size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    int aj = n + m + i;
    double sgn = resid[i] >= 0 ? 1.0 : -1.0;
    s.cols[aj] = {{i, sgn}};
    s.lower[aj] = 0.0;
    s.upper[aj] = Simplex::kInfRatio;
    s.cost[aj] = 0.0;
    s.x[aj] = std::fabs(resid[i]);
    s.state[aj] = kBasic;
    s.basis[i] = aj;
    s.bi(i, i) = sgn;
  }

  // phase 1: minimize total artificial mass
  for (int i = 0; i < m; ++i) s.cost[n + m + i] = 1.0;
  SolveStatus st = s.run();
  sol.iterations = s.iterations;
  if (st == SolveStatus::iteration_limit) {
    sol.status = st;
    return sol;
  }
  double infeas = 0.0;
  for (int i = 0; i < m; ++i) infeas += s.x[n + m + i];
  if (infeas > 1e-7 * bscale) {
    sol.status = SolveStatus::infeasible;
    return sol;
  }

  // pin artificials at zero; pivot basic ones out where the row allows
  for (int i = 0; i < m; ++i) {
    int aj = n + m + i;
    s.cost[aj] = 0.0;
    s.lower[aj] = s.upper[aj] = 0.0;
    if (s.state[aj] != kBasic) { s.x[aj] = 0.0; s.state[aj] = kAtLower; }
  }
  for (int r = 0; r < m; ++r) {
    if (s.basis[r] < n + m) continue;
    const double* brow = &s.binv[static_cast<size_t>(r) * m];
    int repl = -1;
    double best = 1e-7;
    for (int j = 0; j < n + m; ++j) {
      if (s.state[j] == kBasic) continue;
      double a = 0.0;
      for (auto [k, v] : s.cols[j]) a += v * brow[k];
      if (std::fabs(a) > best) { best = std::fabs(a); repl = j; }
    }
    if (repl < 0) continue;  // dependent row; artificial stays fixed at 0
    std::vector<double> w = s.basic_inverse_times(s.cols[repl]);
    int old = s.basis[r];
    s.basis[r] = repl;
    s.state[repl] = kBasic;
    s.state[old] = kAtLower;
    s.x[old] = 0.0;
    double piv = w[r];
    double* prow = &s.binv[static_cast<size_t>(r) * m];
    for (int k = 0; k < m; ++k) prow[k] /= piv;
    for (int rr = 0; rr < m; ++rr) {
      if (rr == r || w[rr] == 0.0) continue;
      double f = w[rr];
      double* row = &s.binv[static_cast<size_t>(rr) * m];
      for (int k = 0; k < m; ++k) row[k] -= f * prow[k];
    }
    s.recompute_basics();
  }

  // phase 2
  for (int j = 0; j < n; ++j) s.cost[j] = maximize ? -lp.obj[j] : lp.obj[j];
  st = s.run();
  sol.iterations = s.iterations;
  if (st == SolveStatus::iteration_limit || st == SolveStatus::unbounded) {
    sol.status = st;
    return sol;
  }

  s.refactorize();  // tighten values before reporting
  sol.status = SolveStatus::optimal;
  double obj = 0.0;
  for (int j = 0; j < n; ++j) {
    sol.x[j] = s.x[j];
    obj += lp.obj[j] * s.x[j];
  }
  sol.objective = obj;
  std::vector<double> y = s.row_prices();
  for (int i = 0; i < m; ++i) sol.duals[i] = maximize ? -y[i] : y[i];
  for (int j = 0; j < n; ++j) {
    double d = s.reduced_cost(j, y);
    sol.reduced_costs[j] = maximize ? -d : d;
  }
  return sol;
}

}  // namespace

LpSolution solve_lp_bounded(const LinearProgram& lp,
                            const std::vector<double>& lb,
                            const std::vector<double>& ub,
                            const SolveOptions& opt) {
  const int n = static_cast<int>(lp.vars.size());

  LpSolution sol;
  sol.x.assign(n, 0.0);
  sol.duals.assign(lp.rows.size(), 0.0);
  sol.reduced_costs.assign(n, 0.0);

  for (int j = 0; j < n; ++j)
    if (lb[j] > ub[j] + 1e-12) {
      sol.status = SolveStatus::infeasible;
      return sol;
    }

  // a singular refactorization means update drift corrupted the basis, not
  // that the model is bad (the start basis is the identity); retry from
  // scratch with more frequent refactorization and a coarser pivot filter so
  // the pivot path that caused the drift is not repeated
  const struct {
    long period;
    double pivtol;
  } plans[] = {{500, 1e-10}, {100, 1e-9}, {25, 1e-8}};
  for (const auto& plan : plans) {
    try {
      return run_two_phase(lp, lb, ub, opt, plan.period, plan.pivtol);
    } catch (const singular_basis_error&) {
    }
  }
  sol.status = SolveStatus::iteration_limit;
  return sol;
}

LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& opt) {
  std::vector<double> lb(lp.vars.size()), ub(lp.vars.size());
  for (size_t j = 0; j < lp.vars.size(); ++j) {
    lb[j] = lp.vars[j].lb;
    ub[j] = lp.vars[j].ub;
  }
  return solve_lp_bounded(lp, lb, ub, opt);
}

}  // namespace rinp
