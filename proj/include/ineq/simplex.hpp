#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ineq/common.hpp"
#include "ineq/data.hpp"

namespace ineq {

enum class lp_status { optimal, infeasible, unbounded, iteration_limit };

struct lp_row {
  std::vector<double> a;
  relation rel = relation::le;
  double rhs = 0.0;
};

struct linear_program {
  int nvars = 0;
  bool maximize = false;
  std::vector<double> objective;
  std::vector<lp_row> rows;
  std::vector<double> lower;   // per-variable bounds, +-inf allowed
  std::vector<double> upper;

  static linear_program make(int n, bool maximize_ = false) {
    linear_program lp;
    lp.nvars = n;
    lp.maximize = maximize_;
    lp.objective.assign(n, 0.0);
    lp.lower.assign(n, -kInf);
    lp.upper.assign(n, kInf);
    return lp;
  }

  void add_row(std::vector<double> a, relation rel, double rhs) {
    rows.push_back(lp_row{std::move(a), rel, rhs});
  }
};

struct lp_solution {
  lp_status status = lp_status::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  // One multiplier per input row, oriented so that for a minimization
  // objective = sum_i dual_i * rhs_i + contributions from active bounds.
  std::vector<double> row_duals;
  double infeasibility = 0.0;
  std::vector<int> infeasible_rows;
};

namespace detail {

constexpr double kPivotEps = 1e-9;
constexpr double kFeasEps = 1e-7;

struct tableau {
  // T has m constraint rows plus one objective row; last column is the rhs.
  std::vector<std::vector<double>> t;
  std::vector<int> basis;          // basic column per constraint row
  std::size_t m = 0, ncols = 0;

  double& at(std::size_t i, std::size_t j) { return t[i][j]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double pv = t[pr][pc];
    for (double& v : t[pr]) v /= pv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == pr) continue;
      const double f = t[i][pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= ncols; ++j) t[i][j] -= f * t[pr][j];
    }
    basis[pr] = static_cast<int>(pc);
  }
};

// One simplex phase with Bland's rule. blocked[j] columns never enter.
inline lp_status run_phase(tableau& tb, const std::vector<char>& blocked, long long max_iters) {
  const std::size_t m = tb.m, ncols = tb.ncols, obj = m;
  for (long long it = 0; it < max_iters; ++it) {
    // Entering: smallest index with a negative reduced cost.
    std::size_t pc = ncols;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (blocked[j]) continue;
      if (tb.t[obj][j] < -kPivotEps) {
        pc = j;
        break;
      }
    }
    if (pc == ncols) return lp_status::optimal;

    // Leaving: minimum ratio, ties broken by smallest basic index.
    double best = kInf;
    std::size_t pr = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (tb.t[i][pc] > kPivotEps) {
        const double r = tb.t[i][ncols] / tb.t[i][pc];
        const double tol = 1e-12 * (1.0 + std::fabs(r));
        if (pr == m || r < best - tol ||
            (std::fabs(r - best) <= tol && tb.basis[i] < tb.basis[pr])) {
          best = r;
          pr = i;
        }
      }
    }
    if (pr == m) return lp_status::unbounded;
    tb.pivot(pr, pc);
  }
  return lp_status::iteration_limit;
}

}  // namespace detail

// Dense two-phase primal simplex. Bounded variables are shifted, mirrored or
// split so the working form is A x <= / = b, x >= 0; residual upper bounds
// become extra rows. Small dense problems only, which is all this library
// needs; Bland's rule keeps it cycle-free.
inline lp_solution solve_lp(const linear_program& lp) {
  using namespace detail;

  const int n = lp.nvars;
  std::vector<double> cost(lp.objective);
  if (lp.maximize)
    for (double& c : cost) c = -c;

  // Variable mapping: x_orig[j] = off[j] + sgn[j] * x'[col[j]]  (+ optional
  // second column for free variables, x = xp - xm).
  struct var_map {
    double off = 0.0;
    double sgn = 1.0;
    int col = -1;
    int col_neg = -1;
  };
  std::vector<var_map> vmap(n);
  int cols_struct = 0;
  double obj_const = 0.0;

  for (int j = 0; j < n; ++j) {
    const double lo = lp.lower.empty() ? -kInf : lp.lower[j];
    const double up = lp.upper.empty() ? kInf : lp.upper[j];
    if (std::isfinite(lo)) {
      vmap[j] = {lo, 1.0, cols_struct++, -1};
      obj_const += cost[j] * lo;
    } else if (std::isfinite(up)) {
      vmap[j] = {up, -1.0, cols_struct++, -1};
      obj_const += cost[j] * up;
    } else {
      vmap[j] = {0.0, 1.0, cols_struct, cols_struct + 1};
      cols_struct += 2;
    }
  }

  // Internal rows: originals first, then residual upper-bound rows.
  struct irow {
    std::vector<double> a;   // structural columns only
    relation rel;
    double rhs;
    int orig = -1;           // input row index, -1 for bound rows
    double dual_sign = 1.0;  // flips when the row is negated for rhs >= 0
  };
  std::vector<irow> rows;
  rows.reserve(lp.rows.size() + static_cast<std::size_t>(n));

  auto transform_row = [&](const std::vector<double>& a, relation rel, double rhs, int orig) {
    irow r;
    r.a.assign(cols_struct, 0.0);
    r.rel = rel;
    r.orig = orig;
    double b = rhs;
    for (int j = 0; j < n; ++j) {
      const double aj = a[j];
      if (aj == 0.0) continue;
      b -= aj * vmap[j].off;
      r.a[vmap[j].col] += aj * vmap[j].sgn;
      if (vmap[j].col_neg >= 0) r.a[vmap[j].col_neg] -= aj;
    }
    r.rhs = b;
    rows.push_back(std::move(r));
  };

  for (std::size_t i = 0; i < lp.rows.size(); ++i)
    transform_row(lp.rows[i].a, lp.rows[i].rel, lp.rows[i].rhs, static_cast<int>(i));

  for (int j = 0; j < n; ++j) {
    const double lo = lp.lower.empty() ? -kInf : lp.lower[j];
    const double up = lp.upper.empty() ? kInf : lp.upper[j];
    if (std::isfinite(lo) && std::isfinite(up)) {
      // x' <= up - lo
      irow r;
      r.a.assign(cols_struct, 0.0);
      r.a[vmap[j].col] = 1.0;
      r.rel = relation::le;
      r.rhs = up - lo;
      rows.push_back(std::move(r));
    }
  }

  // Normalize right-hand sides to be nonnegative.
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      for (double& v : r.a) v = -v;
      r.rhs = -r.rhs;
      r.dual_sign = -1.0;
      if (r.rel == relation::le)
        r.rel = relation::ge;
      else if (r.rel == relation::ge)
        r.rel = relation::le;
    }
  }

  const std::size_t m = rows.size();
  std::size_t ncols = static_cast<std::size_t>(cols_struct);
  std::vector<int> slack_col(m, -1), art_col(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].rel == relation::le)
      slack_col[i] = static_cast<int>(ncols++);
    else if (rows[i].rel == relation::ge) {
      slack_col[i] = static_cast<int>(ncols++);  // surplus, coefficient -1
      art_col[i] = static_cast<int>(ncols++);
    } else {
      art_col[i] = static_cast<int>(ncols++);
    }
  }

  tableau tb;
  tb.m = m;
  tb.ncols = ncols;
  tb.t.assign(m + 1, std::vector<double>(ncols + 1, 0.0));
  tb.basis.assign(m, -1);

  for (std::size_t i = 0; i < m; ++i) {
    for (int j = 0; j < cols_struct; ++j) tb.t[i][j] = rows[i].a[j];
    if (slack_col[i] >= 0)
      tb.t[i][slack_col[i]] = rows[i].rel == relation::ge ? -1.0 : 1.0;
    if (art_col[i] >= 0) tb.t[i][art_col[i]] = 1.0;
    tb.t[i][ncols] = rows[i].rhs;
    tb.basis[i] = art_col[i] >= 0 ? art_col[i] : slack_col[i];
  }

  std::vector<char> is_artificial(ncols, 0);
  for (std::size_t i = 0; i < m; ++i)
    if (art_col[i] >= 0) is_artificial[art_col[i]] = 1;

  const long long max_iters = 2000 + 200ll * static_cast<long long>(m + ncols);
  lp_solution sol;

  // Phase one: minimize the sum of artificials.
  bool need_phase1 = false;
  for (std::size_t i = 0; i < m; ++i)
    if (art_col[i] >= 0) need_phase1 = true;

  if (need_phase1) {
    auto& obj = tb.t[m];
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t j = 0; j < ncols; ++j)
      if (is_artificial[j]) obj[j] = 1.0;
    for (std::size_t i = 0; i < m; ++i)
      if (art_col[i] >= 0)
        for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= tb.t[i][j];

    std::vector<char> blocked(ncols, 0);
    const lp_status st = run_phase(tb, blocked, max_iters);
    if (st == lp_status::iteration_limit) {
      sol.status = lp_status::iteration_limit;
      return sol;
    }
    const double infeas = -tb.t[m][ncols];
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::fabs(rows[i].rhs));
    if (infeas > kFeasEps * scale) {
      sol.status = lp_status::infeasible;
      sol.infeasibility = infeas;
      for (std::size_t i = 0; i < m; ++i)
        if (is_artificial[tb.basis[i]] && tb.t[i][ncols] > kFeasEps * scale && rows[i].orig >= 0)
          sol.infeasible_rows.push_back(rows[i].orig);
      return sol;
    }
    // Kick surviving artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[tb.basis[i]]) continue;
      std::size_t pc = ncols;
      for (std::size_t j = 0; j < ncols && pc == ncols; ++j)
        if (!is_artificial[j] && std::fabs(tb.t[i][j]) > kPivotEps) pc = j;
      if (pc < ncols) tb.pivot(i, pc);
      // Otherwise the row is redundant; the artificial stays basic at zero.
    }
  }

  // Phase two objective row.
  {
    auto& obj = tb.t[m];
    std::fill(obj.begin(), obj.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      obj[vmap[j].col] += cost[j] * vmap[j].sgn;
      if (vmap[j].col_neg >= 0) obj[vmap[j].col_neg] -= cost[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      const int b = tb.basis[i];
      const double cb = obj[b];
      if (cb != 0.0)
        for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= cb * tb.t[i][j];
    }
  }

  {
    std::vector<char> blocked(is_artificial.begin(), is_artificial.end());
    const lp_status st = run_phase(tb, blocked, max_iters);
    if (st != lp_status::optimal) {
      sol.status = st;
      return sol;
    }
  }

  // Recover the structural solution.
  std::vector<double> xs(ncols, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (tb.basis[i] >= 0) xs[tb.basis[i]] = tb.t[i][ncols];

  sol.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double v = vmap[j].off + vmap[j].sgn * xs[vmap[j].col];
    if (vmap[j].col_neg >= 0) v -= xs[vmap[j].col_neg];
    sol.x[j] = v;
  }

  // The tableau's objective cell carries -(c' x') for the transformed problem.
  const double objective = obj_const - tb.t[m][ncols];
  sol.objective = lp.maximize ? -objective : objective;

  // Duals read from the initial identity column of each row: the reduced cost
  // there equals -y_i.
  sol.row_duals.assign(lp.rows.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].orig < 0) continue;
    double y;
    if (art_col[i] >= 0)
      y = -tb.t[m][art_col[i]];
    else
      y = -tb.t[m][slack_col[i]];
    y *= rows[i].dual_sign;
    if (lp.maximize) y = -y;
    sol.row_duals[rows[i].orig] = y;
  }

  sol.status = lp_status::optimal;
  return sol;
}

// Convenience: a pure feasibility check (zero objective).
inline lp_solution lp_feasible(linear_program lp) {
  std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
  return solve_lp(lp);
}

}  // namespace ineq
