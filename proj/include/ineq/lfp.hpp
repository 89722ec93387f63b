#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "ineq/common.hpp"
#include "ineq/simplex.hpp"

namespace ineq {

// Optimize r1'y / r2'y over a polyhedron given purely by rows (variable boxes
// must be encoded as rows; the homogenization rescales variables, so native
// bounds would not survive the transform).
struct linear_fractional_program {
  int nvars = 0;
  std::vector<double> r1;
  std::vector<double> r2;
  std::vector<lp_row> rows;
  std::vector<char> nonneg;   // optional per-variable y_i >= 0 hints

  void add_row(std::vector<double> a, relation rel, double rhs) {
    rows.push_back(lp_row{std::move(a), rel, rhs});
  }
};

struct lfp_solution {
  lp_status status = lp_status::infeasible;
  double value = 0.0;
  std::vector<double> y;
  double t = 0.0;
  std::vector<double> row_duals;
};

// Denominator guard: the ratio needs somewhere to stand. Numerator and
// denominator are both linear through the origin, so the ratio is constant
// along rays and points where r2'y merely touches zero cost nothing; the
// homogenized program cannot represent them anyway. What cannot be solved is
// a program whose denominator is nonpositive everywhere, so the guard asks
// for the best attainable denominator and refuses when even that is not
// positive. Solved as its own LP so infeasibility surfaces with a
// certificate before any ratio work starts.
inline double check_positive_denominator(const linear_fractional_program& p) {
  linear_program lp = linear_program::make(p.nvars, true);
  lp.objective = p.r2;
  lp.rows = p.rows;
  for (int j = 0; j < p.nvars; ++j)
    if (!p.nonneg.empty() && p.nonneg[j]) lp.lower[j] = 0.0;
  const lp_solution s = solve_lp(lp);
  if (s.status == lp_status::infeasible)
    throw infeasible_error("constraint system is infeasible", s.infeasible_rows, s.infeasibility);
  if (s.status == lp_status::unbounded) return kInf;
  if (s.status == lp_status::iteration_limit)
    throw numerical_error("denominator pre-check did not solve");
  if (!(s.objective > 0.0))
    throw degenerate_denominator_error("ratio denominator is nonpositive everywhere");
  return s.objective;
}

// Charnes-Cooper: substitute z = y/(r2'y), t = 1/(r2'y). Rows H y <= h become
// H z - h t <= 0, the denominator pins r2'z = 1, and t gets a small positive
// floor so the inverse map stays defined.
inline linear_program charnes_cooper(const linear_fractional_program& p, bool maximize) {
  const int n = p.nvars;
  linear_program lp = linear_program::make(n + 1, maximize);
  for (int j = 0; j < n; ++j) {
    lp.objective[j] = p.r1[j];
    if (!p.nonneg.empty() && p.nonneg[j]) lp.lower[j] = 0.0;
  }
  lp.lower[n] = kHomogFloor;

  for (const auto& row : p.rows) {
    std::vector<double> a(n + 1, 0.0);
    for (int j = 0; j < n; ++j) a[j] = row.a[j];
    a[n] = -row.rhs;
    lp.add_row(std::move(a), row.rel, 0.0);
  }
  std::vector<double> norm(n + 1, 0.0);
  for (int j = 0; j < n; ++j) norm[j] = p.r2[j];
  lp.add_row(std::move(norm), relation::eq, 1.0);
  return lp;
}

inline lfp_solution solve_lfp(const linear_fractional_program& p, bool maximize) {
  check_positive_denominator(p);
  const linear_program lp = charnes_cooper(p, maximize);
  const lp_solution s = solve_lp(lp);

  lfp_solution out;
  out.status = s.status;
  if (s.status != lp_status::optimal) {
    if (s.status == lp_status::infeasible)
      throw infeasible_error("homogenized program is infeasible", s.infeasible_rows,
                             s.infeasibility);
    throw numerical_error("homogenized program did not solve");
  }
  const double t = s.x[p.nvars];
  if (!(t > kHomogDegenerate)) throw degenerate_denominator_error();
  out.value = s.objective;
  out.t = t;
  out.y.resize(p.nvars);
  for (int j = 0; j < p.nvars; ++j) out.y[j] = s.x[j] / t;
  out.row_duals.assign(s.row_duals.begin(),
                       s.row_duals.begin() + static_cast<long>(p.rows.size()));
  return out;
}

// Dyadic bisection for the parametric root of lambda -> f(lambda), f weakly
// decreasing with a root at the optimal ratio. Starts at the bracket
// midpoint; every step halves the bracket, so after i steps the width is
// exactly (hi - lo) * 2^-i. Two successful exits:
//   * the stopping band 0 >= f > -eps (min direction: 0 >= f >= -eps), or
//   * the bracket width falls to eps, which covers objectives whose f only
//     touches zero without crossing (a boundary root).
struct dyadic_result {
  double lambda = 0.0;
  double f_at_lambda = 0.0;
  int iterations = 0;
  bool band_stop = false;
  std::vector<double> widths;   // bracket width after each iteration
};

template <class F>
dyadic_result dyadic_root_search(F&& f, double lo, double hi, double eps, bool max_direction) {
  if (!(hi > lo) || !(eps > 0.0)) throw index_range_error("bad dyadic search bracket");
  const int cap =
      static_cast<int>(std::ceil(std::log2((hi - lo) / eps))) + 8;
  dyadic_result out;
  double lam = 0.5 * (lo + hi);
  for (;;) {
    ++out.iterations;
    const double fv = f(lam);
    out.lambda = lam;
    out.f_at_lambda = fv;
    const bool in_band = max_direction ? (fv <= 0.0 && fv > -eps) : (fv <= 0.0 && fv >= -eps);
    if (in_band) {
      out.band_stop = true;
      return out;
    }
    if (fv > 0.0)
      lo = lam;
    else
      hi = lam;
    out.widths.push_back(hi - lo);
    lam = 0.5 * (lo + hi);
    if (hi - lo <= eps) {
      out.lambda = lam;
      out.f_at_lambda = f(lam);
      return out;
    }
    if (out.iterations >= cap) throw stalled_error();
  }
}

}  // namespace ineq
