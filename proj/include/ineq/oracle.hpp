#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ineq/common.hpp"
#include "ineq/data.hpp"
#include "ineq/indices.hpp"
#include "ineq/scenario2.hpp"

namespace ineq {

// Brute-force reference bounds. Everything here trades speed for
// independence: candidate completions are enumerated outright and the index
// is evaluated per completion, with no reuse of the structural shortcuts the
// production code relies on. Interior grid values act as probes; if a
// production bound were ever beaten by an interior completion, the
// comparison tests would surface it.
struct oracle_options {
  int steps = 8;                         // grid resolution inside each bracket/interval
  std::size_t max_n = 10;                // refuse larger samples outright
  std::size_t eval_budget = 20'000'000;  // completions to evaluate before giving up
};

namespace detail_oracle {

inline void check_budget(double estimated, const oracle_options& opt) {
  if (estimated > static_cast<double>(opt.eval_budget))
    throw index_range_error("reference enumeration would need about " +
                            std::to_string(static_cast<long long>(estimated)) +
                            " evaluations; shrink the instance");
}

inline std::vector<double> grid_values(double lo, double hi, int steps) {
  std::vector<double> v{lo};
  if (hi > lo) {
    for (int j = 1; j < steps; ++j)
      v.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(steps));
    v.push_back(hi);
  }
  return v;
}

struct running_best {
  bool any = false;
  double lower = kInf, upper = -kInf;
  std::vector<double> argmin, argmax;

  void feed(double v, const std::vector<double>& y) {
    if (!any || v < lower) {
      lower = v;
      argmin = y;
    }
    if (!any || v > upper) {
      upper = v;
      argmax = y;
    }
    any = true;
  }
};

}  // namespace detail_oracle

// ---------------------------------------------------------------------------
// Grouped data: every nondecreasing per-group multiset over the group's value
// grid, groups concatenated in bracket order (ordering across groups is
// automatic since brackets do not overlap). Constraints are checked per
// completion with a small slack; equality side conditions rarely land on a
// grid exactly, so for those prefer the analytic reduction below.
// ---------------------------------------------------------------------------
inline bounds_result brute_force_bounds_1(const grouped_table& t, const index_spec& spec,
                                          const constraint_set& cs = {},
                                          const oracle_options& opt = {}) {
  t.validate();
  if (static_cast<std::size_t>(t.n()) > opt.max_n)
    throw index_range_error("reference enumeration limited to tiny samples");
  const std::size_t d = t.groups();

  std::vector<std::vector<double>> grids(d);
  double estimate = 1.0;
  for (std::size_t g = 0; g < d; ++g) {
    grids[g] = detail_oracle::grid_values(t.brackets[g].lower, t.brackets[g].upper, opt.steps);
    // multisets of size n_g from |grid| values
    double ways = 1.0;
    for (long long i = 1; i <= t.counts[g]; ++i)
      ways = ways * static_cast<double>(grids[g].size() + i - 1) / static_cast<double>(i);
    estimate *= ways;
  }
  detail_oracle::check_budget(estimate, opt);

  const sample_polyhedron poly = cs.empty() ? sample_polyhedron{} : build_polyhedron(t, cs);
  auto feasible = [&](const std::vector<double>& y) {
    if (cs.empty()) return true;
    // Only the appended side rows need checking; boxes and ordering hold by
    // construction.
    const std::size_t first_side = (y.size() - 1) + 2 * y.size();
    for (std::size_t r = first_side; r < poly.rows.size(); ++r) {
      const auto& row = poly.rows[r];
      double lhs = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) lhs += row.a[i] * y[i];
      const double slack = 1e-9 * (1.0 + std::fabs(row.rhs));
      if (row.rel == relation::eq && std::fabs(lhs - row.rhs) > slack) return false;
      if (row.rel == relation::le && lhs - row.rhs > slack) return false;
      if (row.rel == relation::ge && row.rhs - lhs > slack) return false;
    }
    return true;
  };

  detail_oracle::running_best best;
  std::vector<double> y(static_cast<std::size_t>(t.n()));
  const auto off = t.offsets();

  std::function<void(std::size_t)> per_group = [&](std::size_t g) {
    if (g == d) {
      if (!feasible(y)) return;
      double v;
      try {
        v = evaluate_index(spec, sorted_sample{y});
      } catch (const nonpositive_mean_error&) {
        return;
      }
      best.feed(v, y);
      return;
    }
    const auto& grid = grids[g];
    // Nondecreasing tuples of length counts[g] over grid, by index.
    std::function<void(long long, std::size_t)> fill = [&](long long slot, std::size_t from) {
      if (slot == t.counts[g]) {
        per_group(g + 1);
        return;
      }
      for (std::size_t vi = from; vi < grid.size(); ++vi) {
        y[static_cast<std::size_t>(off[g] + slot)] = grid[vi];
        fill(slot + 1, vi);
      }
    };
    fill(0, 0);
  };
  per_group(0);

  if (!best.any) throw infeasible_error("no grid completion satisfies the constraints");
  bounds_result out;
  out.lower = best.lower;
  out.upper = best.upper;
  out.argmin = std::move(best.argmin);
  out.argmax = std::move(best.argmax);
  out.diag.mode = "enumeration";
  return out;
}

// ---------------------------------------------------------------------------
// Interval data: the per-unit candidate set is the unit's own endpoints, any
// lattice value falling inside the unit, and interior probe points. The
// product over units is evaluated directly.
// ---------------------------------------------------------------------------
inline bounds_result brute_force_bounds_2(const interval_sample& s,
                                          const oracle_options& opt = {}) {
  s.validate();
  if (s.n() > opt.max_n) throw index_range_error("reference enumeration limited to tiny samples");
  const endpoint_lattice lat = build_lattice(s);

  std::vector<std::vector<double>> cand(s.n());
  double estimate = 1.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const auto& o = s.obs[i];
    auto& c = cand[i];
    c = detail_oracle::grid_values(o.lower, o.upper, std::max(2, opt.steps / 2));
    for (double u : lat.u)
      if (o.contains(u)) c.push_back(u);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    estimate *= static_cast<double>(c.size());
  }
  detail_oracle::check_budget(estimate, opt);

  detail_oracle::running_best best;
  std::vector<double> y(s.n());
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == s.n()) {
      double mean = 0.0;
      for (double v : y) mean += v;
      if (!(mean > 0.0)) return;
      best.feed(mass_gini(y, std::vector<double>(y.size(), 1.0)), y);
      return;
    }
    for (double v : cand[i]) {
      y[i] = v;
      walk(i + 1);
    }
  };
  walk(0);

  if (!best.any) throw nonpositive_mean_error();
  bounds_result out;
  out.lower = best.lower;
  out.upper = best.upper;
  std::sort(best.argmin.begin(), best.argmin.end());
  std::sort(best.argmax.begin(), best.argmax.end());
  out.argmin = std::move(best.argmin);
  out.argmax = std::move(best.argmax);
  out.diag.mode = "enumeration";
  return out;
}

// ---------------------------------------------------------------------------
// Exact reference for grouped data pinned to a published overall mean.
//
// At an extreme point of that polytope the active rows leave at most one run
// of tied positions free inside one group; the tie value is then determined
// by the mean. Candidates therefore are: (a) all-corner splits per group
// whose mean happens to match, and (b) one pivot group holding k1 units at
// its lower endpoint, k2 at its upper, and a tied run between whose common
// value solves the mean equation, all other groups split at corners.
// ---------------------------------------------------------------------------
inline bounds_result reduced_mean_bounds(const grouped_table& t, double mu,
                                         const index_spec& spec) {
  t.validate();
  const std::size_t d = t.groups();
  const auto off = t.offsets();
  const double nn = static_cast<double>(t.n());
  detail_oracle::running_best best;
  std::vector<double> y(static_cast<std::size_t>(t.n()));

  auto consider = [&]() {
    double v;
    try {
      v = evaluate_index(spec, sorted_sample{y});
    } catch (const nonpositive_mean_error&) {
      return;
    }
    best.feed(v, y);
  };

  // Corner splits for every group except an optional pivot; the callback gets
  // the partial sum of the corner groups.
  std::function<void(std::size_t, std::size_t, double, const std::function<void(double)>&)>
      corners = [&](std::size_t g, std::size_t pivot, double acc,
                    const std::function<void(double)>& done) {
        if (g == d) {
          done(acc);
          return;
        }
        if (g == pivot) {
          corners(g + 1, pivot, acc, done);
          return;
        }
        for (long long ml = 0; ml <= t.counts[g]; ++ml) {
          for (long long i = 0; i < t.counts[g]; ++i)
            y[static_cast<std::size_t>(off[g] + i)] =
                i < ml ? t.brackets[g].lower : t.brackets[g].upper;
          const double sum = static_cast<double>(ml) * t.brackets[g].lower +
                             static_cast<double>(t.counts[g] - ml) * t.brackets[g].upper;
          corners(g + 1, pivot, acc + sum, done);
        }
      };

  // (a) pure corner patterns matching the mean.
  corners(0, d, 0.0, [&](double total) {
    if (std::fabs(total / nn - mu) <= 1e-9 * (1.0 + std::fabs(mu))) consider();
  });

  // (b) one tied run inside a pivot group.
  for (std::size_t p = 0; p < d; ++p) {
    const long long np = t.counts[p];
    const double lo = t.brackets[p].lower, hi = t.brackets[p].upper;
    for (long long k1 = 0; k1 <= np; ++k1)
      for (long long k2 = 0; k1 + k2 < np; ++k2) {
        const long long run = np - k1 - k2;
        corners(0, p, 0.0, [&](double others) {
          const double fixed = others + static_cast<double>(k1) * lo +
                               static_cast<double>(k2) * hi;
          double v = (nn * mu - fixed) / static_cast<double>(run);
          if (v < lo - 1e-9 * (1.0 + std::fabs(v)) || v > hi + 1e-9 * (1.0 + std::fabs(v)))
            return;
          v = std::clamp(v, lo, hi);
          for (long long i = 0; i < np; ++i) {
            double vi = v;
            if (i < k1)
              vi = lo;
            else if (i >= np - k2)
              vi = hi;
            y[static_cast<std::size_t>(off[p] + i)] = vi;
          }
          consider();
        });
      }
  }

  if (!best.any)
    throw infeasible_error("published mean is unreachable from the brackets");
  bounds_result out;
  out.lower = best.lower;
  out.upper = best.upper;
  out.argmin = std::move(best.argmin);
  out.argmax = std::move(best.argmax);
  out.diag.mode = "reduction";
  return out;
}

}  // namespace ineq
