#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ineq/common.hpp"
#include "ineq/data.hpp"
#include "ineq/indices.hpp"
#include "ineq/lfp.hpp"
#include "ineq/scenario1.hpp"
#include "ineq/simplex.hpp"

namespace ineq {

// ---------------------------------------------------------------------------
// Candidate support for interval data. Extremal completions only ever place
// units at interval endpoints, at observed point values, or at one shared
// pinch value that itself comes from this set. b holds the distinct genuine
// interval endpoints; u additionally merges in the point values.
// ---------------------------------------------------------------------------
struct endpoint_lattice {
  std::vector<double> b;
  std::vector<double> u;
};

inline endpoint_lattice build_lattice(const interval_sample& s) {
  s.validate();
  endpoint_lattice lat;
  for (const auto& o : s.obs) {
    if (o.is_point()) continue;
    lat.b.push_back(o.lower);
    lat.b.push_back(o.upper);
  }
  std::sort(lat.b.begin(), lat.b.end());
  lat.b.erase(std::unique(lat.b.begin(), lat.b.end()), lat.b.end());
  lat.u = lat.b;
  for (const auto& o : s.obs)
    if (o.is_point()) lat.u.push_back(o.lower);
  std::sort(lat.u.begin(), lat.u.end());
  lat.u.erase(std::unique(lat.u.begin(), lat.u.end()), lat.u.end());
  return lat;
}

// Sum_{ij} c_i c_j |u_i - u_j|. Nonpositive whenever sum(c) == 0; the
// kernel test relies on that sign.
inline double distance_quadratic(const std::vector<double>& u, const std::vector<double>& c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) acc += c[i] * c[j] * std::fabs(u[i] - u[j]);
  return acc;
}

// ---------------------------------------------------------------------------
// Share description of where the interval units can sit. phi_k is the share
// of the whole sample placed at lattice point u_k by interval units (points
// keep their own fixed 1/n masses and stay outside phi). A share profile is
// realizable by an actual assignment exactly when every consecutive lattice
// block holds at least the intervals contained in it and at most the
// intervals touching it; the block system plus the total pin down the
// profile polytope, and its constraint matrix has consecutive ones, so
// integer-count vertices are assignments.
// ---------------------------------------------------------------------------
struct share_system {
  std::vector<double> u;                              // lattice, size K
  std::vector<lp_row> rows;                           // block rows + total equality
  std::vector<std::vector<int>> contained, touching;  // K x K block counts
  long long n = 0;
  int interval_units = 0;
};

inline share_system build_share_system(const interval_sample& s) {
  s.validate();
  share_system sys;
  const endpoint_lattice lat = build_lattice(s);
  sys.u = lat.u;
  sys.n = static_cast<long long>(s.n());
  const auto ivs = s.intervals();
  sys.interval_units = static_cast<int>(ivs.size());
  const std::size_t k = sys.u.size();
  sys.contained.assign(k, std::vector<int>(k, 0));
  sys.touching.assign(k, std::vector<int>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      int inside = 0, touch = 0;
      for (const auto& q : ivs) {
        if (q.lower >= sys.u[i] && q.upper <= sys.u[j]) ++inside;
        if (q.lower <= sys.u[j] && q.upper >= sys.u[i]) ++touch;
      }
      sys.contained[i][j] = inside;
      sys.touching[i][j] = touch;
    }

  const double nn = static_cast<double>(sys.n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      if (i == 0 && j == k - 1) continue;  // the full block is the equality below
      std::vector<double> a(k, 0.0);
      for (std::size_t l = i; l <= j; ++l) a[l] = 1.0;
      sys.rows.push_back(lp_row{a, relation::le, sys.touching[i][j] / nn});
      for (double& v : a) v = -v;
      sys.rows.push_back(lp_row{std::move(a), relation::le, -sys.contained[i][j] / nn});
    }
  {
    std::vector<double> a(k, 1.0);
    sys.rows.push_back(lp_row{std::move(a), relation::eq, sys.interval_units / nn});
  }
  return sys;
}

struct bounds2_options {
  std::size_t max_vertex_configs = std::size_t{1} << 20;  // exhaustive endpoint sweep budget
  std::size_t share_node_budget = 2'000'000;              // integral profile enumeration budget
  double eps = 1e-6;                                      // dyadic tolerance, share path
  bool relaxed_diagnostics = false;                       // attach continuous-share cross values
};

namespace detail2 {

inline std::optional<double> try_mass_gini(const std::vector<double>& v,
                                           const std::vector<double>& m) {
  double tot = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    tot += m[i];
    mean += m[i] * v[i];
  }
  if (!(tot > 0.0) || !(mean > 0.0)) return std::nullopt;
  return mass_gini(v, m);
}

// Completion that pins every straddler of u0 at u0 and clamps everyone else
// toward it.
inline std::vector<double> pinch_completion(const interval_sample& s, double u0) {
  std::vector<double> y;
  y.reserve(s.n());
  for (const auto& o : s.obs) {
    if (o.upper < u0)
      y.push_back(o.upper);
    else if (o.lower > u0)
      y.push_back(o.lower);
    else
      y.push_back(u0);
  }
  return y;
}

struct interval_class {
  double lower = 0.0, upper = 0.0;
  int count = 0;
};

inline std::vector<interval_class> group_intervals(const std::vector<interval_obs>& ivs) {
  std::map<std::pair<double, double>, int> tally;
  for (const auto& q : ivs) ++tally[{q.lower, q.upper}];
  std::vector<interval_class> cls;
  cls.reserve(tally.size());
  for (const auto& [key, c] : tally) cls.push_back({key.first, key.second, c});
  return cls;
}

}  // namespace detail2

// ---------------------------------------------------------------------------
// Production interval-data Gini bounds.
//
// Lower bound: the minimizing completion pulls everything toward one pinch
// value; between consecutive candidate values the objective is a ratio of
// two affine functions of the pinch, hence monotone, so scanning the lattice
// hits the optimum exactly.
//
// Upper bound: the maximum over the completion box is attained with every
// interval at one of its endpoints. Identical intervals are interchangeable,
// so configurations are counted per distinct interval class; the sweep is
// exhaustive when the class-split count fits the budget, otherwise a greedy
// single-move ascent from both extreme assignments stands in and the result
// is flagged as not certified.
// ---------------------------------------------------------------------------
inline bounds_result gini_bounds_2(const interval_sample& s, const bounds2_options& opt = {}) {
  s.validate();
  const endpoint_lattice lat = build_lattice(s);
  const std::size_t n = s.n();
  const std::vector<double> unit_mass(n, 1.0 / static_cast<double>(n));

  bounds_result out;
  out.diag.mode = "vertex";

  // Lower bound over pinch candidates.
  double best_min = kInf;
  std::vector<double> best_min_y;
  for (double u0 : lat.u) {
    auto y = detail2::pinch_completion(s, u0);
    const auto g = detail2::try_mass_gini(y, unit_mass);
    if (!g) continue;
    if (*g < best_min) {
      best_min = *g;
      best_min_y = std::move(y);
    }
  }
  if (!std::isfinite(best_min)) throw nonpositive_mean_error();

  // Upper bound over endpoint assignments.
  const auto ivs = s.intervals();
  const auto pts = s.points();
  double best_max = -kInf;
  std::vector<double> best_max_y;
  if (ivs.empty()) {
    best_max = best_min;
    best_max_y = best_min_y;
  } else {
    const auto cls = detail2::group_intervals(ivs);
    double configs = 1.0;
    for (const auto& c : cls) configs *= static_cast<double>(c.count + 1);
    const bool exhaustive = configs <= static_cast<double>(opt.max_vertex_configs);
    out.diag.exact_enumeration = exhaustive;

    std::vector<double> values;
    std::vector<double> masses;
    values.reserve(2 * cls.size() + pts.size());
    for (const auto& c : cls) {
      values.push_back(c.lower);
      values.push_back(c.upper);
    }
    for (double p : pts) values.push_back(p);
    masses.assign(values.size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i)
      masses[2 * cls.size() + i] = 1.0 / static_cast<double>(n);

    std::vector<int> at_upper(cls.size(), 0);
    auto eval_config = [&](const std::vector<int>& k) {
      for (std::size_t c = 0; c < cls.size(); ++c) {
        masses[2 * c] = static_cast<double>(cls[c].count - k[c]) / static_cast<double>(n);
        masses[2 * c + 1] = static_cast<double>(k[c]) / static_cast<double>(n);
      }
      return detail2::try_mass_gini(values, masses);
    };
    auto record = [&](const std::vector<int>& k, double g) {
      if (g <= best_max) return;
      best_max = g;
      best_max_y.clear();
      best_max_y.reserve(n);
      for (std::size_t c = 0; c < cls.size(); ++c) {
        for (int i = 0; i < cls[c].count - k[c]; ++i) best_max_y.push_back(cls[c].lower);
        for (int i = 0; i < k[c]; ++i) best_max_y.push_back(cls[c].upper);
      }
      best_max_y.insert(best_max_y.end(), pts.begin(), pts.end());
    };

    if (exhaustive) {
      // Odometer over per-class upper-endpoint counts.
      for (;;) {
        if (const auto g = eval_config(at_upper)) record(at_upper, *g);
        std::size_t c = 0;
        while (c < cls.size() && at_upper[c] == cls[c].count) at_upper[c++] = 0;
        if (c == cls.size()) break;
        ++at_upper[c];
      }
    } else {
      out.diag.warn("endpoint sweep budget exceeded; upper bound from greedy ascent only");
      auto climb = [&](std::vector<int> k) {
        auto cur = eval_config(k);
        for (int round = 0; round < 10000; ++round) {
          double best_gain = 0.0;
          std::size_t best_c = cls.size();
          int best_dir = 0;
          for (std::size_t c = 0; c < cls.size(); ++c)
            for (int dir : {+1, -1}) {
              const int nk = k[c] + dir;
              if (nk < 0 || nk > cls[c].count) continue;
              k[c] = nk;
              const auto g = eval_config(k);
              k[c] = nk - dir;
              if (g && cur && *g - *cur > best_gain) {
                best_gain = *g - *cur;
                best_c = c;
                best_dir = dir;
              }
            }
          if (best_c == cls.size() || best_gain <= 1e-15) break;
          k[best_c] += best_dir;
          cur = eval_config(k);
        }
        if (cur) record(k, *cur);
      };
      std::vector<int> all_low(cls.size(), 0), all_high(cls.size());
      for (std::size_t c = 0; c < cls.size(); ++c) all_high[c] = cls[c].count;
      climb(all_low);
      climb(all_high);
    }
  }
  if (!std::isfinite(best_max)) throw nonpositive_mean_error();

  std::sort(best_min_y.begin(), best_min_y.end());
  std::sort(best_max_y.begin(), best_max_y.end());
  out.lower = best_min;
  out.upper = best_max;
  out.argmin = std::move(best_min_y);
  out.argmax = std::move(best_max_y);
  out.diag.distinct_values =
      std::max(distinct_value_count(out.argmin), distinct_value_count(out.argmax));
  return out;
}

// ---------------------------------------------------------------------------
// Share-profile path for the same bounds.
//
// Feasible integer profiles are enumerated once (with block pruning); the
// dyadic root search then runs on the parametric gap over that cached set,
// and the reported bounds re-optimize the ratio over the set exactly.
// Continuous-share cross values are optional diagnostics: the minimum of the
// ratio over the profile polytope sits at a vertex, which is integral, so
// the relaxed lower equals the integral one; the relaxed upper can genuinely
// exceed every assignment and is climbed with Frank-Wolfe steps.
// ---------------------------------------------------------------------------
inline bounds_result gini_bounds_2_shares(const interval_sample& s, const bounds2_options& opt = {}) {
  s.validate();
  const share_system sys = build_share_system(s);
  const std::size_t k = sys.u.size();
  const auto pts = s.points();
  const double nn = static_cast<double>(sys.n);
  const int m = sys.interval_units;

  bounds_result out;
  out.diag.mode = "shares";

  if (m == 0 || k == 0) {
    const std::vector<double> unit_mass(pts.size(), 1.0 / nn);
    const auto g = detail2::try_mass_gini(pts, unit_mass);
    if (!g) throw nonpositive_mean_error();
    out.lower = out.upper = *g;
    out.argmin = out.argmax = sorted_sample::of(pts).values;
    out.diag.distinct_values = distinct_value_count(out.argmin);
    return out;
  }

  // Scale so means stay at most one; the ratio is scale invariant.
  double vmax = 0.0;
  for (double v : sys.u) vmax = std::max(vmax, std::fabs(v));
  for (double p : pts) vmax = std::max(vmax, std::fabs(p));
  if (!(vmax > 0.0)) throw nonpositive_mean_error();
  std::vector<double> un(k);
  for (std::size_t i = 0; i < k; ++i) un[i] = sys.u[i] / vmax;
  std::vector<double> pn(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pn[i] = pts[i] / vmax;

  // Pairwise pieces reused by every profile evaluation.
  std::vector<std::vector<double>> w(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) w[i][j] = std::fabs(un[i] - un[j]);
  std::vector<double> pw(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (double p : pn) pw[i] += std::fabs(un[i] - p);
  double pp_half = 0.0, psum = 0.0;
  for (std::size_t a = 0; a < pn.size(); ++a) {
    psum += pn[a];
    for (std::size_t b = a + 1; b < pn.size(); ++b) pp_half += std::fabs(pn[a] - pn[b]);
  }

  struct profile {
    std::vector<int> c;
    double num = 0.0, den = 0.0;
  };
  std::vector<profile> profiles;
  std::size_t nodes = 0;
  bool budget_ok = true;
  std::vector<int> c(k, 0);
  // DFS over lattice positions; after fixing position j every block ending at
  // j is final, so the block conditions prune exactly there.
  std::function<void(std::size_t, int)> dfs = [&](std::size_t j, int placed) {
    if (++nodes > opt.share_node_budget) {
      budget_ok = false;
      return;
    }
    if (j == k) {
      if (placed != m) return;
      profile pr;
      pr.c = c;
      double num = pp_half, den = psum;
      for (std::size_t i = 0; i < k; ++i) {
        if (c[i] == 0) continue;
        den += c[i] * un[i];
        num += c[i] * pw[i];
        for (std::size_t l = i + 1; l < k; ++l) num += c[i] * c[l] * w[i][l];
      }
      pr.num = num / (nn * nn);
      pr.den = den / nn;
      profiles.push_back(std::move(pr));
      return;
    }
    const int cap = sys.touching[j][j];
    for (int take = 0; take <= std::min(cap, m - placed); ++take) {
      c[j] = take;
      bool ok = true;
      int block = 0;
      for (std::size_t i = j + 1; i-- > 0;) {
        block += c[i];
        if (block > sys.touching[i][j] || block < sys.contained[i][j]) {
          ok = false;
          break;
        }
      }
      if (ok) dfs(j + 1, placed + take);
      if (!budget_ok) break;
    }
    c[j] = 0;
  };
  dfs(0, 0);
  out.diag.exact_enumeration = budget_ok;

  if (!budget_ok || profiles.empty()) {
    // Fall back on the endpoint-assignment path; its answers are valid for
    // the same problem.
    out.diag.warn("share profile enumeration exceeded its budget; using the endpoint path");
    bounds_result fb = gini_bounds_2(s, opt);
    fb.diag.mode = "shares";
    fb.diag.exact_enumeration = fb.diag.exact_enumeration && false;
    for (const auto& wmsg : out.diag.warnings) fb.diag.warn(wmsg);
    return fb;
  }

  // Dyadic certification plus exact polish over the cached profiles.
  auto run_search = [&](bool maximize) {
    std::size_t arg = 0;
    auto f = [&](double lambda) {
      double best = maximize ? -kInf : kInf;
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (!(profiles[i].den > 0.0)) continue;
        const double v = profiles[i].num - lambda * profiles[i].den;
        if (maximize ? v > best : v < best) {
          best = v;
          arg = i;
        }
      }
      if (!std::isfinite(best)) throw nonpositive_mean_error();
      return best;
    };
    double hi = 1.0;
    while (f(hi) > 0.0 && hi < 1e6) hi *= 2.0;  // negative values can push the ratio past one
    const auto res = dyadic_root_search(f, 0.0, hi, opt.eps, maximize);
    return std::make_pair(res, arg);
  };
  const auto [up_res, up_arg] = run_search(true);
  const auto [lo_res, lo_arg] = run_search(false);
  (void)up_arg;
  (void)lo_arg;
  out.diag.lambda_upper = up_res.lambda;
  out.diag.lambda_lower = lo_res.lambda;
  out.diag.bracket_widths = up_res.widths;
  out.diag.bracket_widths_lower = lo_res.widths;
  out.diag.iterations = up_res.iterations + lo_res.iterations;

  double best_min = kInf, best_max = -kInf;
  std::size_t arg_min = 0, arg_max = 0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (!(profiles[i].den > 0.0)) continue;
    const double g = profiles[i].num / profiles[i].den;
    if (g < best_min) {
      best_min = g;
      arg_min = i;
    }
    if (g > best_max) {
      best_max = g;
      arg_max = i;
    }
  }
  if (!std::isfinite(best_min)) throw nonpositive_mean_error();
  out.lower = best_min;
  out.upper = best_max;

  // Recover concrete assignments: earliest-deadline-first on each lattice
  // point, which succeeds for any block-feasible profile.
  auto recover = [&](const std::vector<int>& prof) -> std::vector<double> {
    const auto ivs = s.intervals();
    std::vector<char> used(ivs.size(), 0);
    std::vector<double> y(pts.begin(), pts.end());
    for (std::size_t j = 0; j < k; ++j) {
      for (int taken = 0; taken < prof[j]; ++taken) {
        std::size_t pick = ivs.size();
        for (std::size_t i = 0; i < ivs.size(); ++i) {
          if (used[i] || !ivs[i].contains(sys.u[j])) continue;
          if (pick == ivs.size() || ivs[i].upper < ivs[pick].upper) pick = i;
        }
        if (pick == ivs.size()) return {};
        used[pick] = 1;
        y.push_back(sys.u[j]);
      }
    }
    std::sort(y.begin(), y.end());
    return y;
  };
  out.argmin = recover(profiles[arg_min].c);
  out.argmax = recover(profiles[arg_max].c);
  if (out.argmin.empty() || out.argmax.empty())
    out.diag.warn("failed to rebuild a unit assignment from a share profile");
  out.diag.distinct_values =
      std::max(out.argmin.empty() ? 0 : distinct_value_count(out.argmin),
               out.argmax.empty() ? 0 : distinct_value_count(out.argmax));

  if (opt.relaxed_diagnostics) {
    out.diag.has_relaxed = true;
    out.diag.relaxed_lower = out.lower;  // ratio minima over the polytope sit at integral vertices

    // Frank-Wolfe ascent for the continuous upper value, exact line search.
    linear_program lp = linear_program::make(static_cast<int>(k), true);
    lp.rows = sys.rows;
    for (std::size_t i = 0; i < k; ++i) lp.lower[i] = 0.0;
    std::vector<double> phi(k);
    for (std::size_t i = 0; i < k; ++i)
      phi[i] = static_cast<double>(profiles[arg_max].c[i]) / nn;
    auto nm = [&](const std::vector<double>& f) {
      double num = pp_half / (nn * nn), den = psum / nn;
      for (std::size_t i = 0; i < k; ++i) {
        den += f[i] * un[i];
        num += f[i] * pw[i] / nn;
        for (std::size_t l = i + 1; l < k; ++l) num += f[i] * f[l] * w[i][l];
      }
      return std::make_pair(num, den);
    };
    double cur = out.upper;
    for (int it = 0; it < 200; ++it) {
      const auto [num, den] = nm(phi);
      if (!(den > 0.0)) break;
      const double g = num / den;
      for (std::size_t i = 0; i < k; ++i) {
        double grad_n = pw[i] / nn;
        for (std::size_t l = 0; l < k; ++l) grad_n += phi[l] * w[i][l];
        lp.objective[i] = grad_n - g * un[i];
      }
      lp_solution v = solve_lp(lp);
      if (v.status != lp_status::optimal) break;
      // Ratio along the segment phi + t (v - phi) is quadratic over affine.
      std::vector<double> dir(k);
      for (std::size_t i = 0; i < k; ++i) dir[i] = v.x[i] - phi[i];
      double n1 = 0.0, n2 = 0.0, m1 = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double acc = 0.0;
        for (std::size_t l = 0; l < k; ++l) acc += w[i][l] * phi[l];
        n1 += dir[i] * (acc + pw[i] / nn);
        m1 += dir[i] * un[i];
        double acc2 = 0.0;
        for (std::size_t l = 0; l < k; ++l) acc2 += w[i][l] * dir[l];
        n2 += 0.5 * dir[i] * acc2;
      }
      double best_t = 0.0, best_v = g;
      auto consider = [&](double t) {
        if (!(t >= 0.0 && t <= 1.0)) return;
        const double nt = num + n1 * t + n2 * t * t;
        const double mt = den + m1 * t;
        if (!(mt > 0.0)) return;
        if (nt / mt > best_v) {
          best_v = nt / mt;
          best_t = t;
        }
      };
      consider(1.0);
      for (double r : detail1::slice::quadratic_roots(n2 * m1, 2.0 * n2 * den, n1 * den - num * m1))
        consider(r);
      if (best_v <= cur + 1e-13) break;
      for (std::size_t i = 0; i < k; ++i) phi[i] += best_t * dir[i];
      cur = best_v;
    }
    out.diag.relaxed_upper = std::max(cur, out.upper);
    out.diag.agreement_gap = out.diag.relaxed_upper - out.upper;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weighted endpoint bounds used by the resampling engine. Same pinch scan
// for the lower bound; for the upper bound straddlers move as one block per
// threshold, which stays within O(1/n) of the exact sweep and keeps each
// replicate cheap.
// ---------------------------------------------------------------------------
struct weighted_bounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline weighted_bounds gini_bounds_2_weighted(const interval_sample& s,
                                              const std::vector<double>& wts,
                                              const endpoint_lattice* prebuilt = nullptr) {
  endpoint_lattice own;
  if (!prebuilt) {
    own = build_lattice(s);
    prebuilt = &own;
  }
  const endpoint_lattice& lat = *prebuilt;
  weighted_bounds out;
  double best_min = kInf, best_max = -kInf;
  std::vector<double> y(s.n());
  for (double u0 : lat.u) {
    for (std::size_t i = 0; i < s.n(); ++i) {
      const auto& o = s.obs[i];
      y[i] = o.upper < u0 ? o.upper : (o.lower > u0 ? o.lower : u0);
    }
    if (const auto g = detail2::try_mass_gini(y, wts)) best_min = std::min(best_min, *g);
    for (int side = 0; side < 2; ++side) {
      for (std::size_t i = 0; i < s.n(); ++i) {
        const auto& o = s.obs[i];
        if (o.upper <= u0)
          y[i] = o.lower;
        else if (o.lower >= u0)
          y[i] = o.upper;
        else
          y[i] = side == 0 ? o.lower : o.upper;
      }
      if (const auto g = detail2::try_mass_gini(y, wts)) best_max = std::max(best_max, *g);
    }
  }
  if (!std::isfinite(best_min) || !std::isfinite(best_max)) throw nonpositive_mean_error();
  out.lower = best_min;
  out.upper = best_max;
  return out;
}

}  // namespace ineq
