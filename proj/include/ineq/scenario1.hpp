#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ineq/common.hpp"
#include "ineq/data.hpp"
#include "ineq/indices.hpp"
#include "ineq/lfp.hpp"
#include "ineq/simplex.hpp"

namespace ineq {

// ---------------------------------------------------------------------------
// Corner-share form for grouped Gini.
//
// Within each bracket an extremal allocation concentrates on the two
// endpoints, so a candidate is described by the fraction p_d of group d's
// mass sitting at the lower endpoint. With x = (p, 1-p) stacked, the Gini is
//   G(p) = (1/2) x'Ax / x'b,
// where A holds share-weighted absolute endpoint differences and b holds
// share-weighted endpoint levels.
// ---------------------------------------------------------------------------
struct corner_form {
  std::size_t d = 0;
  std::vector<double> s, lo, hi;              // shares, endpoints
  std::vector<double> b;                      // length 2D
  std::vector<std::vector<double>> a;         // 2D x 2D, symmetric

  double numerator(const std::vector<double>& p) const {
    std::vector<double> x(2 * d);
    for (std::size_t g = 0; g < d; ++g) {
      x[g] = p[g];
      x[g + d] = 1.0 - p[g];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < 2 * d; ++i)
      for (std::size_t j = 0; j < 2 * d; ++j) acc += x[i] * a[i][j] * x[j];
    return 0.5 * acc;
  }

  double denominator(const std::vector<double>& p) const {
    double acc = 0.0;
    for (std::size_t g = 0; g < d; ++g) acc += p[g] * b[g] + (1.0 - p[g]) * b[g + d];
    return acc;
  }

  double gini_at(const std::vector<double>& p) const {
    const double m = denominator(p);
    if (!(m > 0.0)) throw nonpositive_mean_error("corner profile has nonpositive mean");
    return numerator(p) / m;
  }
};

inline corner_form build_gini_form(const grouped_table& t) {
  t.validate();
  corner_form f;
  f.d = t.groups();
  f.s = t.shares();
  f.lo.resize(f.d);
  f.hi.resize(f.d);
  for (std::size_t g = 0; g < f.d; ++g) {
    f.lo[g] = t.brackets[g].lower;
    f.hi[g] = t.brackets[g].upper;
  }
  const std::size_t dd = 2 * f.d;
  f.b.assign(dd, 0.0);
  f.a.assign(dd, std::vector<double>(dd, 0.0));
  for (std::size_t g = 0; g < f.d; ++g) {
    f.b[g] = f.s[g] * f.lo[g];
    f.b[g + f.d] = f.s[g] * f.hi[g];
  }
  // Entry (i, j) is s_i s_j |v_i - v_j| with v = (lo_1..lo_D, hi_1..hi_D).
  auto val = [&](std::size_t i) { return i < f.d ? f.lo[i] : f.hi[i - f.d]; };
  auto shr = [&](std::size_t i) { return i < f.d ? f.s[i] : f.s[i - f.d]; };
  for (std::size_t i = 0; i < dd; ++i)
    for (std::size_t j = 0; j < dd; ++j)
      f.a[i][j] = shr(i) * shr(j) * std::fabs(val(i) - val(j));
  return f;
}

// Same form from raw endpoint vectors and a nonnegative share vector; the
// shares are normalised here so callers can pass unnormalised weights.
inline corner_form build_gini_form(const std::vector<double>& lo, const std::vector<double>& hi,
                                   const std::vector<double>& shares) {
  const std::size_t d = lo.size();
  if (d == 0 || hi.size() != d || shares.size() != d)
    throw bad_bracket_error("endpoint and share vectors must have equal, nonzero length");
  double sum = 0.0;
  for (std::size_t g = 0; g < d; ++g) {
    if (!(lo[g] <= hi[g]))
      throw bad_bracket_error("bracket lower endpoint exceeds its upper endpoint");
    if (g + 1 < d && !(hi[g] <= lo[g + 1]))
      throw overlap_error("brackets must be ordered and non-overlapping");
    if (!(shares[g] >= 0.0)) throw negative_count_error("shares must be nonnegative");
    sum += shares[g];
  }
  if (!(sum > 0.0)) throw empty_sample_error("share vector has no mass");

  corner_form f;
  f.d = d;
  f.lo = lo;
  f.hi = hi;
  f.s.resize(d);
  for (std::size_t g = 0; g < d; ++g) f.s[g] = shares[g] / sum;
  const std::size_t dd = 2 * d;
  f.b.assign(dd, 0.0);
  f.a.assign(dd, std::vector<double>(dd, 0.0));
  for (std::size_t g = 0; g < d; ++g) {
    f.b[g] = f.s[g] * f.lo[g];
    f.b[g + d] = f.s[g] * f.hi[g];
  }
  auto val = [&](std::size_t i) { return i < d ? f.lo[i] : f.hi[i - d]; };
  auto shr = [&](std::size_t i) { return i < d ? f.s[i] : f.s[i - d]; };
  for (std::size_t i = 0; i < dd; ++i)
    for (std::size_t j = 0; j < dd; ++j)
      f.a[i][j] = shr(i) * shr(j) * std::fabs(val(i) - val(j));
  return f;
}

enum class share_mode { grid, relaxed };

namespace detail1 {

// Quadratic-over-linear slice of the corner form along one group's split
// fraction, everything else pinned. N(t) = n0 + n1 t + n2 t^2 (n2 <= 0),
// M(t) = m0 + m1 t.
struct slice {
  double n0 = 0, n1 = 0, n2 = 0, m0 = 0, m1 = 0;

  double num(double t) const { return n0 + t * (n1 + t * n2); }
  double den(double t) const { return m0 + m1 * t; }

  // Interior critical points of N/M.
  std::vector<double> ratio_critical() const {
    // (N'M - NM') = n2 m1 t^2 + 2 n2 m0 t + (n1 m0 - n0 m1)
    return quadratic_roots(n2 * m1, 2.0 * n2 * m0, n1 * m0 - n0 * m1);
  }

  // Maximizer of N(t) - lambda M(t) over the reals (vertex of the parabola).
  std::optional<double> parametric_vertex(double lambda) const {
    if (n2 >= -1e-300) return std::nullopt;
    return -(n1 - lambda * m1) / (2.0 * n2);
  }

  static std::vector<double> quadratic_roots(double qa, double qb, double qc) {
    std::vector<double> r;
    if (std::fabs(qa) < 1e-300) {
      if (std::fabs(qb) > 1e-300) r.push_back(-qc / qb);
      return r;
    }
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return r;
    const double sq = std::sqrt(disc);
    // Citardauq-style split avoids cancellation.
    const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
    r.push_back(q / qa);
    if (std::fabs(q) > 1e-300) r.push_back(qc / q);
    return r;
  }
};

// Slice for "groups before g at lower, groups after g at upper, group g split
// with fraction t at lower".
inline slice make_max_slice(const corner_form& f, std::size_t g) {
  const std::size_t dd = 2 * f.d;
  std::vector<double> xi(dd, 0.0), eta(dd, 0.0);
  for (std::size_t j = 0; j < f.d; ++j) {
    if (j < g)
      xi[j] = 1.0;                    // at lower endpoint
    else if (j > g)
      xi[j + f.d] = 1.0;              // at upper endpoint
  }
  xi[g + f.d] = 1.0;
  eta[g] = 1.0;
  eta[g + f.d] = -1.0;

  slice sl;
  double xax = 0, xae = 0, eae = 0;
  for (std::size_t i = 0; i < dd; ++i)
    for (std::size_t j = 0; j < dd; ++j) {
      xax += xi[i] * f.a[i][j] * xi[j];
      xae += xi[i] * f.a[i][j] * eta[j];
      eae += eta[i] * f.a[i][j] * eta[j];
    }
  sl.n0 = 0.5 * xax;
  sl.n1 = xae;
  sl.n2 = 0.5 * eae;
  for (std::size_t i = 0; i < dd; ++i) {
    sl.m0 += xi[i] * f.b[i];
    sl.m1 += eta[i] * f.b[i];
  }
  return sl;
}

// Candidate split fractions for one slice: interval ends, plus either the
// exact interior critical points (relaxed) or their grid neighbours (grid,
// which is exact for the sample problem because the ratio is piecewise
// monotone between critical points).
inline std::vector<double> slice_candidates(const slice& sl, const std::vector<double>& critical,
                                            long long n_g, share_mode mode) {
  std::vector<double> cand{0.0, 1.0};
  const double steps = static_cast<double>(n_g);
  for (double r : critical) {
    if (!(r > 0.0 && r < 1.0)) continue;
    if (mode == share_mode::relaxed) {
      cand.push_back(r);
    } else if (n_g > 0) {
      cand.push_back(std::floor(r * steps) / steps);
      cand.push_back(std::ceil(r * steps) / steps);
    }
  }
  if (mode == share_mode::grid && n_g > 0 && sl.m1 != 0.0) {
    // The ratio can climb monotonically toward a root of the denominator
    // inside the slice; the feasible splits beside that root then matter,
    // and no interior critical point reaches them.
    const double rz = -sl.m0 / sl.m1;
    if (rz > 0.0 && rz <= 1.0 + 1e-9) {
      cand.push_back(std::floor(rz * steps) / steps);
      cand.push_back((std::ceil(rz * steps) - 1.0) / steps);
    }
  }
  for (double& c : cand) c = std::clamp(c, 0.0, 1.0);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  return cand;
}

// Step profile: first m groups at the upper endpoint, the rest at the lower.
inline std::vector<double> step_profile(std::size_t d, std::size_t m) {
  std::vector<double> p(d, 1.0);
  for (std::size_t g = 0; g < m; ++g) p[g] = 0.0;
  return p;
}

inline std::vector<double> expand_step_sample(const grouped_table& t,
                                              const std::vector<double>& p) {
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(t.n()));
  for (std::size_t g = 0; g < t.groups(); ++g) {
    const double v = p[g] >= 0.5 ? t.brackets[g].lower : t.brackets[g].upper;
    y.insert(y.end(), static_cast<std::size_t>(t.counts[g]), v);
  }
  return y;
}

inline std::vector<double> expand_split_sample(const grouped_table& t, std::size_t g,
                                               long long at_lower) {
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(t.n()));
  for (std::size_t j = 0; j < t.groups(); ++j) {
    if (j < g) {
      y.insert(y.end(), static_cast<std::size_t>(t.counts[j]), t.brackets[j].lower);
    } else if (j > g) {
      y.insert(y.end(), static_cast<std::size_t>(t.counts[j]), t.brackets[j].upper);
    } else {
      y.insert(y.end(), static_cast<std::size_t>(at_lower), t.brackets[j].lower);
      y.insert(y.end(), static_cast<std::size_t>(t.counts[j] - at_lower), t.brackets[j].upper);
    }
  }
  return y;
}

}  // namespace detail1

// ---------------------------------------------------------------------------
// Closed-form grouped Gini bounds (no side constraints).
//
// Lower bound: a minimizer is a step profile with every group pinned at one
// endpoint, switching from upper to lower once; the D-1 step profiles are
// evaluated directly. Upper bound: a maximizer pins groups below a pivot at
// the lower endpoint, groups above at the upper endpoint, and splits at most
// the pivot group; each pivot's one-dimensional split problem is solved in
// closed form. Grid mode keeps the split on the {0, 1/n_d, .., 1} lattice,
// matching what integer units can realize; relaxed mode allows any fraction.
// ---------------------------------------------------------------------------
inline bounds_result gini_bounds_1a(const grouped_table& t, share_mode mode = share_mode::grid) {
  t.validate();
  const corner_form f = build_gini_form(t);
  const std::size_t d = f.d;
  if (!(f.hi[d - 1] > 0.0))
    throw nonpositive_mean_error("every completion has nonpositive mean");

  bounds_result out;
  out.diag.mode = mode == share_mode::grid ? "grid" : "relaxed";

  // Lower bound over step profiles.
  double best_min = kInf;
  std::vector<double> best_min_p;
  auto consider_min = [&](const std::vector<double>& p) {
    const double m = f.denominator(p);
    if (!(m > 0.0)) return false;
    const double v = f.numerator(p) / m;
    if (v < best_min) {
      best_min = v;
      best_min_p = p;
    }
    return true;
  };
  bool skipped_zero_mean = false;
  if (d == 1) {
    // Single bracket: all mass at any common point, perfectly equal.
    skipped_zero_mean = !consider_min(std::vector<double>{0.0});
    if (skipped_zero_mean) {
      best_min = 0.0;
      best_min_p = {0.0};
      out.diag.warn("single zero bracket; lower bound fixed at 0");
    } else {
      best_min = 0.0;  // all units equal regardless of the endpoint used
    }
  } else {
    for (std::size_t m = 1; m < d; ++m)
      if (!consider_min(detail1::step_profile(d, m))) skipped_zero_mean = true;
    if (skipped_zero_mean) {
      out.diag.warn("zero-mean corner profiles excluded from the lower-bound scan");
      // Degenerate tables can push the minimizer off the step set; sweep all
      // corner profiles as a fallback when that is affordable.
      if (d <= 16) {
        for (std::size_t mask = 0; mask < (1u << d); ++mask) {
          std::vector<double> p(d, 0.0);
          for (std::size_t g = 0; g < d; ++g) p[g] = (mask >> g) & 1 ? 1.0 : 0.0;
          consider_min(p);
        }
      }
    }
    if (!std::isfinite(best_min)) throw nonpositive_mean_error();
  }

  // Upper bound over pivot slices.
  double best_max = -kInf;
  std::size_t best_g = 0;
  double best_t = 0.0;
  for (std::size_t g = 0; g < d; ++g) {
    const detail1::slice sl = detail1::make_max_slice(f, g);
    const auto cand = detail1::slice_candidates(sl, sl.ratio_critical(), t.counts[g], mode);
    for (double c : cand) {
      const double m = sl.den(c);
      if (!(m > 0.0)) continue;
      const double v = sl.num(c) / m;
      if (v > best_max) {
        best_max = v;
        best_g = g;
        best_t = c;
      }
    }
  }
  if (!std::isfinite(best_max)) throw nonpositive_mean_error();

  out.lower = best_min;
  out.upper = best_max;
  if (!best_min_p.empty()) {
    auto y = detail1::expand_step_sample(t, best_min_p);
    out.argmin = std::move(y);
  }
  if (mode == share_mode::grid) {
    const long long at_lower = std::llround(best_t * static_cast<double>(t.counts[best_g]));
    out.argmax = detail1::expand_split_sample(t, best_g, at_lower);
    out.diag.distinct_values =
        std::max(distinct_value_count(out.argmin), distinct_value_count(out.argmax));
  } else {
    out.diag.warn("relaxed mode: the maximizing profile may split a group fractionally");
    out.diag.distinct_values = distinct_value_count(out.argmin);
  }
  return out;
}

// ---------------------------------------------------------------------------
// The same bounds as a function of the share vector alone, splits at any
// fraction. This is the functional the resampling engine differentiates
// numerically: perturbed share vectors are not integer tables, so the grid
// variant does not apply. Only the two values are needed, not the attaining
// profiles.
// ---------------------------------------------------------------------------
inline std::pair<double, double> corner_share_gini_bounds(const std::vector<double>& lo,
                                                          const std::vector<double>& hi,
                                                          const std::vector<double>& shares) {
  const corner_form f = build_gini_form(lo, hi, shares);
  const std::size_t d = f.d;
  if (!(f.hi[d - 1] > 0.0))
    throw nonpositive_mean_error("every completion has nonpositive mean");

  double best_min = kInf;
  auto consider_min = [&](const std::vector<double>& p) {
    const double m = f.denominator(p);
    if (!(m > 0.0)) return;
    best_min = std::min(best_min, f.numerator(p) / m);
  };
  for (std::size_t m = 0; m <= d; ++m) consider_min(detail1::step_profile(d, m));
  if (!std::isfinite(best_min) && d <= 16) {
    // Zero-mean step profiles were skipped; sweep the remaining corners.
    for (std::size_t mask = 0; mask < (1u << d); ++mask) {
      std::vector<double> p(d, 0.0);
      for (std::size_t g = 0; g < d; ++g) p[g] = (mask >> g) & 1 ? 1.0 : 0.0;
      consider_min(p);
    }
  }

  double best_max = -kInf;
  for (std::size_t g = 0; g < d; ++g) {
    const detail1::slice sl = detail1::make_max_slice(f, g);
    const auto cand = detail1::slice_candidates(sl, sl.ratio_critical(), 0, share_mode::relaxed);
    for (double c : cand) {
      const double m = sl.den(c);
      if (!(m > 0.0)) continue;
      best_max = std::max(best_max, sl.num(c) / m);
    }
  }
  if (!std::isfinite(best_min) || !std::isfinite(best_max)) throw nonpositive_mean_error();
  return {best_min, best_max};
}

// ---------------------------------------------------------------------------
// Root-search path for the same bounds. The Gini bound solves
//   find lambda with  opt_p [ N(p) - lambda M(p) ] = 0,
// where opt is max (upper bound) or min (lower bound) over the respective
// structure family. Endpoints are rescaled by the largest one so the slope of
// the outer function never exceeds 1 and the dyadic bracket on [0, 1] applies
// unchanged. The returned bound is polished: the structure the search settles
// on is re-evaluated as an exact ratio, so the answer agrees with the closed
// form up to the bracket tolerance.
// ---------------------------------------------------------------------------
inline bounds_result gini_bounds_1a_dinkelbach(const grouped_table& t, double eps = 1e-6,
                                               share_mode mode = share_mode::grid) {
  t.validate();
  const std::size_t d = t.groups();
  const double scale = t.brackets[d - 1].upper;
  if (!(scale > 0.0)) throw nonpositive_mean_error("every completion has nonpositive mean");

  grouped_table ts = t;
  for (auto& br : ts.brackets) {
    br.lower /= scale;
    br.upper /= scale;
  }
  const corner_form f = build_gini_form(ts);

  bounds_result out;
  out.diag.mode = mode == share_mode::grid ? "grid" : "relaxed";

  // Upper bound: outer function is the structured maximum of N - lambda M.
  std::size_t up_g = 0;
  double up_t = 0.0;
  std::vector<detail1::slice> slices(d);
  for (std::size_t g = 0; g < d; ++g) slices[g] = detail1::make_max_slice(f, g);
  auto f_max = [&](double lambda) {
    double best = -kInf;
    for (std::size_t g = 0; g < d; ++g) {
      const detail1::slice& sl = slices[g];
      std::vector<double> crit;
      if (auto v = sl.parametric_vertex(lambda)) crit.push_back(*v);
      const auto cand = detail1::slice_candidates(sl, crit, t.counts[g], mode);
      for (double c : cand) {
        if (!(sl.den(c) > 0.0)) continue;
        const double v = sl.num(c) - lambda * sl.den(c);
        if (v > best) {
          best = v;
          up_g = g;
          up_t = c;
        }
      }
    }
    if (!std::isfinite(best)) throw nonpositive_mean_error();
    return best;
  };
  const auto up = dyadic_root_search(f_max, 0.0, 1.0, eps, true);
  {
    // Polish: the search certifies lambda; the reported bound re-optimizes
    // the slice ratios exactly so small-mean tables cannot leak search error
    // into the bound. Starts from the structure the search settled on.
    double polished = slices[up_g].den(up_t) > 0.0 ? slices[up_g].num(up_t) / slices[up_g].den(up_t)
                                                   : -kInf;
    std::size_t pol_g = up_g;
    double pol_t = up_t;
    for (std::size_t g = 0; g < d; ++g) {
      const detail1::slice& sl = slices[g];
      const auto cand = detail1::slice_candidates(sl, sl.ratio_critical(), t.counts[g], mode);
      for (double c : cand) {
        if (!(sl.den(c) > 0.0)) continue;
        const double v = sl.num(c) / sl.den(c);
        if (v > polished) {
          polished = v;
          pol_g = g;
          pol_t = c;
        }
      }
    }
    out.upper = polished;
    out.argmax.clear();
    if (mode == share_mode::grid) {
      const long long at_lower = std::llround(pol_t * static_cast<double>(t.counts[pol_g]));
      out.argmax = detail1::expand_split_sample(t, pol_g, at_lower);
    }
  }
  out.diag.lambda_upper = up.lambda;
  out.diag.bracket_widths = up.widths;

  // Lower bound: outer function is the minimum over step profiles.
  std::vector<std::pair<double, double>> step_nm;  // (N, M) per profile
  if (d == 1) {
    step_nm.emplace_back(0.0, f.denominator({0.0}));
  } else {
    for (std::size_t m = 1; m < d; ++m) {
      const auto p = detail1::step_profile(d, m);
      step_nm.emplace_back(f.numerator(p), f.denominator(p));
    }
  }
  std::size_t lo_idx = 0;
  bool any_valid_step = false;
  auto f_min = [&](double lambda) {
    double best = kInf;
    for (std::size_t i = 0; i < step_nm.size(); ++i) {
      if (!(step_nm[i].second > 0.0)) continue;
      any_valid_step = true;
      const double v = step_nm[i].first - lambda * step_nm[i].second;
      if (v < best) {
        best = v;
        lo_idx = i;
      }
    }
    if (!std::isfinite(best)) throw nonpositive_mean_error();
    return best;
  };
  const auto lo = dyadic_root_search(f_min, 0.0, 1.0, eps, false);
  (void)any_valid_step;
  {
    double polished = kInf;
    std::size_t pick = lo_idx;
    for (std::size_t i = 0; i < step_nm.size(); ++i) {
      if (!(step_nm[i].second > 0.0)) continue;
      const double v = step_nm[i].first / step_nm[i].second;
      if (v < polished) {
        polished = v;
        pick = i;
      }
    }
    out.lower = d == 1 ? 0.0 : polished;
    if (d == 1) {
      out.argmin = detail1::expand_step_sample(t, {0.0});
    } else {
      out.argmin = detail1::expand_step_sample(t, detail1::step_profile(d, pick + 1));
    }
  }
  out.diag.lambda_lower = lo.lambda;
  out.diag.bracket_widths_lower = lo.widths;
  out.diag.iterations = up.iterations + lo.iterations;
  if (!out.argmax.empty())
    out.diag.distinct_values =
        std::max(distinct_value_count(out.argmin), distinct_value_count(out.argmax));
  else
    out.diag.distinct_values = distinct_value_count(out.argmin);
  return out;
}

// ---------------------------------------------------------------------------
// Quantile-ratio bounds for grouped data. Both quantile positions resolve to
// brackets through the cumulative shares; the bounds then read off opposite
// endpoints. Positions falling in the same bracket collapse toward ratio 1
// from below since the completion is sorted.
// ---------------------------------------------------------------------------
namespace detail1 {

// Bracket holding sample position k. tau is only consulted for the refusal:
// when a cumulative share ties the level, a vanishing perturbation of the
// data moves the quantile across a bracket boundary and the bounds are not
// stable, so the call refuses rather than picking a side.
inline std::size_t bracket_of_quantile(const grouped_table& t, double tau, long long k) {
  const auto sh = t.shares();
  double cum = 0.0;
  long long units = 0;
  std::size_t hold = sh.size() - 1;
  bool found = false;
  for (std::size_t g = 0; g < sh.size(); ++g) {
    cum += sh[g];
    if (std::fabs(cum - tau) <= 1e-12)
      throw quantile_boundary_error(
          "quantile level falls on a cumulative-share boundary; the bracket is ambiguous");
    units += t.counts[g];
    if (!found && units >= k) {
      hold = g;
      found = true;
    }
  }
  return hold;
}

inline double endpoint_ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 1.0 : kInf;
  return num / den;
}

}  // namespace detail1

inline bounds_result quantile_ratio_bounds_1a(const grouped_table& t, double tau1, double tau2) {
  t.validate();
  if (!(tau1 > 0.0 && tau1 < tau2 && tau2 < 1.0))
    throw index_range_error("quantile levels must satisfy 0 < tau1 < tau2 < 1");
  const long long n = t.n();
  const long long k1 = quantile_position(tau1, n);
  const long long k2 = quantile_position(tau2, n);
  if (k1 < 1) throw index_range_error("lower quantile position underflows the sample");

  const std::size_t d1 = detail1::bracket_of_quantile(t, tau1, k1);
  const std::size_t d2 = detail1::bracket_of_quantile(t, tau2, k2);
  const double lo1 = t.brackets[d1].lower, hi1 = t.brackets[d1].upper;
  const double lo2 = t.brackets[d2].lower, hi2 = t.brackets[d2].upper;

  bounds_result out;
  if (k1 == k2) {
    // Same sample position: the ratio is identically one.
    out.lower = out.upper = 1.0;
  } else if (d1 == d2) {
    // Same bracket: sortedness pins the ratio at >= 1; the upper end spreads
    // the two positions to the bracket ends.
    out.lower = 1.0;
    out.upper = detail1::endpoint_ratio(hi1, lo1);
  } else {
    out.lower = detail1::endpoint_ratio(lo2, hi1);
    out.upper = detail1::endpoint_ratio(hi2, lo1);
  }

  // Attaining completions (finite cases).
  auto build = [&](bool upper_dir) {
    std::vector<double> y;
    y.reserve(static_cast<std::size_t>(n));
    for (std::size_t g = 0; g < t.groups(); ++g) {
      double v;
      if (k1 == k2) {
        v = t.brackets[g].lower;
      } else if (d1 == d2) {
        v = t.brackets[g].lower;  // refined below for the shared bracket
      } else if (upper_dir) {
        v = g == d1 ? lo1 : (g == d2 ? hi2 : (g > d2 ? t.brackets[g].upper : t.brackets[g].lower));
      } else {
        v = g == d1 ? hi1 : t.brackets[g].lower;
      }
      y.insert(y.end(), static_cast<std::size_t>(t.counts[g]), v);
    }
    if (d1 == d2 && k1 != k2 && upper_dir) {
      // Inside the shared bracket, put positions up to k1 at the lower
      // endpoint and the rest at the upper.
      const auto off = t.offsets();
      for (long long i = off[d1]; i < off[d1 + 1]; ++i)
        y[static_cast<std::size_t>(i)] = (i + 1 <= k1) ? lo1 : hi1;
    }
    return y;
  };
  out.argmin = build(false);
  if (std::isfinite(out.upper)) out.argmax = build(true);
  out.diag.distinct_values =
      std::max(distinct_value_count(out.argmin),
               out.argmax.empty() ? 0 : distinct_value_count(out.argmax));
  return out;
}

// ---------------------------------------------------------------------------
// Constrained grouped problems: the completion polytope.
//
// Variables are the n sorted sample positions. Rows carry the ordering chain,
// per-position bracket boxes, and any side constraints expanded onto the
// positions. Side information enters as mean-style rows (published totals,
// per-group means, cumulative-share points) or as raw coefficient rows.
// ---------------------------------------------------------------------------
struct sample_polyhedron {
  long long n = 0;
  std::vector<double> lo, hi;           // per-position bracket endpoints
  std::vector<lp_row> rows;             // everything, ready for the fractional solver
  std::size_t q_eq = 0, q_ineq = 0;     // side-constraint counts by relation
};

inline sample_polyhedron build_polyhedron(const grouped_table& t, const constraint_set& cs) {
  t.validate();
  sample_polyhedron p;
  p.n = t.n();
  const std::size_t n = static_cast<std::size_t>(p.n);
  const std::size_t d = t.groups();
  p.lo.resize(n);
  p.hi.resize(n);
  const auto off = t.offsets();
  for (std::size_t g = 0; g < d; ++g)
    for (long long i = off[g]; i < off[g + 1]; ++i) {
      p.lo[static_cast<std::size_t>(i)] = t.brackets[g].lower;
      p.hi[static_cast<std::size_t>(i)] = t.brackets[g].upper;
    }

  auto push = [&](std::vector<double> a, relation rel, double rhs) {
    p.rows.push_back(lp_row{std::move(a), rel, rhs});
  };

  // Ordering chain y_i <= y_{i+1}.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::vector<double> a(n, 0.0);
    a[i] = 1.0;
    a[i + 1] = -1.0;
    push(std::move(a), relation::le, 0.0);
  }
  // Bracket boxes as rows (the homogenized solver needs them as rows).
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> a(n, 0.0);
    a[i] = 1.0;
    push(a, relation::le, p.hi[i]);
    for (double& v : a) v = -v;
    push(std::move(a), relation::le, -p.lo[i]);
  }

  const double nn = static_cast<double>(p.n);
  for (const auto& c : cs) {
    std::vector<double> a(n, 0.0);
    double rhs = 0.0;
    switch (c.what) {
      case constraint::kind::total_mean:
        for (auto& v : a) v = 1.0 / nn;
        rhs = c.value;
        break;
      case constraint::kind::group_mean: {
        if (c.group < 1 || static_cast<std::size_t>(c.group) > d)
          throw bad_group_index_error("group index out of range in group-mean constraint");
        const std::size_t g = static_cast<std::size_t>(c.group - 1);
        if (t.counts[g] == 0)
          throw infeasible_error("group-mean constraint names a group with zero count");
        for (long long i = off[g]; i < off[g + 1]; ++i)
          a[static_cast<std::size_t>(i)] = 1.0 / static_cast<double>(t.counts[g]);
        rhs = c.value;
        break;
      }
      case constraint::kind::lorenz_point: {
        // Share of total income held by the first h groups equals (or
        // brackets) ell: sum_{first h} y (1-ell)/n - sum_{rest} y ell/n = 0.
        if (c.h < 1 || static_cast<std::size_t>(c.h) >= d)
          throw bad_group_index_error("cumulative-share point must name a proper group prefix");
        const double ell = c.value;
        for (std::size_t g = 0; g < d; ++g) {
          const double coef = g < static_cast<std::size_t>(c.h) ? (1.0 - ell) / nn : -ell / nn;
          for (long long i = off[g]; i < off[g + 1]; ++i) a[static_cast<std::size_t>(i)] = coef;
        }
        rhs = 0.0;
        break;
      }
      case constraint::kind::raw_row:
        if (c.coeffs.size() != n)
          throw index_range_error("raw constraint row length does not match the sample size");
        a = c.coeffs;
        rhs = c.rhs;
        break;
    }
    relation rel = c.rel;
    if (rel == relation::ge) {
      for (double& v : a) v = -v;
      rhs = -rhs;
      rel = relation::le;
    }
    if (rel == relation::eq)
      ++p.q_eq;
    else
      ++p.q_ineq;
    push(std::move(a), rel, rhs);
  }
  return p;
}

namespace detail1 {

inline linear_fractional_program make_lfp(const sample_polyhedron& p,
                                          std::vector<double> r1, std::vector<double> r2) {
  linear_fractional_program q;
  q.nvars = static_cast<int>(p.n);
  q.r1 = std::move(r1);
  q.r2 = std::move(r2);
  q.rows = p.rows;
  q.nonneg.assign(static_cast<std::size_t>(q.nvars), 0);
  for (std::size_t i = 0; i < q.nonneg.size(); ++i) q.nonneg[i] = p.lo[i] >= 0.0 ? 1 : 0;
  return q;
}

inline void note_vertex_complexity(bounds_result& out, const sample_polyhedron& p,
                                   std::size_t d, std::size_t slack) {
  const int cap = static_cast<int>(p.q_eq + p.q_ineq + 2 * d + slack);
  int distinct = 0;
  if (!out.argmin.empty()) distinct = std::max(distinct, distinct_value_count(out.argmin));
  if (!out.argmax.empty()) distinct = std::max(distinct, distinct_value_count(out.argmax));
  out.diag.distinct_values = distinct;
  if (distinct > cap)
    out.diag.warn("optimal completion uses " + std::to_string(distinct) +
                  " distinct values, above the vertex cap of " + std::to_string(cap));
}

}  // namespace detail1

// ---------------------------------------------------------------------------
// Hoover bounds on a completion polytope. |y_i - mean| is linearized by
// conditioning on how many positions sit at or below the mean: for each split
// k the objective is linear over the subpolytope where y_k <= mean <= y_{k+1},
// and each conditioned piece is a linear-fractional program. Infeasible
// pieces are skipped; the bounds are the extremes across pieces.
// ---------------------------------------------------------------------------
inline bounds_result hoover_bounds(const grouped_table& t, const constraint_set& cs = {}) {
  const sample_polyhedron base = build_polyhedron(t, cs);
  const std::size_t n = static_cast<std::size_t>(base.n);
  const double nn = static_cast<double>(base.n);

  bounds_result out;
  out.lower = kInf;
  out.upper = -kInf;
  bool any = false;
  for (std::size_t k = 0; k <= n; ++k) {
    sample_polyhedron p = base;
    if (k >= 1) {
      // y_k <= mean
      std::vector<double> a(n, -1.0 / nn);
      a[k - 1] += 1.0;
      p.rows.push_back(lp_row{std::move(a), relation::le, 0.0});
    }
    if (k <= n - 1) {
      // mean <= y_{k+1}
      std::vector<double> a(n, 1.0 / nn);
      a[k] -= 1.0;
      p.rows.push_back(lp_row{std::move(a), relation::le, 0.0});
    }
    std::vector<double> r1(n), r2(n, 2.0);
    const double base_c = (2.0 * static_cast<double>(k) - nn) / nn;
    for (std::size_t i = 0; i < n; ++i) r1[i] = base_c + (i + 1 > k ? 1.0 : -1.0);
    auto q = detail1::make_lfp(p, std::move(r1), std::move(r2));
    for (bool maximize : {false, true}) {
      lfp_solution sol;
      try {
        sol = solve_lfp(q, maximize);
      } catch (const infeasible_error&) {
        ++out.diag.skipped_subproblems;
        continue;
      }
      any = true;
      if (maximize) {
        if (sol.value > out.upper) {
          out.upper = sol.value;
          out.argmax = sol.y;
        }
      } else {
        if (sol.value < out.lower) {
          out.lower = sol.value;
          out.argmin = sol.y;
        }
      }
    }
  }
  if (!any) throw infeasible_error("no mean split admits a feasible completion");
  detail1::note_vertex_complexity(out, base, t.groups(), 2);
  return out;
}

// ---------------------------------------------------------------------------
// Constrained bounds for Gini and quantile ratio via the homogenized solver.
// Hoover routes through its conditioned pieces above.
// ---------------------------------------------------------------------------
inline bounds_result bounds_1b(const grouped_table& t, const constraint_set& cs,
                               const index_spec& spec) {
  if (spec.kind == index_kind::hoover) return hoover_bounds(t, cs);
  const sample_polyhedron p = build_polyhedron(t, cs);
  const std::size_t n = static_cast<std::size_t>(p.n);
  const double nn = static_cast<double>(p.n);

  std::vector<double> r1(n), r2(n);
  if (spec.kind == index_kind::gini) {
    for (std::size_t i = 0; i < n; ++i) {
      r1[i] = 2.0 * static_cast<double>(i + 1) - nn - 1.0;
      r2[i] = nn;
    }
  } else {
    if (!(spec.tau1 > 0.0 && spec.tau1 < spec.tau2 && spec.tau2 < 1.0))
      throw index_range_error("quantile levels must satisfy 0 < tau1 < tau2 < 1");
    const long long k1 = quantile_position(spec.tau1, p.n);
    const long long k2 = quantile_position(spec.tau2, p.n);
    if (k1 < 1) throw index_range_error("lower quantile position underflows the sample");
    std::fill(r1.begin(), r1.end(), 0.0);
    std::fill(r2.begin(), r2.end(), 0.0);
    r1[static_cast<std::size_t>(k2 - 1)] = 1.0;
    r2[static_cast<std::size_t>(k1 - 1)] = 1.0;
  }

  auto q = detail1::make_lfp(p, std::move(r1), std::move(r2));
  bounds_result out;
  for (bool maximize : {false, true}) {
    const lfp_solution sol = solve_lfp(q, maximize);
    if (maximize) {
      out.upper = sol.value;
      out.argmax = sol.y;
    } else {
      out.lower = sol.value;
      out.argmin = sol.y;
    }
  }
  detail1::note_vertex_complexity(out, p, t.groups(), 0);
  return out;
}

}  // namespace ineq
