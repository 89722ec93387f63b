#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "common.hpp"
#include "data.hpp"
#include "scenario1.hpp"
#include "scenario2.hpp"

namespace ineq {

// ---------------------------------------------------------------------------
// Numerical delta-method bootstrap for bound endpoints.
//
// The bound endpoints are directionally differentiable but not smooth in the
// underlying shares, so the naive bootstrap of the plug-in estimator is not
// valid. Instead each replicate forms a damped perturbation of the empirical
// input,
//     input' = input + t_n * sqrt(n) * (resample - input),   t_n = n^(-a),
// re-solves the bounds there, and records the scaled difference
//     S* = (V(input') - V(input)) / t_n.
// With 0 < a < 1/2 the damping step t_n shrinks while t_n*sqrt(n) grows, so
// S* consistently estimates the root-n limit law of the endpoint. Standard
// errors are sd(S*)/sqrt(n); interval endpoints come either from the normal
// approximation or from the quantiles of S*/sqrt(n) around the point value.
// ---------------------------------------------------------------------------

enum class ci_method { normal, percentile };

struct bootstrap_options {
  int replicates = 1000;
  std::uint64_t seed = 1;
  double exponent = 0.25;   // damping step t_n = n^(-exponent)
  double level = 0.95;
  ci_method method = ci_method::normal;
  int threads = 1;
  // When a replicate's solve reports a degenerate system, its constraint
  // right-hand sides are re-drawn with an n^(-3/4) uniform jitter and the
  // solve retried. `jitter` forces that perturbation on from the start.
  bool jitter = false;
  // Called once per replicate so constraint values that are themselves
  // estimates can be re-drawn alongside the counts.
  std::function<void(constraint_set&, std::mt19937_64&)> resample_constraints;

  void validate() const {
    if (replicates < 1) throw index_range_error("replicate count must be positive");
    if (!(exponent > 0.0 && exponent < 0.5))
      throw index_range_error("damping exponent must lie in (0, 0.5)");
    if (!(level > 0.0 && level < 1.0))
      throw index_range_error("confidence level must lie in (0, 1)");
  }
};

struct bootstrap_result {
  double point_lower = 0.0, point_upper = 0.0;
  double se_lower = 0.0, se_upper = 0.0, se_width = 0.0;

  // Headline intervals follow options.method; both families are always filled.
  std::pair<double, double> ci_lower{0.0, 0.0}, ci_upper{0.0, 0.0};
  std::pair<double, double> ci_normal_lower{0.0, 0.0}, ci_normal_upper{0.0, 0.0};
  std::pair<double, double> ci_percentile_lower{0.0, 0.0}, ci_percentile_upper{0.0, 0.0};

  // Scaled replicate draws S*, in replicate order.
  std::vector<double> draws_lower, draws_upper;

  std::size_t sample_size = 0;
  double level = 0.95;
  double t_n = 0.0;
  long long attempts = 0;    // resampling attempts, including redraws
  long long failures = 0;    // attempts discarded as infeasible or degenerate
  long long jittered = 0;    // replicates that needed a jittered re-solve
  double failure_rate = 0.0;
  std::vector<std::string> warnings;
};

struct width_statistics_result {
  double width = 0.0;
  double se_width = 0.0;
  std::pair<double, double> ci_normal{0.0, 0.0};
  std::pair<double, double> ci_percentile{0.0, 0.0};
};

namespace detail_boot {

// A replicate that keeps drawing infeasible inputs is abandoned after this
// many tries, which caps the total attempt count at 10x the replicate count.
constexpr int kAttemptsPerReplicate = 10;

inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Engines are derived per (replicate, attempt), so results do not depend on
// how replicates are spread over threads.
inline std::mt19937_64 replicate_engine(std::uint64_t seed, int replicate, int attempt) {
  std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(replicate + 1));
  s = mix64(s + static_cast<std::uint64_t>(attempt));
  return std::mt19937_64(s);
}

inline double sample_sd(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

// Quantile with linear interpolation between order statistics (the common
// statistical-package default). Input must be sorted.
inline double quantile_sorted(const std::vector<double>& v, double p) {
  if (v.empty()) return 0.0;
  const double h = p * static_cast<double>(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= v.size()) return v.back();
  const double frac = h - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

// Inverse standard normal CDF: rational initial guess refined with one Halley
// step against erfc, accurate to close to machine precision.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw index_range_error("normal quantile needs a probability strictly inside (0, 1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double err = 0.5 * std::erfc(-x * 0.70710678118654752) - p;
  const double u = err * 2.5066282746310002 * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

inline std::vector<long long> multinomial_draw(const std::vector<double>& shares, long long n,
                                               std::mt19937_64& g) {
  const std::size_t d = shares.size();
  std::vector<double> cum(d);
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    acc += shares[i];
    cum[i] = acc;
  }
  std::vector<long long> counts(d, 0);
  for (long long k = 0; k < n; ++k) {
    const double u = uniform01(g) * acc;
    std::size_t i = 0;
    while (i + 1 < d && u >= cum[i]) ++i;
    ++counts[i];
  }
  return counts;
}

// Apportion n units to groups proportionally to the given nonnegative
// weights, leftovers going to the largest remainders (ties by group order).
inline std::vector<long long> round_to_counts(const std::vector<double>& weights, long long n) {
  const std::size_t d = weights.size();
  double tot = 0.0;
  for (double w : weights) tot += w;
  std::vector<long long> counts(d, 0);
  std::vector<std::pair<double, std::size_t>> rem(d);
  long long assigned = 0;
  for (std::size_t i = 0; i < d; ++i) {
    const double target = weights[i] / tot * static_cast<double>(n);
    const double fl = std::floor(target);
    counts[i] = static_cast<long long>(fl);
    assigned += counts[i];
    rem[i] = {target - fl, i};
  }
  std::sort(rem.begin(), rem.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  for (long long k = n - assigned; k > 0; --k) ++counts[rem[static_cast<std::size_t>(k - 1)].second];
  return counts;
}

inline void apply_jitter(constraint_set& cs, double scale, std::mt19937_64& g) {
  for (auto& c : cs) {
    const double delta = scale * (2.0 * uniform01(g) - 1.0);
    if (c.what == constraint::kind::raw_row)
      c.rhs += delta;
    else
      c.value += delta;
  }
}

struct replicate_outcome {
  double lo = 0.0, hi = 0.0;
  int attempts = 0;
  int failures = 0;
  bool jittered = false;
};

template <class Eval>
inline std::vector<replicate_outcome> run_replicates(int count, int threads, const Eval& eval) {
  std::vector<replicate_outcome> out(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= count) return;
      try {
        out[static_cast<std::size_t>(r)] = eval(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int pool_size = std::min(std::max(1, threads), count);
  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(pool_size));
    for (int i = 0; i < pool_size; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

inline void finalize(bootstrap_result& res, const std::vector<replicate_outcome>& reps,
                     const bootstrap_options& opt) {
  const std::size_t count = reps.size();
  res.draws_lower.resize(count);
  res.draws_upper.resize(count);
  for (std::size_t r = 0; r < count; ++r) {
    res.draws_lower[r] = (reps[r].lo - res.point_lower) / res.t_n;
    res.draws_upper[r] = (reps[r].hi - res.point_upper) / res.t_n;
    res.attempts += reps[r].attempts;
    res.failures += reps[r].failures;
    if (reps[r].jittered) ++res.jittered;
  }
  res.failure_rate =
      res.attempts > 0 ? static_cast<double>(res.failures) / static_cast<double>(res.attempts) : 0.0;

  const double root_n = std::sqrt(static_cast<double>(res.sample_size));
  res.se_lower = sample_sd(res.draws_lower) / root_n;
  res.se_upper = sample_sd(res.draws_upper) / root_n;

  const double z = normal_quantile(1.0 - (1.0 - opt.level) / 2.0);
  res.ci_normal_lower = {res.point_lower - z * res.se_lower, res.point_lower + z * res.se_lower};
  res.ci_normal_upper = {res.point_upper - z * res.se_upper, res.point_upper + z * res.se_upper};

  const double plo = (1.0 - opt.level) / 2.0;
  const double phi = 1.0 - plo;
  std::vector<double> sorted = res.draws_lower;
  std::sort(sorted.begin(), sorted.end());
  res.ci_percentile_lower = {res.point_lower + quantile_sorted(sorted, plo) / root_n,
                             res.point_lower + quantile_sorted(sorted, phi) / root_n};
  sorted = res.draws_upper;
  std::sort(sorted.begin(), sorted.end());
  res.ci_percentile_upper = {res.point_upper + quantile_sorted(sorted, plo) / root_n,
                             res.point_upper + quantile_sorted(sorted, phi) / root_n};

  res.ci_lower = opt.method == ci_method::normal ? res.ci_normal_lower : res.ci_percentile_lower;
  res.ci_upper = opt.method == ci_method::normal ? res.ci_normal_upper : res.ci_percentile_upper;

  std::vector<double> widths(count);
  for (std::size_t r = 0; r < count; ++r) widths[r] = res.draws_upper[r] - res.draws_lower[r];
  res.se_width = sample_sd(widths) / root_n;

  if (res.failures > 0)
    res.warnings.push_back(std::to_string(res.failures) + " of " + std::to_string(res.attempts) +
                           " resampling attempts were infeasible and redrawn");
  if (res.jittered > 0)
    res.warnings.push_back("degenerate solves on " + std::to_string(res.jittered) +
                           " replicates were retried with jittered constraint values");
}

}  // namespace detail_boot

// Bracket-and-count data: replicates redraw the group counts from the
// empirical shares at fixed n. With side constraints (or a non-Gini index)
// the perturbed shares are apportioned back to an integer table and the
// constrained solver re-run; the plain Gini case evaluates the share
// functional directly.
inline bootstrap_result bootstrap_bounds_1(const grouped_table& t, const index_spec& spec,
                                           const constraint_set& cs = {},
                                           const bootstrap_options& opt = {}) {
  opt.validate();
  t.validate();
  const std::size_t d = t.groups();
  const auto n = t.n();
  const double nd = static_cast<double>(n);

  bootstrap_result res;
  res.sample_size = static_cast<std::size_t>(n);
  res.level = opt.level;
  res.t_n = std::pow(nd, -opt.exponent);
  const double step = res.t_n * std::sqrt(nd);
  const double jitter_scale = std::pow(nd, -0.75);

  const auto phat = t.shares();
  std::vector<double> lo(d), hi(d);
  for (std::size_t g = 0; g < d; ++g) {
    lo[g] = t.brackets[g].lower;
    hi[g] = t.brackets[g].upper;
  }

  const bool share_path = spec.kind == index_kind::gini && cs.empty();
  if (share_path) {
    const auto vb = corner_share_gini_bounds(lo, hi, phat);
    res.point_lower = vb.first;
    res.point_upper = vb.second;
  } else {
    const auto vb = bounds_1b(t, cs, spec);
    res.point_lower = vb.lower;
    res.point_upper = vb.upper;
  }

  auto eval = [&](int r) {
    detail_boot::replicate_outcome outc;
    for (int attempt = 0; attempt < detail_boot::kAttemptsPerReplicate; ++attempt) {
      ++outc.attempts;
      auto rng = detail_boot::replicate_engine(opt.seed, r, attempt);
      const auto cstar = detail_boot::multinomial_draw(phat, n, rng);
      std::vector<double> pert(d);
      double tot = 0.0;
      for (std::size_t g = 0; g < d; ++g) {
        const double pstar = static_cast<double>(cstar[g]) / nd;
        pert[g] = std::max(0.0, phat[g] + step * (pstar - phat[g]));
        tot += pert[g];
      }
      if (!(tot > 0.0)) {
        ++outc.failures;
        continue;
      }
      try {
        if (share_path) {
          const auto vb = corner_share_gini_bounds(lo, hi, pert);
          outc.lo = vb.first;
          outc.hi = vb.second;
        } else {
          grouped_table tp{t.brackets, detail_boot::round_to_counts(pert, n)};
          constraint_set local = cs;
          if (opt.resample_constraints) opt.resample_constraints(local, rng);
          if (opt.jitter && !local.empty()) {
            detail_boot::apply_jitter(local, jitter_scale, rng);
            outc.jittered = true;
          }
          try {
            const auto vb = bounds_1b(tp, local, spec);
            outc.lo = vb.lower;
            outc.hi = vb.upper;
          } catch (const error& e) {
            if (e.cls() != error_class::numerical || local.empty() || opt.jitter) throw;
            detail_boot::apply_jitter(local, jitter_scale, rng);
            outc.jittered = true;
            const auto vb = bounds_1b(tp, local, spec);
            outc.lo = vb.lower;
            outc.hi = vb.upper;
          }
        }
        return outc;
      } catch (const error& e) {
        if (e.cls() == error_class::config) throw;
        ++outc.failures;
      }
    }
    throw resample_error("a replicate stayed infeasible after " +
                         std::to_string(detail_boot::kAttemptsPerReplicate) +
                         " redraws; the attempt budget is exhausted");
  };

  const auto reps = detail_boot::run_replicates(opt.replicates, opt.threads, eval);
  detail_boot::finalize(res, reps, opt);
  return res;
}

// Interval data: replicates resample units with replacement, so interval
// endpoints and point values are perturbed jointly. The damped resample
// acts through per-unit weights 1 + t_n*sqrt(n)*(c_i - 1), clamped at zero,
// where c_i counts how often unit i was drawn.
inline bootstrap_result bootstrap_bounds_2(const interval_sample& s,
                                           const bootstrap_options& opt = {}) {
  opt.validate();
  s.validate();
  const std::size_t n = s.n();
  const double nd = static_cast<double>(n);
  const auto lat = build_lattice(s);

  bootstrap_result res;
  res.sample_size = n;
  res.level = opt.level;
  res.t_n = std::pow(nd, -opt.exponent);
  const double step = res.t_n * std::sqrt(nd);

  const std::vector<double> ones(n, 1.0);
  const auto pb = gini_bounds_2_weighted(s, ones, &lat);
  res.point_lower = pb.lower;
  res.point_upper = pb.upper;

  auto eval = [&](int r) {
    detail_boot::replicate_outcome outc;
    std::vector<long long> counts(n);
    std::vector<double> w(n);
    for (int attempt = 0; attempt < detail_boot::kAttemptsPerReplicate; ++attempt) {
      ++outc.attempts;
      auto rng = detail_boot::replicate_engine(opt.seed, r, attempt);
      std::fill(counts.begin(), counts.end(), 0LL);
      for (std::size_t k = 0; k < n; ++k) {
        auto i = static_cast<std::size_t>(detail_boot::uniform01(rng) * nd);
        if (i >= n) i = n - 1;
        ++counts[i];
      }
      double tot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::max(0.0, 1.0 + step * (static_cast<double>(counts[i]) - 1.0));
        tot += w[i];
      }
      if (!(tot > 0.0)) {
        ++outc.failures;
        continue;
      }
      try {
        const auto vb = gini_bounds_2_weighted(s, w, &lat);
        outc.lo = vb.lower;
        outc.hi = vb.upper;
        return outc;
      } catch (const error& e) {
        if (e.cls() == error_class::config) throw;
        ++outc.failures;
      }
    }
    throw resample_error("a replicate stayed infeasible after " +
                         std::to_string(detail_boot::kAttemptsPerReplicate) +
                         " redraws; the attempt budget is exhausted");
  };

  const auto reps = detail_boot::run_replicates(opt.replicates, opt.threads, eval);
  detail_boot::finalize(res, reps, opt);
  return res;
}

// Interval statistics for the width upper - lower, from the retained draws.
inline width_statistics_result width_statistics(const bootstrap_result& r) {
  width_statistics_result w;
  w.width = r.point_upper - r.point_lower;
  const std::size_t count = r.draws_lower.size();
  std::vector<double> diffs(count);
  for (std::size_t i = 0; i < count; ++i) diffs[i] = r.draws_upper[i] - r.draws_lower[i];
  const double root_n = std::sqrt(static_cast<double>(r.sample_size));
  w.se_width = detail_boot::sample_sd(diffs) / root_n;
  const double z = detail_boot::normal_quantile(1.0 - (1.0 - r.level) / 2.0);
  w.ci_normal = {w.width - z * w.se_width, w.width + z * w.se_width};
  std::sort(diffs.begin(), diffs.end());
  const double plo = (1.0 - r.level) / 2.0;
  w.ci_percentile = {w.width + detail_boot::quantile_sorted(diffs, plo) / root_n,
                     w.width + detail_boot::quantile_sorted(diffs, 1.0 - plo) / root_n};
  return w;
}

}  // namespace ineq
