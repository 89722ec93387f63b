#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ineq/common.hpp"
#include "ineq/data.hpp"

namespace ineq {

// Gini coefficient of a sorted sample:
//   G = sum_i (2i - n - 1) y_i / (n^2 ybar)   with i = 1..n ascending.
// Equals the mean absolute difference between all pairs divided by 2*ybar.
inline double gini(const sorted_sample& s) {
  const std::size_t n = s.n();
  if (n == 0) throw empty_sample_error("gini of an empty sample");
  double sum = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += s.values[i];
    weighted += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * s.values[i];
  }
  if (!(sum > 0.0)) throw nonpositive_mean_error();
  return weighted / (static_cast<double>(n) * sum);
}

// Hoover (Robin Hood) index: half the mean absolute deviation from the mean,
// relative to the mean. Always <= Gini.
inline double hoover(const sorted_sample& s) {
  const std::size_t n = s.n();
  if (n == 0) throw empty_sample_error("hoover of an empty sample");
  const double sum = std::accumulate(s.values.begin(), s.values.end(), 0.0);
  if (!(sum > 0.0)) throw nonpositive_mean_error();
  const double ybar = sum / static_cast<double>(n);
  double dev = 0.0;
  for (double y : s.values) dev += std::fabs(y - ybar);
  return dev / (2.0 * static_cast<double>(n) * ybar);
}

// Position of the tau-quantile in a sorted sample of size n, 1-based.
// The small nudge absorbs binary representation of decimal tau.
inline long long quantile_position(double tau, std::size_t n) {
  return static_cast<long long>(std::floor(tau * static_cast<double>(n) + 1e-9));
}

// Ratio of two sample quantiles, y_{floor(tau2 n)} / y_{floor(tau1 n)}.
// Conventions: 0/0 -> 1, positive/0 -> +inf.
inline double quantile_ratio(const sorted_sample& s, double tau1, double tau2) {
  const std::size_t n = s.n();
  if (n == 0) throw empty_sample_error("quantile ratio of an empty sample");
  if (!(0.0 < tau1 && tau1 < tau2 && tau2 < 1.0))
    throw index_range_error("quantile ratio needs 0 < tau1 < tau2 < 1");
  const long long k1 = quantile_position(tau1, n);
  const long long k2 = quantile_position(tau2, n);
  if (k1 < 1)
    throw index_range_error("tau1 quantile falls before the first observation");
  const double lo = s.values[static_cast<std::size_t>(k1 - 1)];
  const double hi = s.values[static_cast<std::size_t>(k2 - 1)];
  if (lo == 0.0) return hi == 0.0 ? 1.0 : kInf;
  return hi / lo;
}

inline double evaluate_index(const index_spec& spec, const sorted_sample& s) {
  switch (spec.kind) {
    case index_kind::gini: return gini(s);
    case index_kind::quantile_ratio: return quantile_ratio(s, spec.tau1, spec.tau2);
    case index_kind::hoover: return hoover(s);
  }
  throw index_range_error("unknown index");
}

// Gini of a discrete distribution given by (value, mass) pairs; masses need
// not be normalized. Used by the corner-share forms and weighted resampling.
inline double mass_gini(std::vector<double> values, std::vector<double> masses) {
  if (values.size() != masses.size() || values.empty())
    throw empty_sample_error("mass gini needs matching nonempty value/mass vectors");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  double total = 0.0;
  for (double m : masses) total += m;
  if (!(total > 0.0)) throw nonpositive_mean_error("mass gini with nonpositive total mass");

  // sum_{i<j} m_i m_j (v_j - v_i) accumulated in one sorted pass.
  double cum_mass = 0.0, cum_mv = 0.0, pairs = 0.0, mean = 0.0;
  for (std::size_t k : idx) {
    const double v = values[k], m = masses[k] / total;
    pairs += m * (v * cum_mass - cum_mv);
    cum_mass += m;
    cum_mv += m * v;
    mean += m * v;
  }
  if (!(mean > 0.0)) throw nonpositive_mean_error("mass gini with nonpositive mean");
  return pairs / mean;
}

// Weighted-sample Hoover, same (value, mass) convention.
inline double mass_hoover(const std::vector<double>& values, const std::vector<double>& masses) {
  if (values.size() != masses.size() || values.empty())
    throw empty_sample_error("mass hoover needs matching nonempty value/mass vectors");
  double total = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total += masses[i];
    sum += masses[i] * values[i];
  }
  if (!(total > 0.0) || !(sum > 0.0))
    throw nonpositive_mean_error("mass hoover with nonpositive mean");
  const double mean = sum / total;
  double dev = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) dev += masses[i] * std::fabs(values[i] - mean);
  return dev / (2.0 * sum);
}

}  // namespace ineq
