#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ineq/common.hpp"
#include "ineq/data.hpp"
#include "ineq/indices.hpp"

namespace ineq {

enum class impute_method { drop, mean, midpoint, hot_deck, hot_deck_multi };

inline const char* impute_method_name(impute_method m) {
  switch (m) {
    case impute_method::drop: return "drop";
    case impute_method::mean: return "mean";
    case impute_method::midpoint: return "midpoint";
    case impute_method::hot_deck: return "hot_deck";
    case impute_method::hot_deck_multi: return "hot_deck_multi";
  }
  return "?";
}

struct baseline_options {
  impute_method method = impute_method::midpoint;
  int imputations = 5;        // hot_deck_multi only
  std::uint64_t seed = 1;
};

struct baseline_estimate {
  double gini = 0.0;
  std::string method;
  int imputations = 1;
  std::uint64_t seed = 0;
  int donor_fallbacks = 0;    // intervals with no interior donor
};

namespace detail {

// Point observations lying inside [lo, hi]; empty result means fall back to
// the full donor pool.
inline std::vector<double> donors_inside(const std::vector<double>& points, double lo, double hi) {
  std::vector<double> d;
  for (double p : points)
    if (lo <= p && p <= hi) d.push_back(p);
  return d;
}

}  // namespace detail

// Conventional single-number Gini estimates that ignore the identification
// problem. They anchor comparisons: the bounds machinery should bracket the
// midpoint and hot-deck numbers on reasonable data.
inline baseline_estimate baseline_gini(const interval_sample& data, const baseline_options& opt) {
  data.validate();
  const auto points = data.points();

  baseline_estimate out;
  out.method = impute_method_name(opt.method);
  out.seed = opt.seed;

  switch (opt.method) {
    case impute_method::drop: {
      if (points.empty()) throw no_point_data_error("drop: no point observations to keep");
      out.gini = gini(sorted_sample::of(points));
      return out;
    }
    case impute_method::mean: {
      if (points.empty()) throw no_point_data_error("mean imputation: no point donors");
      const double overall =
          std::accumulate(points.begin(), points.end(), 0.0) / static_cast<double>(points.size());
      std::vector<double> filled;
      for (const auto& o : data.obs) {
        if (o.is_point()) {
          filled.push_back(o.lower);
          continue;
        }
        const auto inside = detail::donors_inside(points, o.lower, o.upper);
        if (inside.empty()) {
          ++out.donor_fallbacks;
          filled.push_back(overall);
        } else {
          filled.push_back(std::accumulate(inside.begin(), inside.end(), 0.0) /
                           static_cast<double>(inside.size()));
        }
      }
      out.gini = gini(sorted_sample::of(std::move(filled)));
      return out;
    }
    case impute_method::midpoint: {
      std::vector<double> filled;
      for (const auto& o : data.obs) filled.push_back(0.5 * (o.lower + o.upper));
      out.gini = gini(sorted_sample::of(std::move(filled)));
      return out;
    }
    case impute_method::hot_deck:
    case impute_method::hot_deck_multi: {
      if (points.empty()) throw no_point_data_error("hot deck: no point donors");
      const int m = opt.method == impute_method::hot_deck ? 1 : std::max(1, opt.imputations);
      out.imputations = m;
      std::mt19937_64 rng(opt.seed);
      double acc = 0.0;
      for (int rep = 0; rep < m; ++rep) {
        std::vector<double> filled;
        for (const auto& o : data.obs) {
          if (o.is_point()) {
            filled.push_back(o.lower);
            continue;
          }
          auto pool = detail::donors_inside(points, o.lower, o.upper);
          if (pool.empty()) {
            if (rep == 0) ++out.donor_fallbacks;
            pool = points;
          }
          std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
          filled.push_back(pool[pick(rng)]);
        }
        acc += gini(sorted_sample::of(std::move(filled)));
      }
      out.gini = acc / static_cast<double>(m);
      return out;
    }
  }
  throw index_range_error("unknown imputation method");
}

}  // namespace ineq
