#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ineq/common.hpp"

namespace ineq {

// One coarsened observation: a closed interval [lower, upper]. lower == upper
// is a fully observed point.
struct interval_obs {
  double lower = 0.0;
  double upper = 0.0;

  bool is_point() const { return lower == upper; }
  double width() const { return upper - lower; }
  bool contains(double v) const { return lower <= v && v <= upper; }
};

// Per-unit interval data (possibly overlapping), points included.
struct interval_sample {
  std::vector<interval_obs> obs;

  std::size_t n() const { return obs.size(); }

  std::size_t interval_count() const {
    std::size_t k = 0;
    for (const auto& o : obs)
      if (!o.is_point()) ++k;
    return k;
  }

  std::vector<double> points() const {
    std::vector<double> p;
    for (const auto& o : obs)
      if (o.is_point()) p.push_back(o.lower);
    return p;
  }

  std::vector<interval_obs> intervals() const {
    std::vector<interval_obs> q;
    for (const auto& o : obs)
      if (!o.is_point()) q.push_back(o);
    return q;
  }

  void validate() const {
    if (obs.empty()) throw empty_sample_error("interval sample is empty");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      if (!(obs[i].lower <= obs[i].upper) || !std::isfinite(obs[i].lower) ||
          !std::isfinite(obs[i].upper))
        throw bad_bracket_error("observation " + std::to_string(i + 1) +
                                " has an invalid interval");
    }
  }
};

// Grouped frequency data: ordered brackets with counts. Brackets may touch
// (upper_d == lower_{d+1}) but must not overlap.
struct grouped_table {
  std::vector<interval_obs> brackets;
  std::vector<long long> counts;

  std::size_t groups() const { return brackets.size(); }

  long long n() const { return std::accumulate(counts.begin(), counts.end(), 0ll); }

  std::vector<double> shares() const {
    std::vector<double> s(counts.size());
    const double total = static_cast<double>(n());
    for (std::size_t d = 0; d < counts.size(); ++d) s[d] = static_cast<double>(counts[d]) / total;
    return s;
  }

  void validate() const {
    if (brackets.empty()) throw empty_sample_error("grouped table has no brackets");
    if (brackets.size() != counts.size())
      throw bad_bracket_error("bracket/count length mismatch");
    for (std::size_t d = 0; d < brackets.size(); ++d) {
      const auto& b = brackets[d];
      if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower <= b.upper))
        throw bad_bracket_error("bracket " + std::to_string(d + 1) + " is invalid");
      if (counts[d] < 0)
        throw negative_count_error("bracket " + std::to_string(d + 1) + " has a negative count");
      if (d + 1 < brackets.size() && brackets[d].upper > brackets[d + 1].lower)
        throw overlap_error("brackets " + std::to_string(d + 1) + " and " +
                            std::to_string(d + 2) + " overlap");
    }
    if (n() <= 0) throw empty_sample_error("grouped table has zero total count");
  }

  // First sorted position (0-based) belonging to each group, plus n at the end.
  std::vector<long long> offsets() const {
    std::vector<long long> off(counts.size() + 1, 0);
    for (std::size_t d = 0; d < counts.size(); ++d) off[d + 1] = off[d] + counts[d];
    return off;
  }

  // Group of the 0-based sorted position i.
  std::size_t group_of(long long i) const {
    long long cum = 0;
    for (std::size_t d = 0; d < counts.size(); ++d) {
      cum += counts[d];
      if (i < cum) return d;
    }
    return counts.size() - 1;
  }
};

// Values sorted ascending; the constructor enforces it.
struct sorted_sample {
  std::vector<double> values;

  static sorted_sample of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return sorted_sample{std::move(v)};
  }

  std::size_t n() const { return values.size(); }

  double mean() const {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
};

enum class index_kind { gini, quantile_ratio, hoover };

struct index_spec {
  index_kind kind = index_kind::gini;
  double tau1 = 0.5;   // quantile ratio only
  double tau2 = 0.9;

  static index_spec gini() { return {index_kind::gini, 0, 0}; }
  static index_spec hoover() { return {index_kind::hoover, 0, 0}; }
  static index_spec quantile_ratio(double t1, double t2) {
    return {index_kind::quantile_ratio, t1, t2};
  }

  std::string name() const {
    switch (kind) {
      case index_kind::gini: return "gini";
      case index_kind::quantile_ratio: return "quantile_ratio";
      case index_kind::hoover: return "hoover";
    }
    return "?";
  }
};

enum class relation { eq, le, ge };

// Side information attached to grouped data. Symbolic; expansion into rows
// over the sorted sample happens when a table is bound (group sizes needed).
struct constraint {
  enum class kind { total_mean, group_mean, lorenz_point, raw_row };

  kind what = kind::total_mean;
  relation rel = relation::eq;
  double value = 0.0;              // target mean or Lorenz ordinate
  int group = 0;                   // 1-based, group_mean only
  int h = 0;                       // 1-based cumulative group count, lorenz_point only
  std::vector<double> coeffs;      // raw_row only, length n at bind time
  double rhs = 0.0;                // raw_row only

  static constraint total_mean(double v, relation r = relation::eq) {
    constraint c;
    c.what = kind::total_mean;
    c.rel = r;
    c.value = v;
    return c;
  }
  static constraint group_mean(int group1, double v, relation r = relation::eq) {
    constraint c;
    c.what = kind::group_mean;
    c.rel = r;
    c.value = v;
    c.group = group1;
    return c;
  }
  static constraint lorenz_point(int h1, double ell) {
    constraint c;
    c.what = kind::lorenz_point;
    c.rel = relation::eq;
    c.value = ell;
    c.h = h1;
    return c;
  }
  static constraint raw_row(std::vector<double> a, double b, relation r) {
    constraint c;
    c.what = kind::raw_row;
    c.rel = r;
    c.coeffs = std::move(a);
    c.rhs = b;
    return c;
  }
};

using constraint_set = std::vector<constraint>;

struct diagnostics {
  int iterations = 0;
  bool exact_enumeration = true;
  int distinct_values = 0;
  std::vector<std::string> warnings;

  // Extras that tests and the JSON report may pick up.
  std::vector<double> bracket_widths;        // dyadic trace, upper-bound run
  std::vector<double> bracket_widths_lower;  // dyadic trace, lower-bound run
  double lambda_lower = 0.0;
  double lambda_upper = 0.0;
  double relaxed_lower = 0.0;           // continuous-share cross values, scenario 2
  double relaxed_upper = 0.0;
  bool has_relaxed = false;
  double agreement_gap = 0.0;
  std::string mode;
  int skipped_subproblems = 0;

  void warn(const std::string& w) { warnings.push_back(w); }
};

struct bounds_result {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> argmin;   // an allocation attaining lower
  std::vector<double> argmax;   // an allocation attaining upper
  diagnostics diag;

  double width() const { return upper - lower; }
};

}  // namespace ineq
