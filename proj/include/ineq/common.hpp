#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ineq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Floor for the homogenizing variable in ratio-to-linear transforms, and the
// stricter post-solve threshold below which the denominator is declared
// degenerate.
inline constexpr double kHomogFloor = 1e-12;
inline constexpr double kHomogDegenerate = 1e-10;

// Absolute tolerance for comparisons on mean-normalized quantities.
inline constexpr double kTolNormalized = 1e-9;

// Relative tolerance used when merging nearly equal solution values.
inline constexpr double kTolMerge = 1e-7;

// Error classes map onto process exit codes: config/parse 1, identification
// or feasibility 2, numerical 3.
enum class error_class { config = 1, infeasible = 2, numerical = 3 };

class error : public std::runtime_error {
public:
  error(error_class cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  error_class cls() const { return cls_; }

private:
  error_class cls_;
};

struct empty_sample_error : error {
  explicit empty_sample_error(const std::string& w = "empty sample") : error(error_class::config, w) {}
};

struct nonpositive_mean_error : error {
  explicit nonpositive_mean_error(const std::string& w = "sample mean is not positive")
      : error(error_class::infeasible, w) {}
};

struct index_range_error : error {
  explicit index_range_error(const std::string& w) : error(error_class::config, w) {}
};

struct quantile_boundary_error : error {
  explicit quantile_boundary_error(const std::string& w)
      : error(error_class::infeasible, w) {}
};

struct bad_bracket_error : error {
  explicit bad_bracket_error(const std::string& w) : error(error_class::config, w) {}
};

struct overlap_error : error {
  explicit overlap_error(const std::string& w) : error(error_class::config, w) {}
};

struct negative_count_error : error {
  explicit negative_count_error(const std::string& w) : error(error_class::config, w) {}
};

struct parse_error : error {
  parse_error(std::size_t line, std::size_t column, const std::string& w)
      : error(error_class::config,
              "parse error at line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ": " + w),
        line(line), column(column) {}
  std::size_t line;
  std::size_t column;
};

struct unknown_kind_error : error {
  explicit unknown_kind_error(const std::string& w) : error(error_class::config, w) {}
};

struct bad_group_index_error : error {
  explicit bad_group_index_error(const std::string& w) : error(error_class::config, w) {}
};

struct no_point_data_error : error {
  explicit no_point_data_error(const std::string& w = "method needs at least one point observation")
      : error(error_class::config, w) {}
};

struct infeasible_error : error {
  explicit infeasible_error(const std::string& w, std::vector<int> rows = {},
                            double residual = 0.0)
      : error(error_class::infeasible, w), violated_rows(std::move(rows)),
        residual(residual) {}
  // Phase-one certificate: rows still carrying artificial mass, and how much.
  std::vector<int> violated_rows;
  double residual = 0.0;
};

struct degenerate_denominator_error : error {
  explicit degenerate_denominator_error(const std::string& w = "ratio denominator can reach zero")
      : error(error_class::numerical, w) {}
};

struct stalled_error : error {
  explicit stalled_error(const std::string& w = "root search hit its iteration cap")
      : error(error_class::numerical, w) {}
};

struct numerical_error : error {
  explicit numerical_error(const std::string& w) : error(error_class::numerical, w) {}
};

struct resample_error : error {
  explicit resample_error(const std::string& w) : error(error_class::infeasible, w) {}
};

// Count distinct values after merging anything closer than tol*(1+|v|).
inline int distinct_value_count(std::vector<double> v, double tol = kTolMerge) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  int distinct = 1;
  double anchor = v.front();
  for (double x : v) {
    if (x - anchor > tol * (1.0 + std::fabs(anchor))) {
      ++distinct;
      anchor = x;
    }
  }
  return distinct;
}

inline bool nearly_equal(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

// splitmix64; used to derive independent per-replicate seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace ineq
