#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "data.hpp"
#include "bootstrap.hpp"
#include "imputation.hpp"

namespace ineq {

// ---------------------------------------------------------------------------
// File formats.
//
// Interval CSV:   header "lower,upper", one observation per row. An empty
//                 upper field marks an unbounded top interval; it is replaced
//                 by multiplier x the largest finite endpoint in the file.
// Grouped CSV:    header "lower,upper,count", brackets in ascending order.
//                 The same empty-upper convention applies to the top bracket.
// Constraint JSON: array of rows {"kind": ..., "relation": ..., ...}.
//
// Result emission is hand-rolled so identical runs produce byte-identical
// output: fixed key order, floats at 17 significant digits, infinities as
// the strings "inf" / "-inf".
// ---------------------------------------------------------------------------

namespace detail_io {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline double parse_number(const std::string& field, std::size_t line, std::size_t column) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw parse_error(line, column, "expected a number, got '" + field + "'");
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error(0, 0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Lines of the file with 1-based numbering, tolerating trailing newlines and
// CRLF endings.
inline std::vector<std::string> read_lines(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail_io

enum class data_shape { auto_detect, intervals, grouped };

struct ingest_result {
  data_shape shape = data_shape::intervals;   // what the file turned out to be
  interval_sample intervals;
  grouped_table grouped;
  std::vector<std::string> notes;             // top-coding and other adjustments
};

// Reads either file format. `shape` forces one; auto-detection keys on the
// presence of a `count` column in the header.
inline ingest_result ingest(const std::string& path, data_shape shape = data_shape::auto_detect,
                            double top_code_multiplier = 2.0) {
  if (!(top_code_multiplier > 1.0))
    throw index_range_error("top-code multiplier must exceed 1");
  const auto lines = detail_io::read_lines(path);
  if (lines.empty()) throw parse_error(1, 1, "file is empty");

  const auto header = detail_io::split_fields(lines[0]);
  const bool has_count = [&] {
    for (const auto& h : header)
      if (h == "count") return true;
    return false;
  }();
  bool grouped;
  if (shape == data_shape::auto_detect) {
    grouped = has_count;
  } else {
    grouped = shape == data_shape::grouped;
    if (grouped && !has_count)
      throw parse_error(1, 1, "grouped data needs a 'count' column");
  }
  if (header.empty() || header[0] != "lower" || header.size() < 2 || header[1] != "upper")
    throw parse_error(1, 1, "header must start with 'lower,upper'");
  if (grouped && (header.size() != 3 || header[2] != "count"))
    throw parse_error(1, 1, "grouped header must be 'lower,upper,count'");
  if (!grouped && header.size() != 2)
    throw parse_error(1, 1, "interval header must be 'lower,upper'");

  ingest_result out;
  out.shape = grouped ? data_shape::grouped : data_shape::intervals;

  struct raw_row {
    double lower = 0.0;
    double upper = 0.0;
    bool open_top = false;
    long long count = 0;
    std::size_t line = 0;
  };
  std::vector<raw_row> rows;
  double largest_finite = -kInf;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (detail_io::trim(lines[li]).empty()) continue;
    const auto fields = detail_io::split_fields(lines[li]);
    if (fields.size() != header.size())
      throw parse_error(li + 1, 1,
                        "expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    raw_row r;
    r.line = li + 1;
    r.lower = detail_io::parse_number(fields[0], li + 1, 1);
    if (fields[1].empty()) {
      r.open_top = true;
    } else {
      r.upper = detail_io::parse_number(fields[1], li + 1, 2);
      largest_finite = std::max(largest_finite, r.upper);
    }
    largest_finite = std::max(largest_finite, r.lower);
    if (grouped) {
      const double c = detail_io::parse_number(fields[2], li + 1, 3);
      if (c < 0) throw negative_count_error("negative count on line " + std::to_string(li + 1));
      if (c != std::floor(c))
        throw parse_error(li + 1, 3, "count must be an integer");
      r.count = static_cast<long long>(c);
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw parse_error(lines.size(), 1, "no data rows");

  for (auto& r : rows) {
    if (r.open_top) {
      if (!(largest_finite > 0))
        throw parse_error(r.line, 2, "open interval with no finite endpoint to scale from");
      r.upper = top_code_multiplier * largest_finite;
      out.notes.push_back("line " + std::to_string(r.line) + ": open upper endpoint set to " +
                          detail_io::format_double(r.upper) + " (" +
                          detail_io::format_double(top_code_multiplier) + "x the largest endpoint)");
    }
  }

  if (grouped) {
    for (const auto& r : rows) {
      out.grouped.brackets.push_back(interval_obs{r.lower, r.upper});
      out.grouped.counts.push_back(r.count);
    }
    out.grouped.validate();
  } else {
    for (const auto& r : rows) out.intervals.obs.push_back(interval_obs{r.lower, r.upper});
    out.intervals.validate();
  }
  return out;
}

// Grouped table back to its CSV form; ingest() of the output reproduces the
// table exactly (17 significant digits round-trip doubles).
inline std::string emit_grouped(const grouped_table& t) {
  std::string out = "lower,upper,count\n";
  for (std::size_t g = 0; g < t.groups(); ++g) {
    out += detail_io::format_double(t.brackets[g].lower);
    out += ',';
    out += detail_io::format_double(t.brackets[g].upper);
    out += ',';
    out += std::to_string(t.counts[g]);
    out += '\n';
  }
  return out;
}

}  // namespace ineq

// Constraint files are small and user-authored, so they get a forgiving JSON
// parser rather than the strict hand-rolled emitters used for output.
#include "../../vendor/json.hpp"

namespace ineq {

inline constraint_set parse_constraints(const std::string& path) {
  const std::string text = detail_io::read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Recover the line from the byte offset for a uniform error shape.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw parse_error(line, col, e.what());
  }
  if (!doc.is_array()) throw parse_error(1, 1, "constraint file must be a JSON array");

  constraint_set out;
  for (const auto& row : doc) {
    if (!row.is_object()) throw parse_error(1, 1, "constraint rows must be JSON objects");
    const std::string kind = row.value("kind", "");
    const std::string rel_name = row.value("relation", "eq");
    relation rel;
    if (rel_name == "eq")
      rel = relation::eq;
    else if (rel_name == "le")
      rel = relation::le;
    else if (rel_name == "ge")
      rel = relation::ge;
    else
      throw unknown_kind_error("unknown relation '" + rel_name + "'");

    auto need = [&](const char* key) {
      if (!row.contains(key))
        throw unknown_kind_error("constraint kind '" + kind + "' needs field '" + key + "'");
      return row.at(key);
    };

    if (kind == "total_mean") {
      out.push_back(constraint::total_mean(need("value").get<double>(), rel));
    } else if (kind == "group_mean") {
      const long long g = need("group").get<long long>();
      if (g < 1) throw bad_group_index_error("group indices are 1-based");
      out.push_back(constraint::group_mean(static_cast<int>(g), need("value").get<double>(), rel));
    } else if (kind == "lorenz_point") {
      const long long h = need("h").get<long long>();
      if (h < 1) throw bad_group_index_error("lorenz point positions are 1-based");
      if (rel != relation::eq)
        throw unknown_kind_error("lorenz points are equality rows; drop the relation field");
      out.push_back(constraint::lorenz_point(static_cast<int>(h), need("value").get<double>()));
    } else if (kind == "raw_row") {
      std::vector<double> coeffs;
      for (const auto& c : need("coeffs")) coeffs.push_back(c.get<double>());
      double rhs = need("rhs").get<double>();
      // Raw rows are normalized here; bracket-level kinds normalize when their
      // coefficients materialize.
      if (rel == relation::ge) {
        for (auto& c : coeffs) c = -c;
        rhs = -rhs;
        rel = relation::le;
      }
      out.push_back(constraint::raw_row(std::move(coeffs), rhs, rel));
    } else {
      throw unknown_kind_error("unknown constraint kind '" + kind + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Result documents.
// ---------------------------------------------------------------------------

namespace detail_io {

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  return out;
}

// Numbers are JSON numbers while finite; infinities become strings.
inline std::string json_number(double v) {
  if (std::isinf(v) || std::isnan(v)) return "\"" + format_double(v) + "\"";
  return format_double(v);
}

inline std::string json_number_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += json_number(v[i]);
  }
  out += "]";
  return out;
}

inline std::string json_string_array(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += "\"" + json_escape(v[i]) + "\"";
  }
  out += "]";
  return out;
}

inline std::string json_pair(const std::pair<double, double>& p) {
  return "[" + json_number(p.first) + "," + json_number(p.second) + "]";
}

}  // namespace detail_io

inline std::string bootstrap_to_json(const bootstrap_result& b) {
  using namespace detail_io;
  const width_statistics_result w = width_statistics(b);
  std::string out = "{";
  out += "\"replicates\":" + std::to_string(b.draws_lower.size());
  out += ",\"se_lower\":" + json_number(b.se_lower);
  out += ",\"se_upper\":" + json_number(b.se_upper);
  out += ",\"se_width\":" + json_number(b.se_width);
  out += ",\"ci_lower\":" + json_pair(b.ci_lower);
  out += ",\"ci_upper\":" + json_pair(b.ci_upper);
  out += ",\"ci_normal_lower\":" + json_pair(b.ci_normal_lower);
  out += ",\"ci_normal_upper\":" + json_pair(b.ci_normal_upper);
  out += ",\"ci_percentile_lower\":" + json_pair(b.ci_percentile_lower);
  out += ",\"ci_percentile_upper\":" + json_pair(b.ci_percentile_upper);
  out += ",\"width\":" + json_number(w.width);
  out += ",\"ci_width_normal\":" + json_pair(w.ci_normal);
  out += ",\"ci_width_percentile\":" + json_pair(w.ci_percentile);
  out += ",\"level\":" + json_number(b.level);
  out += ",\"t_n\":" + json_number(b.t_n);
  out += ",\"attempts\":" + std::to_string(b.attempts);
  out += ",\"failure_rate\":" + json_number(b.failure_rate);
  out += ",\"jittered\":" + std::to_string(b.jittered);
  out += ",\"warnings\":" + json_string_array(b.warnings);
  out += "}";
  return out;
}

inline std::string result_to_json(const index_spec& spec, const std::string& scenario,
                                  const bounds_result& r,
                                  const bootstrap_result* bs = nullptr) {
  using namespace detail_io;
  std::string out = "{";
  out += "\"index\":\"" + std::string(spec.name()) + "\"";
  out += ",\"scenario\":\"" + json_escape(scenario) + "\"";
  out += ",\"lower\":" + json_number(r.lower);
  out += ",\"upper\":" + json_number(r.upper);
  out += ",\"width\":" + json_number(r.width());
  out += ",\"argmin\":" + json_number_array(r.argmin);
  out += ",\"argmax\":" + json_number_array(r.argmax);
  out += ",\"diagnostics\":{";
  out += "\"iterations\":" + std::to_string(r.diag.iterations);
  out += ",\"exact_enumeration\":" + std::string(r.diag.exact_enumeration ? "true" : "false");
  out += ",\"distinct_values\":" + std::to_string(r.diag.distinct_values);
  out += ",\"warnings\":" + json_string_array(r.diag.warnings);
  out += "}";
  if (bs) out += ",\"bootstrap\":" + bootstrap_to_json(*bs);
  out += "}";
  return out;
}

// Flat single-row CSV with the same content; vector fields are
// semicolon-joined inside one cell.
inline std::string result_to_csv(const index_spec& spec, const std::string& scenario,
                                 const bounds_result& r,
                                 const bootstrap_result* bs = nullptr) {
  using namespace detail_io;
  auto join = [](const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ";";
      out += format_double(v[i]);
    }
    return out;
  };
  auto join_s = [](const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ";";
      out += v[i];
    }
    return out;
  };
  std::string head =
      "index,scenario,lower,upper,width,argmin,argmax,iterations,exact_enumeration,"
      "distinct_values,warnings";
  std::string row = std::string(spec.name()) + "," + scenario + "," + format_double(r.lower) +
                    "," + format_double(r.upper) + "," + format_double(r.width()) + ",\"" +
                    join(r.argmin) + "\",\"" + join(r.argmax) + "\"," +
                    std::to_string(r.diag.iterations) + "," +
                    (r.diag.exact_enumeration ? "true" : "false") + "," +
                    std::to_string(r.diag.distinct_values) + ",\"" + join_s(r.diag.warnings) +
                    "\"";
  if (bs) {
    head += ",se_lower,se_upper,se_width,ci_lower_lo,ci_lower_hi,ci_upper_lo,ci_upper_hi";
    row += "," + format_double(bs->se_lower) + "," + format_double(bs->se_upper) + "," +
           format_double(bs->se_width) + "," + format_double(bs->ci_lower.first) + "," +
           format_double(bs->ci_lower.second) + "," + format_double(bs->ci_upper.first) + "," +
           format_double(bs->ci_upper.second);
  }
  return head + "\n" + row + "\n";
}

inline std::string baseline_to_json(const std::vector<baseline_estimate>& es) {
  using namespace detail_io;
  std::string out = "[";
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) out += ",";
    out += "{\"method\":\"" + es[i].method + "\"";
    out += ",\"gini\":" + json_number(es[i].gini);
    out += ",\"imputations\":" + std::to_string(es[i].imputations);
    out += ",\"seed\":" + std::to_string(es[i].seed);
    out += ",\"donor_fallbacks\":" + std::to_string(es[i].donor_fallbacks);
    out += "}";
  }
  out += "]";
  return out;
}

inline std::string baseline_to_csv(const std::vector<baseline_estimate>& es) {
  using namespace detail_io;
  std::string out = "method,gini,imputations,seed,donor_fallbacks\n";
  for (const auto& e : es) {
    out += e.method + "," + format_double(e.gini) + "," + std::to_string(e.imputations) + "," +
           std::to_string(e.seed) + "," + std::to_string(e.donor_fallbacks) + "\n";
  }
  return out;
}

}  // namespace ineq
