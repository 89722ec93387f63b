// Command-line front end: ingest coarsened data, compute sharp bounds for an
// inequality index, optionally attach resampling inference, and emit a
// machine-readable document.
//
// Exit codes: 0 success, 1 parse/configuration, 2 infeasible, 3 numerical
// failure, 4 reference-check disagreement (oracle-check only).

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "../vendor/CLI11.hpp"
#include "ineq/ineq.hpp"

namespace {

struct run_config {
  std::string input;
  std::string constraints_path;
  std::string output;                  // empty = stdout
  std::string shape = "auto";
  std::string index = "gini";
  double tau1 = 0.5, tau2 = 0.9;
  double top_code = 2.0;
  std::string format = "json";
  std::uint64_t seed = 1;
  double known_median = 0.0;
  bool have_median = false;
  std::string median_subcounts;
};

struct bootstrap_config {
  int replicates = 1000;
  double exponent = 0.25;
  double level = 0.95;
  std::string method = "normal";
  int threads = 1;
  bool jitter = false;
};

int thread_cap(int requested) {
  if (const char* env = std::getenv("INEQBOUNDS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) return std::min(requested, cap);
  }
  return requested;
}

ineq::index_spec make_index(const run_config& rc) {
  if (rc.index == "gini") return ineq::index_spec::gini();
  if (rc.index == "hoover") return ineq::index_spec::hoover();
  if (rc.index == "qratio") return ineq::index_spec::quantile_ratio(rc.tau1, rc.tau2);
  throw ineq::unknown_kind_error("unknown index '" + rc.index + "' (gini, hoover, qratio)");
}

ineq::data_shape make_shape(const std::string& s) {
  if (s == "auto") return ineq::data_shape::auto_detect;
  if (s == "intervals") return ineq::data_shape::intervals;
  if (s == "grouped") return ineq::data_shape::grouped;
  throw ineq::unknown_kind_error("unknown shape '" + s + "' (auto, intervals, grouped)");
}

// Split the bracket containing the median at the median, distributing its
// count per the user-supplied pair below,above.
ineq::grouped_table split_at_median(const ineq::grouped_table& t, double median,
                                    const std::string& subcounts) {
  if (subcounts.empty())
    throw ineq::unknown_kind_error(
        "--known-median needs --median-subcounts below,above to reallocate the bracket count");
  const auto comma = subcounts.find(',');
  if (comma == std::string::npos)
    throw ineq::parse_error(0, 0, "--median-subcounts must be two comma-separated integers");
  const long long below = std::atoll(subcounts.substr(0, comma).c_str());
  const long long above = std::atoll(subcounts.substr(comma + 1).c_str());
  if (below < 0 || above < 0) throw ineq::negative_count_error("median sub-counts must be nonnegative");

  std::size_t g = 0;
  for (; g < t.groups(); ++g)
    if (t.brackets[g].lower <= median && median <= t.brackets[g].upper) break;
  if (g == t.groups())
    throw ineq::bad_bracket_error("no bracket contains the stated median");
  if (below + above != t.counts[g])
    throw ineq::negative_count_error("median sub-counts must total the split bracket's count of " +
                                     std::to_string(t.counts[g]));

  ineq::grouped_table out;
  for (std::size_t j = 0; j < t.groups(); ++j) {
    if (j == g) {
      out.brackets.push_back(ineq::interval_obs{t.brackets[j].lower, median});
      out.counts.push_back(below);
      out.brackets.push_back(ineq::interval_obs{median, t.brackets[j].upper});
      out.counts.push_back(above);
    } else {
      out.brackets.push_back(t.brackets[j]);
      out.counts.push_back(t.counts[j]);
    }
  }
  out.validate();
  return out;
}

struct loaded_input {
  ineq::ingest_result data;
  ineq::constraint_set cs;
  ineq::index_spec spec;
  bool grouped = false;
};

loaded_input load(const run_config& rc) {
  loaded_input in;
  in.spec = make_index(rc);
  in.data = ineq::ingest(rc.input, make_shape(rc.shape), rc.top_code);
  in.grouped = in.data.shape == ineq::data_shape::grouped;
  if (!rc.constraints_path.empty()) {
    if (!in.grouped)
      throw ineq::unknown_kind_error("constraints apply to grouped data only");
    in.cs = ineq::parse_constraints(rc.constraints_path);
  }
  if (rc.have_median) {
    if (!in.grouped)
      throw ineq::unknown_kind_error("--known-median applies to grouped data only");
    in.data.grouped = split_at_median(in.data.grouped, rc.known_median, rc.median_subcounts);
  }
  if (!in.grouped && in.spec.kind != ineq::index_kind::gini)
    throw ineq::unknown_kind_error("interval data supports the gini index only");
  return in;
}

ineq::bounds_result compute_bounds(const loaded_input& in, std::string& scenario) {
  if (!in.grouped) {
    scenario = "2";
    return ineq::gini_bounds_2(in.data.intervals);
  }
  if (!in.cs.empty()) {
    scenario = "1B";
    return ineq::bounds_1b(in.data.grouped, in.cs, in.spec);
  }
  scenario = "1A";
  switch (in.spec.kind) {
    case ineq::index_kind::gini:
      return ineq::gini_bounds_1a(in.data.grouped);
    case ineq::index_kind::quantile_ratio:
      return ineq::quantile_ratio_bounds_1a(in.data.grouped, in.spec.tau1, in.spec.tau2);
    case ineq::index_kind::hoover:
      return ineq::bounds_1b(in.data.grouped, {}, in.spec);
  }
  throw ineq::unknown_kind_error("unhandled index kind");
}

void emit(const run_config& rc, const std::string& doc) {
  if (rc.output.empty()) {
    std::cout << doc << "\n";
    return;
  }
  std::ofstream out(rc.output, std::ios::binary);
  if (!out) throw ineq::parse_error(0, 0, "cannot write '" + rc.output + "'");
  out << doc << "\n";
}

void print_notes(const std::vector<std::string>& notes) {
  for (const auto& n : notes) std::cerr << "note: " << n << "\n";
}

int cmd_bounds(const run_config& rc) {
  const loaded_input in = load(rc);
  print_notes(in.data.notes);
  std::string scenario;
  const auto r = compute_bounds(in, scenario);
  emit(rc, rc.format == "csv" ? ineq::result_to_csv(in.spec, scenario, r)
                              : ineq::result_to_json(in.spec, scenario, r));
  return 0;
}

int cmd_bootstrap(const run_config& rc, const bootstrap_config& bc) {
  const loaded_input in = load(rc);
  print_notes(in.data.notes);
  std::string scenario;
  const auto r = compute_bounds(in, scenario);

  ineq::bootstrap_options opt;
  opt.replicates = bc.replicates;
  opt.exponent = bc.exponent;
  opt.level = bc.level;
  opt.seed = rc.seed;
  opt.threads = thread_cap(bc.threads);
  opt.jitter = bc.jitter;
  if (bc.method == "normal")
    opt.method = ineq::ci_method::normal;
  else if (bc.method == "percentile")
    opt.method = ineq::ci_method::percentile;
  else
    throw ineq::unknown_kind_error("unknown interval method '" + bc.method + "'");

  const auto bs = in.grouped ? ineq::bootstrap_bounds_1(in.data.grouped, in.spec, in.cs, opt)
                             : ineq::bootstrap_bounds_2(in.data.intervals, opt);
  emit(rc, rc.format == "csv" ? ineq::result_to_csv(in.spec, scenario, r, &bs)
                              : ineq::result_to_json(in.spec, scenario, r, &bs));
  return 0;
}

int cmd_baseline(const run_config& rc, const std::vector<std::string>& methods, int imputations) {
  const loaded_input in = load(rc);
  print_notes(in.data.notes);
  ineq::interval_sample s = in.data.intervals;
  if (in.grouped) {
    for (std::size_t g = 0; g < in.data.grouped.groups(); ++g)
      for (long long k = 0; k < in.data.grouped.counts[g]; ++k)
        s.obs.push_back(in.data.grouped.brackets[g]);
  }

  std::vector<ineq::baseline_estimate> es;
  for (const auto& name : methods) {
    ineq::baseline_options opt;
    opt.seed = rc.seed;
    opt.imputations = imputations;
    if (name == "drop")
      opt.method = ineq::impute_method::drop;
    else if (name == "mean")
      opt.method = ineq::impute_method::mean;
    else if (name == "midpoint")
      opt.method = ineq::impute_method::midpoint;
    else if (name == "hot_deck")
      opt.method = ineq::impute_method::hot_deck;
    else if (name == "hot_deck_multi")
      opt.method = ineq::impute_method::hot_deck_multi;
    else
      throw ineq::unknown_kind_error("unknown baseline method '" + name + "'");
    es.push_back(ineq::baseline_gini(s, opt));
  }
  emit(rc, rc.format == "csv" ? ineq::baseline_to_csv(es) : ineq::baseline_to_json(es));
  return 0;
}

int cmd_oracle_check(const run_config& rc, double tolerance) {
  const loaded_input in = load(rc);
  print_notes(in.data.notes);
  std::string scenario;
  const auto r = compute_bounds(in, scenario);
  const auto ref = in.grouped
                       ? ineq::brute_force_bounds_1(in.data.grouped, in.spec, in.cs)
                       : ineq::brute_force_bounds_2(in.data.intervals);
  const double gap =
      std::max(std::fabs(r.lower - ref.lower), std::fabs(r.upper - ref.upper));
  const bool ok = gap <= tolerance;
  std::string doc = "{";
  doc += "\"lower\":" + ineq::detail_io::json_number(r.lower);
  doc += ",\"upper\":" + ineq::detail_io::json_number(r.upper);
  doc += ",\"reference_lower\":" + ineq::detail_io::json_number(ref.lower);
  doc += ",\"reference_upper\":" + ineq::detail_io::json_number(ref.upper);
  doc += ",\"max_gap\":" + ineq::detail_io::json_number(gap);
  doc += std::string(",\"ok\":") + (ok ? "true" : "false");
  doc += "}";
  emit(rc, doc);
  return ok ? 0 : 4;
}

int cmd_series(const run_config& rc, int threads) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(rc.input))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ineq::parse_error(0, 0, "no .csv files in '" + rc.input + "'");

  const ineq::index_spec spec = make_index(rc);
  struct row {
    std::string doc;
    std::exception_ptr err;
  };
  std::vector<row> rows(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      try {
        const auto data = ineq::ingest(files[i].string(), ineq::data_shape::grouped, rc.top_code);
        ineq::bounds_result r;
        switch (spec.kind) {
          case ineq::index_kind::gini:
            r = ineq::gini_bounds_1a(data.grouped);
            break;
          case ineq::index_kind::quantile_ratio:
            r = ineq::quantile_ratio_bounds_1a(data.grouped, spec.tau1, spec.tau2);
            break;
          case ineq::index_kind::hoover:
            r = ineq::bounds_1b(data.grouped, {}, spec);
            break;
        }
        rows[i].doc = files[i].filename().string() + "," + std::string(spec.name()) + "," +
                      ineq::detail_io::format_double(r.lower) + "," +
                      ineq::detail_io::format_double(r.upper) + "," +
                      ineq::detail_io::format_double(r.width());
      } catch (...) {
        rows[i].err = std::current_exception();
      }
    }
  };
  const int pool_size = std::max(1, std::min<int>(thread_cap(threads),
                                                  static_cast<int>(files.size())));
  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < pool_size; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].err) {
      std::cerr << "while processing " << files[i].string() << ":\n";
      std::rethrow_exception(rows[i].err);
    }

  std::string doc = "file,index,lower,upper,width";
  for (const auto& rw : rows) {
    doc += "\n";
    doc += rw.doc;
  }
  emit(rc, doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp bounds for inequality indices from coarsened data"};
  app.require_subcommand(1);

  run_config rc;
  bootstrap_config bc;
  std::vector<std::string> baseline_methods{"midpoint"};
  int baseline_imputations = 5;
  double oracle_tolerance = 1e-6;
  int series_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (series_threads < 1) series_threads = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
    auto* in = cmd->add_option("--input", rc.input, "input CSV file (or directory for series)");
    if (needs_input) in->required();
    cmd->add_option("--shape", rc.shape, "data shape: auto|intervals|grouped");
    cmd->add_option("--index", rc.index, "index: gini|hoover|qratio");
    cmd->add_option("--tau1", rc.tau1, "lower quantile level (qratio)");
    cmd->add_option("--tau2", rc.tau2, "upper quantile level (qratio)");
    cmd->add_option("--constraints", rc.constraints_path, "constraint JSON file (grouped data)");
    cmd->add_option("--top-code-multiplier", rc.top_code,
                    "open top intervals close at this multiple of the largest endpoint");
    cmd->add_option("--format", rc.format, "output format: json|csv");
    cmd->add_option("--output", rc.output, "write the document here instead of stdout");
    cmd->add_option("--seed", rc.seed, "seed for randomized procedures");
    cmd->add_option("--known-median", rc.known_median, "split the covering bracket at this median")
        ->each([&](const std::string&) { rc.have_median = true; });
    cmd->add_option("--median-subcounts", rc.median_subcounts,
                    "below,above counts for the median split");
  };

  auto* bounds = app.add_subcommand("bounds", "sharp bounds with allocations and diagnostics");
  add_common(bounds);

  auto* boot = app.add_subcommand("bootstrap", "bounds plus resampling standard errors");
  add_common(boot);
  boot->add_option("--replicates", bc.replicates, "bootstrap replicates");
  boot->add_option("--exponent", bc.exponent, "damping exponent in (0, 0.5)");
  boot->add_option("--level", bc.level, "confidence level");
  boot->add_option("--ci", bc.method, "headline interval family: normal|percentile");
  boot->add_option("--threads", bc.threads, "worker threads");
  boot->add_flag("--jitter", bc.jitter, "always jitter constraint right-hand sides");

  auto* base = app.add_subcommand("baseline", "single-number imputation estimates");
  add_common(base);
  base->add_option("--method", baseline_methods,
                   "methods to run: drop|mean|midpoint|hot_deck|hot_deck_multi");
  base->add_option("--imputations", baseline_imputations, "draws for hot_deck_multi");

  auto* oracle = app.add_subcommand("oracle-check",
                                    "compare against exhaustive enumeration (tiny inputs)");
  add_common(oracle);
  oracle->add_option("--tolerance", oracle_tolerance, "largest acceptable endpoint gap");

  auto* series = app.add_subcommand("series", "bounds table for a directory of grouped tables");
  add_common(series);
  series->add_option("--threads", series_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (bounds->parsed()) return cmd_bounds(rc);
    if (boot->parsed()) return cmd_bootstrap(rc, bc);
    if (base->parsed()) return cmd_baseline(rc, baseline_methods, baseline_imputations);
    if (oracle->parsed()) return cmd_oracle_check(rc, oracle_tolerance);
    if (series->parsed()) return cmd_series(rc, series_threads);
  } catch (const ineq::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.cls());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
