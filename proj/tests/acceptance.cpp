// Acceptance gate. Each numbered check prints one [PASS]/[FAIL] line; the
// exit code is the number of failures. Tolerances are pinned here, not
// configurable, so a regression cannot be waved through.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ineq/ineq.hpp"
#include "support/generators.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

std::string fmt_secs(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.1fs", v);
  return b;
}

double endpoint_gap(const ineq::bounds_result& a, const ineq::bounds_result& b) {
  return std::max(std::fabs(a.lower - b.lower), std::fabs(a.upper - b.upper));
}

// Shared instance pools: check 1 fills them, checks 3-5 reuse them.
std::vector<ineq::grouped_table> pool_tables;
std::vector<ineq::interval_sample> pool_samples;

// The mean-constrained instances of check 2, regenerated identically by
// check 5 (same seed, same draw order).
struct mean_instance {
  ineq::grouped_table table;
  double mu = 0.0;
};

mean_instance draw_mean_instance(std::mt19937_64& g) {
  mean_instance m;
  m.table = testgen::random_table(g);
  m.mu = testgen::feasible_mean(m.table, g);
  return m;
}

// --- 1 -----------------------------------------------------------------

bool check_enumeration_agreement(std::string& detail) {
  const auto t0 = clock_type::now();
  double worst = 0.0;

  std::mt19937_64 g(101);
  for (int trial = 0; trial < 500; ++trial) {
    pool_tables.push_back(testgen::random_table(g));
    const auto& t = pool_tables.back();
    const auto fast = ineq::gini_bounds_1a(t);
    const auto ref = ineq::brute_force_bounds_1(t, ineq::index_spec::gini());
    worst = std::max(worst, endpoint_gap(fast, ref));
  }

  std::mt19937_64 h(202);
  for (int trial = 0; trial < 500; ++trial) {
    pool_samples.push_back(testgen::random_intervals(h));
    const auto& s = pool_samples.back();
    const auto fast = ineq::gini_bounds_2(s);
    const auto ref = ineq::brute_force_bounds_2(s);
    worst = std::max(worst, endpoint_gap(fast, ref));
  }

  const double secs = seconds_since(t0);
  detail = "max endpoint gap " + fmt(worst) + " over 1000 instances, " + fmt_secs(secs);
  return worst <= 1e-6 && secs < 60.0;
}

// --- 2 -----------------------------------------------------------------

bool check_mean_constrained_reduction(std::string& detail) {
  std::mt19937_64 g(303);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = draw_mean_instance(g);
    const auto full = ineq::bounds_1b(m.table, {ineq::constraint::total_mean(m.mu)},
                                      ineq::index_spec::gini());
    const auto red = ineq::reduced_mean_bounds(m.table, m.mu, ineq::index_spec::gini());
    worst = std::max(worst, endpoint_gap(full, red));
  }

  const ineq::grouped_table ft{{{0.0, 1.0}, {2.0, 3.0}}, {1, 1}};
  const auto fr =
      ineq::bounds_1b(ft, {ineq::constraint::total_mean(1.25)}, ineq::index_spec::gini());
  const double fixture_gap =
      std::max(std::fabs(fr.lower - 0.3), std::fabs(fr.upper - 0.5));

  detail = "max gap " + fmt(worst) + " over 200 instances, fixture gap " + fmt(fixture_gap);
  return worst <= 1e-6 && fixture_gap <= 1e-9;
}

// --- 3 -----------------------------------------------------------------

bool check_cross_path_agreement(std::string& detail) {
  const double tol = 2.0 * 1e-6 + 1e-7;
  double worst = 0.0;
  for (const auto& t : pool_tables) {
    const auto a = ineq::gini_bounds_1a(t);
    const auto b = ineq::gini_bounds_1a_dinkelbach(t);
    const auto c = ineq::bounds_1b(t, {}, ineq::index_spec::gini());
    worst = std::max({worst, endpoint_gap(a, b), endpoint_gap(a, c), endpoint_gap(b, c)});
  }
  detail = "max pairwise gap " + fmt(worst) + " (tolerance " + fmt(tol) + ")";
  return worst <= tol;
}

// --- 4 -----------------------------------------------------------------

bool check_root_search_schedule(std::string& detail) {
  const int cap = 28;  // ceil(log2(1/1e-6)) + 8
  int longest = 0;
  for (const auto& t : pool_tables) {
    const auto r = ineq::gini_bounds_1a_dinkelbach(t);
    for (const auto* trace : {&r.diag.bracket_widths, &r.diag.bracket_widths_lower}) {
      if (static_cast<int>(trace->size()) > cap) {
        detail = "a search ran " + std::to_string(trace->size()) + " iterations";
        return false;
      }
      longest = std::max(longest, static_cast<int>(trace->size()));
      for (std::size_t i = 0; i < trace->size(); ++i) {
        if ((*trace)[i] != std::ldexp(1.0, -static_cast<int>(i) - 1)) {
          detail = "width after iteration " + std::to_string(i + 1) + " was " +
                   fmt((*trace)[i]) + ", not an exact power of two";
          return false;
        }
      }
    }
  }
  detail = "every bracket width exactly halved; longest run " + std::to_string(longest) +
           " of " + std::to_string(cap) + " allowed iterations";
  return true;
}

// --- 5 -----------------------------------------------------------------

// Count bracket groups whose units sit on both endpoints. Returns -1 if any
// unit is away from both endpoints of its bracket.
int mixed_groups(const ineq::grouped_table& t, const std::vector<double>& y) {
  const auto off = t.offsets();
  int mixed = 0;
  for (std::size_t g = 0; g < t.groups(); ++g) {
    const double lo = t.brackets[g].lower, hi = t.brackets[g].upper;
    if (!(hi > lo)) continue;
    int at_lo = 0, at_hi = 0;
    for (long long i = off[g]; i < off[g + 1]; ++i) {
      if (std::fabs(y[static_cast<std::size_t>(i)] - lo) <= 1e-9)
        ++at_lo;
      else if (std::fabs(y[static_cast<std::size_t>(i)] - hi) <= 1e-9)
        ++at_hi;
      else
        return -1;
    }
    if (at_lo > 0 && at_hi > 0) ++mixed;
  }
  return mixed;
}

bool value_in(const std::vector<double>& sorted_vals, double v) {
  return std::binary_search(sorted_vals.begin(), sorted_vals.end(), v);
}

// Allocation values that belong to interval units: the declared point values
// are removed as a multiset, whatever remains came from genuine intervals.
std::vector<double> interval_values(const ineq::interval_sample& s, std::vector<double> y) {
  std::sort(y.begin(), y.end());
  for (const auto& o : s.obs) {
    if (o.lower != o.upper) continue;
    const auto it = std::lower_bound(y.begin(), y.end(), o.lower);
    if (it == y.end() || *it != o.lower) return {};  // caller treats empty as failure
    y.erase(it);
  }
  return y;
}

bool check_solution_structure(std::string& detail) {
  // Bracketed data, no side information: minimizers use whole groups, the
  // maximizer splits at most one group.
  for (const auto& t : pool_tables) {
    const auto r = ineq::gini_bounds_1a(t);
    if (mixed_groups(t, r.argmin) != 0) {
      detail = "a minimizing allocation split a bracket group";
      return false;
    }
    const int mg = mixed_groups(t, r.argmax);
    if (mg < 0 || mg > 1) {
      detail = "a maximizing allocation split more than one bracket group";
      return false;
    }
  }

  // Mean-constrained instances: allocations concentrate on few values, at
  // most one equality row plus two per group.
  std::mt19937_64 g(303);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = draw_mean_instance(g);
    const auto r = ineq::bounds_1b(m.table, {ineq::constraint::total_mean(m.mu)},
                                   ineq::index_spec::gini());
    const int cap = 1 + 2 * static_cast<int>(m.table.groups());
    for (const auto* y : {&r.argmin, &r.argmax}) {
      if (ineq::distinct_value_count(*y) > cap) {
        detail = "a constrained allocation used " +
                 std::to_string(ineq::distinct_value_count(*y)) + " distinct values, cap " +
                 std::to_string(cap);
        return false;
      }
    }
  }

  // Per-unit intervals: maxima live on interval endpoints, minima on the
  // endpoint lattice with at most one pinch value away from the endpoints.
  for (const auto& s : pool_samples) {
    const auto r = ineq::gini_bounds_2(s);
    const auto lat = ineq::build_lattice(s);
    bool has_interval = false;
    for (const auto& o : s.obs) has_interval = has_interval || o.lower != o.upper;
    if (!has_interval) continue;

    const auto mx = interval_values(s, r.argmax);
    if (mx.empty()) {
      detail = "a maximizing allocation dropped a declared point value";
      return false;
    }
    for (double v : mx) {
      if (!value_in(lat.b, v)) {
        detail = "a maximizing allocation left an interval endpoint";
        return false;
      }
    }

    const auto mn = interval_values(s, r.argmin);
    if (mn.empty()) {
      detail = "a minimizing allocation dropped a declared point value";
      return false;
    }
    std::vector<double> off_endpoint;
    for (double v : mn) {
      if (!value_in(lat.u, v)) {
        detail = "a minimizing allocation left the endpoint lattice";
        return false;
      }
      if (!value_in(lat.b, v)) off_endpoint.push_back(v);
    }
    off_endpoint.erase(std::unique(off_endpoint.begin(), off_endpoint.end()),
                       off_endpoint.end());
    if (off_endpoint.size() > 1) {
      detail = "a minimizing allocation used two values away from the endpoints";
      return false;
    }
  }

  detail = "all extremal allocations on 1200 instances";
  return true;
}

// --- 6 -----------------------------------------------------------------

bool check_monotonicity(std::string& detail) {
  int widened = 0;

  std::mt19937_64 g(404);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = testgen::random_table(g);
    const double mu = testgen::feasible_mean(t, g);
    const ineq::relation rel = trial % 3 == 0   ? ineq::relation::eq
                               : trial % 3 == 1 ? ineq::relation::le
                                                : ineq::relation::ge;
    const auto base = ineq::bounds_1b(t, {}, ineq::index_spec::gini());
    const auto con =
        ineq::bounds_1b(t, {ineq::constraint::total_mean(mu, rel)}, ineq::index_spec::gini());
    if (con.lower < base.lower - 1e-9 || con.upper > base.upper + 1e-9) ++widened;
  }

  std::mt19937_64 h(505);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = testgen::random_intervals(h);
    const auto before = ineq::gini_bounds_2(s);

    std::vector<std::size_t> wide;
    for (std::size_t i = 0; i < s.obs.size(); ++i)
      if (s.obs[i].upper > s.obs[i].lower) wide.push_back(i);
    if (wide.empty()) continue;
    const std::size_t pick =
        wide[std::uniform_int_distribution<std::size_t>(0, wide.size() - 1)(h)];
    const double v = std::uniform_real_distribution<double>(s.obs[pick].lower,
                                                            s.obs[pick].upper)(h);
    s.obs[pick] = {v, v};

    const auto after = ineq::gini_bounds_2(s);
    if (after.lower < before.lower - 1e-9 || after.upper > before.upper + 1e-9) ++widened;
  }

  detail = std::to_string(widened) + " widenings in 400 trials";
  return widened == 0;
}

// --- 7 -----------------------------------------------------------------

bool check_kernel_concavity(std::string& detail) {
  std::mt19937_64 g(606);
  std::normal_distribution<double> z;
  double worst = -1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testgen::random_intervals(g);
    const auto lat = ineq::build_lattice(s);
    const auto& u = lat.u;
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> c(u.size());
      double mean = 0.0;
      for (double& x : c) {
        x = z(g);
        mean += x;
      }
      mean /= static_cast<double>(c.size());
      for (double& x : c) x -= mean;
      double q = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j)
          q += c[i] * c[j] * std::fabs(u[i] - u[j]);
      worst = std::max(worst, q);
    }
  }
  detail = "max quadratic form " + fmt(worst) + " over 100 lattices";
  return worst <= 1e-10;
}

// --- 8 -----------------------------------------------------------------

bool same_draws(const ineq::bootstrap_result& a, const ineq::bootstrap_result& b) {
  return a.draws_lower == b.draws_lower && a.draws_upper == b.draws_upper &&
         a.se_lower == b.se_lower && a.se_upper == b.se_upper && a.ci_lower == b.ci_lower &&
         a.ci_upper == b.ci_upper;
}

bool check_resampling(std::string& detail) {
  const auto t0 = clock_type::now();

  const ineq::grouped_table t{{{0.0, 1.0}, {2.0, 3.0}}, {6, 4}};
  ineq::bootstrap_options single;
  single.replicates = 60;
  single.seed = 9;
  auto threaded = single;
  threaded.threads = 4;
  const auto a = ineq::bootstrap_bounds_1(t, ineq::index_spec::gini(), {}, single);
  const auto b = ineq::bootstrap_bounds_1(t, ineq::index_spec::gini(), {}, threaded);
  const auto c = ineq::bootstrap_bounds_1(t, ineq::index_spec::gini(), {}, single);
  if (!same_draws(a, b) || !same_draws(a, c)) {
    detail = "same seed produced different replicate streams";
    return false;
  }

  const ineq::grouped_table flat{{{2.0, 2.0}}, {8}};
  const auto d = ineq::bootstrap_bounds_1(flat, ineq::index_spec::gini(), {}, single);
  if (d.se_lower != 0.0 || d.se_upper != 0.0 || d.se_width != 0.0) {
    detail = "degenerate data produced nonzero standard errors";
    return false;
  }

  // Synthetic truth: two brackets with population shares (0.3, 0.7). The
  // share sits well away from the stationary point of the lower-endpoint
  // functional (near 0.586 for these brackets); at a near-stationary share
  // the damped replicate perturbations are curvature-dominated, the standard
  // error legitimately overshoots, and coverage saturates at 1.
  const auto truth =
      ineq::corner_share_gini_bounds({0.0, 2.0}, {1.0, 3.0}, {0.3, 0.7});
  std::mt19937_64 g(707);
  std::binomial_distribution<long long> first_count(400, 0.3);
  const int reps = 200;
  int cover_lower = 0, cover_upper = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const long long n1 = first_count(g);
    const ineq::grouped_table draw{{{0.0, 1.0}, {2.0, 3.0}}, {n1, 400 - n1}};
    ineq::bootstrap_options opt;
    opt.replicates = 300;
    opt.seed = 1000 + static_cast<std::uint64_t>(rep);
    const auto r = ineq::bootstrap_bounds_1(draw, ineq::index_spec::gini(), {}, opt);
    if (r.ci_lower.first <= truth.first && truth.first <= r.ci_lower.second) ++cover_lower;
    if (r.ci_upper.first <= truth.second && truth.second <= r.ci_upper.second) ++cover_upper;
  }
  const double cl = static_cast<double>(cover_lower) / reps;
  const double cu = static_cast<double>(cover_upper) / reps;
  const double secs = seconds_since(t0);

  detail = "coverage " + fmt(cl) + " / " + fmt(cu) + " at nominal 0.95, " + fmt_secs(secs);
  return cl >= 0.90 && cl <= 0.99 && cu >= 0.90 && cu <= 0.99 && secs < 600.0;
}

// --- 9 -----------------------------------------------------------------

struct cli_run {
  int exit_code = -1;
  std::string out;
};

cli_run run_cli(const std::string& args) {
  cli_run r;
  const std::string cmd = std::string(INEQ_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool check_cli_goldens(std::string& detail) {
  const std::string fix = INEQ_FIXTURE_DIR;
  const std::string gold = INEQ_GOLDEN_DIR;
  const struct {
    std::string args;
    std::string golden;
  } runs[] = {
      {"bounds --index gini --input " + fix + "/grouped.csv", gold + "/bounds_gini.json"},
      {"bounds --index qratio --tau1 0.5 --tau2 0.85 --input " + fix + "/g3.csv",
       gold + "/bounds_qratio.json"},
      {"oracle-check --input " + fix + "/tiny.csv", gold + "/oracle_check_tiny.json"},
  };
  for (const auto& run : runs) {
    const auto r = run_cli(run.args);
    if (r.exit_code != 0) {
      detail = "exit " + std::to_string(r.exit_code) + " from: " + run.args;
      return false;
    }
    const std::string want = slurp(run.golden);
    if (want.empty()) {
      detail = "missing golden " + run.golden;
      return false;
    }
    if (r.out != want) {
      detail = "output drifted from " + run.golden;
      return false;
    }
  }
  detail = "3 invocations byte-identical";
  return true;
}

}  // namespace

int main() {
  struct entry {
    const char* label;
    bool (*run)(std::string&);
  };
  const entry checks[] = {
      {"1. bounds match exhaustive enumeration on small instances", check_enumeration_agreement},
      {"2. mean-constrained bounds match the analytic reduction", check_mean_constrained_reduction},
      {"3. closed-form, root-search, and simplex paths agree", check_cross_path_agreement},
      {"4. root-search brackets halve exactly and stop on schedule", check_root_search_schedule},
      {"5. extremal allocations have the predicted support structure", check_solution_structure},
      {"6. tighter information never widens the bounds", check_monotonicity},
      {"7. endpoint distance kernel is conditionally negative", check_kernel_concavity},
      {"8. resampling is deterministic, degenerate-exact, and calibrated", check_resampling},
      {"9. command line output matches the checked-in goldens", check_cli_goldens},
  };

  int failures = 0;
  for (const auto& c : checks) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", c.label, detail.empty() ? "" : ": ",
                detail.c_str());
    if (!ok) ++failures;
  }
  return failures;
}
