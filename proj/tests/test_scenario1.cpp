#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "ineq/indices.hpp"
#include "ineq/scenario1.hpp"
#include "support/generators.hpp"

using namespace ineq;
using Catch::Approx;

namespace {

double gini_of(std::vector<double> y) { return gini(sorted_sample::of(std::move(y))); }
double hoover_of(std::vector<double> y) { return hoover(sorted_sample::of(std::move(y))); }

// A completion must be sorted, sit inside its per-position bracket, and
// satisfy every side constraint it was computed under.
void require_feasible(const grouped_table& t, const constraint_set& cs,
                      const std::vector<double>& y, double tol = 1e-6) {
  REQUIRE(y.size() == static_cast<std::size_t>(t.n()));
  const auto off = t.offsets();
  for (std::size_t i = 0; i + 1 < y.size(); ++i) REQUIRE(y[i] <= y[i + 1] + tol);
  for (std::size_t g = 0; g < t.groups(); ++g)
    for (long long i = off[g]; i < off[g + 1]; ++i) {
      REQUIRE(y[static_cast<std::size_t>(i)] >= t.brackets[g].lower - tol);
      REQUIRE(y[static_cast<std::size_t>(i)] <= t.brackets[g].upper + tol);
    }
  const double nn = static_cast<double>(t.n());
  for (const auto& c : cs) {
    double lhs = 0.0, rhs = 0.0;
    switch (c.what) {
      case constraint::kind::total_mean:
        for (double v : y) lhs += v / nn;
        rhs = c.value;
        break;
      case constraint::kind::group_mean: {
        const std::size_t g = static_cast<std::size_t>(c.group - 1);
        for (long long i = off[g]; i < off[g + 1]; ++i)
          lhs += y[static_cast<std::size_t>(i)] / static_cast<double>(t.counts[g]);
        rhs = c.value;
        break;
      }
      case constraint::kind::lorenz_point: {
        double head = 0.0, total = 0.0;
        for (long long i = 0; i < t.n(); ++i) {
          total += y[static_cast<std::size_t>(i)];
          if (i < off[static_cast<std::size_t>(c.h)]) head += y[static_cast<std::size_t>(i)];
        }
        lhs = head - c.value * total;
        rhs = 0.0;
        break;
      }
      case constraint::kind::raw_row:
        for (std::size_t i = 0; i < y.size(); ++i) lhs += c.coeffs[i] * y[i];
        rhs = c.rhs;
        break;
    }
    switch (c.rel) {
      case relation::eq: REQUIRE(lhs == Approx(rhs).margin(tol)); break;
      case relation::le: REQUIRE(lhs <= rhs + tol); break;
      case relation::ge: REQUIRE(lhs >= rhs - tol); break;
    }
  }
}

// Count groups whose completion values mix both endpoints.
int mixed_groups(const grouped_table& t, const std::vector<double>& y) {
  const auto off = t.offsets();
  int mixed = 0;
  for (std::size_t g = 0; g < t.groups(); ++g) {
    bool at_lo = false, at_hi = false;
    for (long long i = off[g]; i < off[g + 1]; ++i) {
      const double v = y[static_cast<std::size_t>(i)];
      if (std::fabs(v - t.brackets[g].lower) <= 1e-9) at_lo = true;
      if (std::fabs(v - t.brackets[g].upper) <= 1e-9) at_hi = true;
      REQUIRE((std::fabs(v - t.brackets[g].lower) <= 1e-9 ||
               std::fabs(v - t.brackets[g].upper) <= 1e-9));
    }
    if (at_lo && at_hi && t.brackets[g].width() > 0.0) ++mixed;
  }
  return mixed;
}

}  // namespace

TEST_CASE("corner form mirrors shares and endpoints", "[scenario1]") {
  const grouped_table t{{{0.0, 1.0}, {2.0, 3.0}}, {1, 1}};
  const corner_form f = build_gini_form(t);

  REQUIRE(f.d == 2);
  REQUIRE(f.s == std::vector<double>{0.5, 0.5});
  REQUIRE(f.b == std::vector<double>{0.0, 1.0, 0.5, 1.5});

  // Stacked values are (lo1, lo2, hi1, hi2) = (0, 2, 1, 3), entries
  // s_i s_j |v_i - v_j| with s = 1/2 everywhere.
  REQUIRE(f.a[0][1] == Approx(0.5));
  REQUIRE(f.a[0][2] == Approx(0.25));
  REQUIRE(f.a[0][3] == Approx(0.75));
  REQUIRE(f.a[1][2] == Approx(0.25));
  REQUIRE(f.a[1][3] == Approx(0.25));
  REQUIRE(f.a[2][3] == Approx(0.5));
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(f.a[i][i] == 0.0);
    for (std::size_t j = 0; j < 4; ++j) REQUIRE(f.a[i][j] == f.a[j][i]);
  }

  // Pure profiles reproduce plain Gini values of the endpoint samples.
  REQUIRE(f.gini_at({1.0, 1.0}) == Approx(gini_of({0.0, 2.0})));
  REQUIRE(f.gini_at({0.0, 0.0}) == Approx(gini_of({1.0, 3.0})));
  REQUIRE(f.gini_at({0.0, 1.0}) == Approx(gini_of({1.0, 2.0})));

  SECTION("share overload validates its inputs") {
    REQUIRE_THROWS_AS(build_gini_form({}, {}, {}), bad_bracket_error);
    REQUIRE_THROWS_AS(build_gini_form({0.0}, {1.0, 2.0}, {1.0}), bad_bracket_error);
    REQUIRE_THROWS_AS(build_gini_form({2.0}, {1.0}, {1.0}), bad_bracket_error);
    REQUIRE_THROWS_AS(build_gini_form({0.0, 1.0}, {2.0, 3.0}, {1.0, 1.0}), overlap_error);
    REQUIRE_THROWS_AS(build_gini_form({0.0, 2.0}, {1.0, 3.0}, {1.0, -1.0}), negative_count_error);
    REQUIRE_THROWS_AS(build_gini_form({0.0, 2.0}, {1.0, 3.0}, {0.0, 0.0}), empty_sample_error);
  }

  SECTION("share overload normalises weights") {
    const corner_form a = build_gini_form({0.0, 2.0}, {1.0, 3.0}, {0.5, 0.5});
    const corner_form b = build_gini_form({0.0, 2.0}, {1.0, 3.0}, {3.0, 3.0});
    REQUIRE(a.s == b.s);
    REQUIRE(a.b == b.b);
  }
}

TEST_CASE("two-bracket gini bounds", "[scenario1]") {
  const grouped_table t{{{0.0, 1.0}, {2.0, 3.0}}, {1, 1}};

  SECTION("grid mode") {
    const auto r = gini_bounds_1a(t);
    REQUIRE(r.lower == Approx(1.0 / 6.0).margin(1e-12));
    REQUIRE(r.upper == Approx(0.5).margin(1e-12));
    REQUIRE(r.diag.mode == "grid");
    REQUIRE(gini_of(r.argmin) == Approx(r.lower).margin(1e-9));
    REQUIRE(gini_of(r.argmax) == Approx(r.upper).margin(1e-9));
    require_feasible(t, {}, r.argmin);
    require_feasible(t, {}, r.argmax);
  }

  SECTION("relaxed mode keeps the lower bound and lifts the upper") {
    const auto r = gini_bounds_1a(t, share_mode::relaxed);
    REQUIRE(r.lower == Approx(1.0 / 6.0).margin(1e-12));
    REQUIRE(r.upper == Approx(0.55051025721682201).margin(1e-12));
    REQUIRE(r.diag.mode == "relaxed");
    REQUIRE(r.argmax.empty());
    REQUIRE_FALSE(r.diag.warnings.empty());
  }
}

TEST_CASE("gini bounds with uneven counts", "[scenario1]") {
  const grouped_table t{{{1.0, 2.0}, {4.0, 4.0}}, {2, 1}};
  const auto r = gini_bounds_1a(t);
  REQUIRE(r.lower == Approx(1.0 / 6.0).margin(1e-12));
  REQUIRE(r.upper == Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(gini_of(r.argmin) == Approx(r.lower).margin(1e-9));
  REQUIRE(gini_of(r.argmax) == Approx(r.upper).margin(1e-9));
}

TEST_CASE("single-bracket gini bounds", "[scenario1]") {
  SECTION("all mass can equalise, splits cap the spread") {
    const grouped_table t{{{2.0, 5.0}}, {3}};
    const auto r = gini_bounds_1a(t);
    REQUIRE(r.lower == 0.0);
    REQUIRE(r.upper == Approx(2.0 / 9.0).margin(1e-12));
    REQUIRE(gini_of(r.argmax) == Approx(r.upper).margin(1e-9));
  }
  SECTION("one observation is perfectly equal") {
    const grouped_table t{{{0.0, 3.0}}, {1}};
    const auto r = gini_bounds_1a(t);
    REQUIRE(r.lower == 0.0);
    REQUIRE(r.upper == 0.0);
  }
  SECTION("all-zero data has no usable mean") {
    const grouped_table t{{{0.0, 0.0}}, {2}};
    REQUIRE_THROWS_AS(gini_bounds_1a(t), nonpositive_mean_error);
  }
}

TEST_CASE("extremal completions are structured", "[scenario1]") {
  std::mt19937_64 g(20250611);
  for (int trial = 0; trial < 100; ++trial) {
    const grouped_table t = testgen::random_table(g);
    bounds_result r;
    try {
      r = gini_bounds_1a(t);
    } catch (const nonpositive_mean_error&) {
      continue;
    }
    INFO("trial " << trial);
    REQUIRE(r.lower <= r.upper + 1e-12);
    REQUIRE(gini_of(r.argmin) == Approx(r.lower).margin(1e-9));
    REQUIRE(gini_of(r.argmax) == Approx(r.upper).margin(1e-9));
    require_feasible(t, {}, r.argmin, 1e-9);
    require_feasible(t, {}, r.argmax, 1e-9);
    // Minimiser: every group sits wholly on one endpoint. Maximiser: at most
    // one group splits between its endpoints.
    REQUIRE(mixed_groups(t, r.argmin) == 0);
    REQUIRE(mixed_groups(t, r.argmax) <= 1);
  }
}

TEST_CASE("root search agrees with the closed form", "[scenario1]") {
  const double eps = 1e-6;
  const double tol = 2.0 * eps + 1e-7;
  std::mt19937_64 g(424241);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const grouped_table t = testgen::random_table(g);
    bounds_result cf, dk;
    try {
      cf = gini_bounds_1a(t);
      dk = gini_bounds_1a_dinkelbach(t, eps);
    } catch (const nonpositive_mean_error&) {
      continue;
    }
    ++checked;
    INFO("trial " << trial);
    REQUIRE(std::fabs(dk.lower - cf.lower) <= tol);
    REQUIRE(std::fabs(dk.upper - cf.upper) <= tol);

    // The bracket starts at [0, 1], so the residual width after halving i+1
    // times is exactly 2^-(i+1); bisection on doubles reproduces it bit for
    // bit. Band stops may cut either trace short, even to empty.
    for (const auto* widths : {&dk.diag.bracket_widths, &dk.diag.bracket_widths_lower}) {
      REQUIRE(widths->size() <= 28);
      for (std::size_t i = 0; i < widths->size(); ++i)
        REQUIRE((*widths)[i] == std::ldexp(1.0, -static_cast<int>(i) - 1));
    }
    REQUIRE(dk.diag.iterations <= 56);
  }
  REQUIRE(checked >= 40);
}

TEST_CASE("quantisation gap shrinks with counts", "[scenario1]") {
  std::mt19937_64 g(777003);
  for (int trial = 0; trial < 40; ++trial) {
    const grouped_table base = testgen::random_table(g, 3, 6, true);
    for (long long mult : {1ll, 2ll, 4ll}) {
      grouped_table t = base;
      for (auto& c : t.counts) c *= mult;
      const auto grid = gini_bounds_1a(t, share_mode::grid);
      const auto relax = gini_bounds_1a(t, share_mode::relaxed);
      INFO("trial " << trial << " mult " << mult);

      // The step-profile minimum never touches the share grid.
      REQUIRE(grid.lower == relax.lower);

      double wmax = 0.0, mu_lb = 0.0;
      const auto sh = t.shares();
      for (std::size_t d = 0; d < t.groups(); ++d) {
        wmax = std::max(wmax, t.brackets[d].width());
        mu_lb += sh[d] * t.brackets[d].lower;
      }
      const double gap = relax.upper - grid.upper;
      REQUIRE(gap >= -1e-12);
      REQUIRE(gap <= 5.0 * wmax / (mu_lb * static_cast<double>(t.n())) + 1e-12);
    }
  }
}

TEST_CASE("share-vector bounds match relaxed table bounds", "[scenario1]") {
  SECTION("two-bracket fixture") {
    const auto [lo, hi] = corner_share_gini_bounds({0.0, 2.0}, {1.0, 3.0}, {0.5, 0.5});
    REQUIRE(lo == Approx(1.0 / 6.0).margin(1e-12));
    REQUIRE(hi == Approx(0.55051025721682201).margin(1e-12));
  }
  SECTION("one bracket splits at the golden fraction") {
    const auto [lo, hi] = corner_share_gini_bounds({1.0}, {2.0}, {1.0});
    REQUIRE(lo == 0.0);
    REQUIRE(hi == Approx(3.0 - 2.0 * std::sqrt(2.0)).margin(1e-12));
  }
  SECTION("weight scaling is immaterial") {
    const auto a = corner_share_gini_bounds({0.0, 2.0}, {1.0, 3.0}, {0.5, 0.5});
    const auto b = corner_share_gini_bounds({0.0, 2.0}, {1.0, 3.0}, {7.0, 7.0});
    REQUIRE(a.first == Approx(b.first).margin(1e-15));
    REQUIRE(a.second == Approx(b.second).margin(1e-15));
  }
  SECTION("agrees with the relaxed table path on random tables") {
    std::mt19937_64 g(90125);
    for (int trial = 0; trial < 30; ++trial) {
      const grouped_table t = testgen::random_table(g, 3, 6, true);
      std::vector<double> lo(t.groups()), hi(t.groups());
      for (std::size_t d = 0; d < t.groups(); ++d) {
        lo[d] = t.brackets[d].lower;
        hi[d] = t.brackets[d].upper;
      }
      const auto pair = corner_share_gini_bounds(lo, hi, t.shares());
      const auto r = gini_bounds_1a(t, share_mode::relaxed);
      INFO("trial " << trial);
      REQUIRE(pair.first == Approx(r.lower).margin(1e-9));
      REQUIRE(pair.second == Approx(r.upper).margin(1e-9));
    }
  }
}

TEST_CASE("quantile ratio bounds read off opposite endpoints", "[scenario1]") {
  const grouped_table t{{{5.0, 10.0}, {20.0, 30.0}, {50.0, 60.0}}, {6, 3, 1}};

  SECTION("cross-bracket quantiles") {
    const auto r = quantile_ratio_bounds_1a(t, 0.5, 0.85);
    REQUIRE(r.lower == Approx(2.0).margin(1e-12));
    REQUIRE(r.upper == Approx(6.0).margin(1e-12));
    const auto spec = index_spec::quantile_ratio(0.5, 0.85);
    REQUIRE(evaluate_index(spec, sorted_sample::of(r.argmin)) == Approx(2.0).margin(1e-9));
    REQUIRE(evaluate_index(spec, sorted_sample::of(r.argmax)) == Approx(6.0).margin(1e-9));
    require_feasible(t, {}, r.argmin);
    require_feasible(t, {}, r.argmax);
  }
  SECTION("zero lower endpoint pushes the upper bound to infinity") {
    const grouped_table z{{{0.0, 10.0}, {20.0, 30.0}, {50.0, 60.0}}, {6, 3, 1}};
    const auto r = quantile_ratio_bounds_1a(z, 0.5, 0.85);
    REQUIRE(r.lower == Approx(2.0).margin(1e-12));
    REQUIRE(std::isinf(r.upper));
    REQUIRE(r.argmax.empty());
  }
  SECTION("both quantiles inside one bracket") {
    const auto r = quantile_ratio_bounds_1a(t, 0.2, 0.4);
    REQUIRE(r.lower == Approx(1.0).margin(1e-12));
    REQUIRE(r.upper == Approx(2.0).margin(1e-12));
  }
  SECTION("coinciding positions collapse to one") {
    const auto r = quantile_ratio_bounds_1a(t, 0.51, 0.55);
    REQUIRE(r.lower == 1.0);
    REQUIRE(r.upper == 1.0);
  }
  SECTION("quantile on a bracket boundary is ambiguous") {
    REQUIRE_THROWS_AS(quantile_ratio_bounds_1a(t, 0.6, 0.85), quantile_boundary_error);
  }
  SECTION("level validation") {
    REQUIRE_THROWS_AS(quantile_ratio_bounds_1a(t, 0.9, 0.5), index_range_error);
    REQUIRE_THROWS_AS(quantile_ratio_bounds_1a(t, 0.05, 0.85), index_range_error);
  }
}

TEST_CASE("absolute-gap bounds", "[scenario1]") {
  SECTION("two touching brackets") {
    const grouped_table t{{{0.0, 2.0}, {2.0, 4.0}}, {1, 1}};
    const auto r = hoover_bounds(t);
    REQUIRE(r.lower == Approx(0.0).margin(1e-9));
    REQUIRE(r.upper == Approx(0.5).margin(1e-9));
    REQUIRE(hoover_of(r.argmin) == Approx(r.lower).margin(1e-7));
    REQUIRE(hoover_of(r.argmax) == Approx(r.upper).margin(1e-7));
    require_feasible(t, {}, r.argmin);
    require_feasible(t, {}, r.argmax);
  }
  SECTION("point brackets pin the value") {
    const grouped_table t{{{1.0, 1.0}, {3.0, 3.0}}, {1, 1}};
    const auto r = hoover_bounds(t);
    REQUIRE(r.lower == Approx(0.25).margin(1e-9));
    REQUIRE(r.upper == Approx(0.25).margin(1e-9));
  }
  SECTION("a pinned mean still leaves spread free") {
    const grouped_table t{{{0.0, 2.0}, {2.0, 4.0}}, {1, 1}};
    const auto r = hoover_bounds(t, {constraint::total_mean(1.5)});
    REQUIRE(r.lower == Approx(1.0 / 6.0).margin(1e-7));
    REQUIRE(r.upper == Approx(0.5).margin(1e-7));
    require_feasible(t, {constraint::total_mean(1.5)}, r.argmin);
    require_feasible(t, {constraint::total_mean(1.5)}, r.argmax);
  }
  SECTION("dominated by the gini bounds") {
    std::mt19937_64 g(555888);
    for (int trial = 0; trial < 20; ++trial) {
      const grouped_table t = testgen::random_table(g, 3, 5, true);
      const auto h = hoover_bounds(t);
      const auto gi = gini_bounds_1a(t);
      INFO("trial " << trial);
      REQUIRE(h.upper <= gi.upper + 1e-7);
      REQUIRE(h.lower <= gi.lower + 1e-7);
    }
  }
}

TEST_CASE("polyhedron assembly", "[scenario1]") {
  const grouped_table t{{{0.0, 1.0}, {2.0, 3.0}}, {1, 1}};

  SECTION("row layout and side-constraint counts") {
    const auto p = build_polyhedron(t, {constraint::total_mean(1.25)});
    REQUIRE(p.n == 2);
    // n-1 ordering rows, 2n box rows, then the side constraints.
    REQUIRE(p.rows.size() == 1 + 4 + 1);
    REQUIRE(p.q_eq == 1);
    REQUIRE(p.q_ineq == 0);
    REQUIRE(p.rows.back().a == std::vector<double>{0.5, 0.5});
    REQUIRE(p.rows.back().rhs == 1.25);
  }
  SECTION("ge rows are stored negated") {
    const auto p = build_polyhedron(t, {constraint::raw_row({0.0, 1.0}, 2.5, relation::ge)});
    REQUIRE(p.q_ineq == 1);
    const auto& row = p.rows.back();
    REQUIRE(row.rel == relation::le);
    REQUIRE(row.a == std::vector<double>{-0.0, -1.0});
    REQUIRE(row.rhs == -2.5);
  }
  SECTION("bad references are rejected") {
    REQUIRE_THROWS_AS(build_polyhedron(t, {constraint::group_mean(3, 1.0)}),
                      bad_group_index_error);
    REQUIRE_THROWS_AS(build_polyhedron(t, {constraint::lorenz_point(2, 0.3)}),
                      bad_group_index_error);
    REQUIRE_THROWS_AS(build_polyhedron(t, {constraint::raw_row({1.0}, 0.0, relation::le)}),
                      index_range_error);
  }
}

TEST_CASE("constrained completion bounds", "[scenario1]") {
  const grouped_table t{{{0.0, 1.0}, {2.0, 3.0}}, {1, 1}};
  const auto gini_spec = index_spec::gini();

  SECTION("no constraints reproduces the closed form") {
    const auto r = bounds_1b(t, {}, gini_spec);
    REQUIRE(r.lower == Approx(1.0 / 6.0).margin(1e-7));
    REQUIRE(r.upper == Approx(0.5).margin(1e-7));
  }
  SECTION("random tables agree with the closed form") {
    std::mt19937_64 g(31337);
    for (int trial = 0; trial < 20; ++trial) {
      const grouped_table rt = testgen::random_table(g, 3, 5, true);
      const auto a = gini_bounds_1a(rt);
      const auto b = bounds_1b(rt, {}, gini_spec);
      INFO("trial " << trial);
      REQUIRE(std::fabs(a.lower - b.lower) <= 1e-7);
      REQUIRE(std::fabs(a.upper - b.upper) <= 1e-7);
    }
  }
  SECTION("pinned total mean") {
    const constraint_set cs{constraint::total_mean(1.25)};
    const auto r = bounds_1b(t, cs, gini_spec);
    REQUIRE(r.lower == Approx(0.3).margin(1e-9));
    REQUIRE(r.upper == Approx(0.5).margin(1e-9));
    require_feasible(t, cs, r.argmin);
    require_feasible(t, cs, r.argmax);
    REQUIRE(r.diag.distinct_values <= 1 + 2 * 2);
    REQUIRE(r.diag.warnings.empty());
  }
  SECTION("pinned group mean") {
    const grouped_table u{{{0.0, 2.0}, {2.0, 4.0}}, {2, 1}};
    const constraint_set cs{constraint::group_mean(1, 1.0)};
    const auto r = bounds_1b(u, cs, gini_spec);
    REQUIRE(r.lower == Approx(1.0 / 6.0).margin(1e-7));
    REQUIRE(r.upper == Approx(4.0 / 9.0).margin(1e-7));
    require_feasible(u, cs, r.argmin);
    require_feasible(u, cs, r.argmax);
  }
  SECTION("a cumulative-share point can pin the index") {
    // First group holding a quarter of the total forces y2 = 3 y1, so every
    // completion has the Gini of (1, 3).
    const constraint_set cs{constraint::lorenz_point(1, 0.25)};
    const auto r = bounds_1b(t, cs, gini_spec);
    REQUIRE(r.lower == Approx(0.25).margin(1e-7));
    REQUIRE(r.upper == Approx(0.25).margin(1e-7));
  }
  SECTION("raw equality row") {
    const constraint_set cs{constraint::raw_row({1.0, 0.0}, 0.5, relation::eq)};
    const auto r = bounds_1b(t, cs, gini_spec);
    REQUIRE(r.lower == Approx(0.3).margin(1e-7));
    REQUIRE(r.upper == Approx(2.5 / 7.0).margin(1e-7));
  }
  SECTION("raw lower-bound row") {
    const constraint_set cs{constraint::raw_row({0.0, 1.0}, 2.5, relation::ge)};
    const auto r = bounds_1b(t, cs, gini_spec);
    REQUIRE(r.lower == Approx(3.0 / 14.0).margin(1e-7));
    REQUIRE(r.upper == Approx(0.5).margin(1e-7));
  }
  SECTION("unattainable means are infeasible") {
    REQUIRE_THROWS_AS(bounds_1b(t, {constraint::total_mean(10.0)}, gini_spec), infeasible_error);
    REQUIRE_THROWS_AS(bounds_1b(t, {constraint::total_mean(0.0)}, gini_spec), infeasible_error);
  }
  SECTION("all-zero data degenerates") {
    const grouped_table z{{{0.0, 0.0}}, {2}};
    REQUIRE_THROWS_AS(bounds_1b(z, {}, gini_spec), degenerate_denominator_error);
  }
  SECTION("feasible constraints never widen the bounds") {
    std::mt19937_64 g(246810);
    for (int trial = 0; trial < 30; ++trial) {
      const grouped_table rt = testgen::random_table(g, 3, 5, true);
      const double mu = testgen::feasible_mean(rt, g);
      const auto base = bounds_1b(rt, {}, gini_spec);
      const auto eq = bounds_1b(rt, {constraint::total_mean(mu)}, gini_spec);
      const auto le = bounds_1b(rt, {constraint::total_mean(mu, relation::le)}, gini_spec);
      INFO("trial " << trial << " mean " << mu);
      REQUIRE(eq.lower >= base.lower - 1e-9);
      REQUIRE(eq.upper <= base.upper + 1e-9);
      REQUIRE(le.lower >= base.lower - 1e-9);
      REQUIRE(le.upper <= base.upper + 1e-9);
    }
  }
  SECTION("quantile ratio route") {
    const grouped_table q{{{5.0, 10.0}, {20.0, 30.0}, {50.0, 60.0}}, {6, 3, 1}};
    const auto spec = index_spec::quantile_ratio(0.5, 0.85);
    const auto r = bounds_1b(q, {}, spec);
    REQUIRE(r.lower == Approx(2.0).margin(1e-7));
    REQUIRE(r.upper == Approx(6.0).margin(1e-7));
    const auto con = bounds_1b(q, {constraint::total_mean(15.0)}, spec);
    REQUIRE(con.lower >= 2.0 - 1e-9);
    REQUIRE(con.upper <= 6.0 + 1e-9);
  }
}
