#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ineq/imputation.hpp"
#include "ineq/scenario2.hpp"

using namespace ineq;
using Catch::Approx;

namespace {

interval_sample mixed_sample() {
  // Two genuine intervals and three reported values.
  interval_sample s;
  s.obs = {{0, 2}, {3, 5}, {1, 1}, {4, 4}, {2, 2}};
  return s;
}

}  // namespace

TEST_CASE("midpoint imputation fills interval centers", "[imputation]") {
  interval_sample s;
  s.obs = {{0, 2}, {4, 4}};
  baseline_options opt;
  opt.method = impute_method::midpoint;
  const auto est = baseline_gini(s, opt);
  // filled sample (1, 4): gini = 3 / (4 * 2.5)
  REQUIRE(est.gini == Approx(0.3).margin(1e-15));
  REQUIRE(est.method == "midpoint");
  REQUIRE(est.imputations == 1);
}

TEST_CASE("drop keeps only reported values", "[imputation]") {
  auto s = mixed_sample();
  baseline_options opt;
  opt.method = impute_method::drop;
  const auto est = baseline_gini(s, opt);
  REQUIRE(est.gini == Approx(gini(sorted_sample{{1, 2, 4}})).margin(1e-14));

  interval_sample no_points;
  no_points.obs = {{0, 2}};
  REQUIRE_THROWS_AS(baseline_gini(no_points, opt), no_point_data_error);
}

TEST_CASE("mean imputation restricts donors to the interval", "[imputation]") {
  auto s = mixed_sample();
  baseline_options opt;
  opt.method = impute_method::mean;
  const auto est = baseline_gini(s, opt);
  // [0,2] takes mean(1,2) = 1.5, [3,5] takes mean(4) = 4.
  REQUIRE(est.gini == Approx(gini(sorted_sample::of({1.5, 4, 1, 4, 2}))).margin(1e-14));
  REQUIRE(est.donor_fallbacks == 0);
}

TEST_CASE("mean imputation falls back to the overall donor mean", "[imputation]") {
  interval_sample s;
  s.obs = {{10, 11}, {1, 1}, {2, 2}};  // nothing observed inside [10,11]
  baseline_options opt;
  opt.method = impute_method::mean;
  const auto est = baseline_gini(s, opt);
  REQUIRE(est.donor_fallbacks == 1);
  REQUIRE(est.gini == Approx(gini(sorted_sample::of({1.5, 1, 2}))).margin(1e-14));
}

TEST_CASE("hot deck is deterministic in the seed", "[imputation]") {
  auto s = mixed_sample();
  baseline_options opt;
  opt.method = impute_method::hot_deck;
  opt.seed = 12;
  const auto a = baseline_gini(s, opt);
  const auto b = baseline_gini(s, opt);
  REQUIRE(a.gini == b.gini);
  REQUIRE(a.seed == 12);
}

TEST_CASE("multiple hot-deck imputations average over draws", "[imputation]") {
  auto s = mixed_sample();
  baseline_options single;
  single.method = impute_method::hot_deck;
  single.seed = 3;
  baseline_options multi;
  multi.method = impute_method::hot_deck_multi;
  multi.imputations = 7;
  multi.seed = 3;
  const auto em = baseline_gini(s, multi);
  REQUIRE(em.imputations == 7);
  REQUIRE(std::isfinite(em.gini));

  // With a single imputation the multi path collapses to plain hot deck.
  multi.imputations = 1;
  REQUIRE(baseline_gini(s, multi).gini == baseline_gini(s, single).gini);
}

TEST_CASE("interval-respecting imputations stay inside the identification bounds",
          "[imputation][bounds]") {
  auto s = mixed_sample();
  const auto b = gini_bounds_2(s);
  for (auto m : {impute_method::mean, impute_method::midpoint, impute_method::hot_deck,
                 impute_method::hot_deck_multi}) {
    baseline_options opt;
    opt.method = m;
    opt.seed = 77;
    const auto est = baseline_gini(s, opt);
    INFO("method " << impute_method_name(m));
    REQUIRE(est.gini >= b.lower - 1e-9);
    REQUIRE(est.gini <= b.upper + 1e-9);
  }
}
