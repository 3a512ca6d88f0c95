#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "irtbench/errors.hpp"
#include "irtbench/synth.hpp"

using namespace irtbench;

namespace {

// Population-averaged hit probability: E_theta[icc(theta)] over the standard
// normal, by composite Simpson on [-8, 8].
double population_icc(double a, double b, double c) {
  const int n = 4000;
  const double lo = -8.0, hi = 8.0;
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = lo + i * h;
    const double pdf = std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
    const double p = c + (1.0 - c) / (1.0 + std::exp(-a * (t - b)));
    const double f = pdf * p;
    sum += (i == 0 || i == n) ? f : (i % 2 ? 4.0 : 2.0) * f;
  }
  return sum * h / 3.0;
}

double column_rate(const ResponseMatrix& m, std::size_t item) {
  double hits = 0.0;
  for (std::size_t r = 0; r < m.n_respondents(); ++r) hits += m.at(r, item);
  return hits / static_cast<double>(m.n_respondents());
}

FitResult as_fit(const SynthResult& s) {
  FitResult f;
  f.items = s.true_items;
  f.respondent_ids = s.matrix.respondent_ids;
  f.abilities = s.true_abilities;
  f.converged = true;
  return f;
}

}  // namespace

TEST_CASE("generate is deterministic for a fixed seed") {
  SynthSpec spec;
  spec.n_respondents = 8;
  spec.n_items = 12;
  spec.seed = 99;
  const auto r1 = generate(spec);
  const auto r2 = generate(spec);
  CHECK(r1.matrix.cells == r2.matrix.cells);
  CHECK(r1.matrix.respondent_ids == r2.matrix.respondent_ids);
  CHECK(r1.matrix.item_ids == r2.matrix.item_ids);
  for (std::size_t i = 0; i < r1.true_items.size(); ++i) {
    CHECK(r1.true_items[i].a == r2.true_items[i].a);
    CHECK(r1.true_items[i].b == r2.true_items[i].b);
    CHECK(r1.true_items[i].c == r2.true_items[i].c);
  }
  for (std::size_t r = 0; r < r1.true_abilities.size(); ++r) {
    CHECK(r1.true_abilities[r].theta == r2.true_abilities[r].theta);
  }

  SynthSpec other = spec;
  other.seed = 100;
  CHECK(generate(other).matrix.cells != r1.matrix.cells);
}

TEST_CASE("generate shapes, ids and parameter ranges") {
  SynthSpec spec;
  spec.n_respondents = 30;
  spec.n_items = 25;
  spec.seed = 4;
  spec.dataset_name = "synthy";
  const auto res = generate(spec);
  CHECK(res.matrix.dataset_name == "synthy");
  CHECK(res.matrix.n_respondents() == 30);
  CHECK(res.matrix.n_items() == 25);
  CHECK(res.matrix.respondent_ids.front() == "r0001");
  CHECK(res.matrix.respondent_ids.back() == "r0030");
  CHECK(res.matrix.item_ids.front() == "i0001");
  CHECK(res.matrix.item_ids.back() == "i0025");
  for (const auto& p : res.true_items) {
    CHECK(p.a >= spec.a_min);
    CHECK(p.a <= spec.a_max);
    CHECK(p.c >= spec.c_min);
    CHECK(p.c <= spec.c_max);
    CHECK(std::isfinite(p.b));
  }
  for (auto cell : res.matrix.cells) CHECK((cell == 0 || cell == 1));
}

TEST_CASE("rows come from per-respondent substreams: prefixes are stable") {
  SynthSpec small;
  small.n_respondents = 5;
  small.n_items = 15;
  small.seed = 31;
  SynthSpec big = small;
  big.n_respondents = 10;

  const auto rs = generate(small);
  const auto rb = generate(big);
  for (std::size_t i = 0; i < rs.true_items.size(); ++i) {
    CHECK(rs.true_items[i].a == rb.true_items[i].a);
    CHECK(rs.true_items[i].b == rb.true_items[i].b);
    CHECK(rs.true_items[i].c == rb.true_items[i].c);
  }
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(rs.true_abilities[r].theta == rb.true_abilities[r].theta);
    CHECK(rs.matrix.row(r) == rb.matrix.row(r));
  }
}

TEST_CASE("a zero-discrimination item hits at c + (1-c)/2 regardless of theta") {
  SynthSpec spec;
  spec.n_respondents = 10000;
  spec.n_items = 1;
  spec.a_min = spec.a_max = 0.0;
  spec.c_min = spec.c_max = 0.2;
  spec.seed = 12;
  const auto res = generate(spec);
  const double expected = 0.2 + 0.8 * 0.5;
  const double se = std::sqrt(expected * (1.0 - expected) / 10000.0);
  CHECK(std::abs(column_rate(res.matrix, 0) - expected) <= 3.0 * se);
}

TEST_CASE("items far below every ability saturate to all ones") {
  SynthSpec spec;
  spec.n_respondents = 20;
  spec.n_items = 50;
  spec.b_mean = -50.0;
  spec.b_sd = 0.0;
  spec.c_min = spec.c_max = 0.0;
  spec.seed = 3;
  const auto res = generate(spec);
  for (auto cell : res.matrix.cells) CHECK(cell == 1);
}

TEST_CASE("empirical hit rate approaches the population-averaged ICC") {
  SynthSpec spec;
  spec.n_respondents = 10000;
  spec.n_items = 1;
  spec.a_min = spec.a_max = 1.0;
  spec.b_mean = 0.3;
  spec.b_sd = 0.0;
  spec.c_min = spec.c_max = 0.1;
  spec.seed = 21;
  const auto res = generate(spec);
  REQUIRE(res.true_items[0].a == 1.0);
  REQUIRE(res.true_items[0].b == 0.3);
  const double want = population_icc(1.0, 0.3, 0.1);
  const double se = std::sqrt(want * (1.0 - want) / 10000.0);
  CHECK(std::abs(column_rate(res.matrix, 0) - want) <= 3.0 * se);
}

TEST_CASE("recovery_report on the identity is perfect") {
  SynthSpec spec;
  spec.n_respondents = 15;
  spec.n_items = 10;
  spec.seed = 8;
  const auto truth = generate(spec);
  const auto rep = recovery_report(truth, as_fit(truth));
  CHECK(rep.corr_a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.corr_b == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.corr_theta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.rmse_a == 0.0);
  CHECK(rep.rmse_b == 0.0);
  CHECK(rep.rmse_theta == 0.0);
  CHECK(rep.degenerate_items_excluded == 0);
}

TEST_CASE("recovery_report sees through a constant difficulty shift") {
  SynthSpec spec;
  spec.n_respondents = 15;
  spec.n_items = 10;
  spec.seed = 8;
  const auto truth = generate(spec);
  auto fitted = as_fit(truth);
  for (auto& p : fitted.items) p.b += 1.0;
  const auto rep = recovery_report(truth, fitted);
  CHECK(rep.corr_b == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.rmse_b == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.rmse_a == 0.0);
}

TEST_CASE("recovery_report matches items by id, not position") {
  SynthSpec spec;
  spec.n_respondents = 12;
  spec.n_items = 9;
  spec.seed = 17;
  const auto truth = generate(spec);
  auto fitted = as_fit(truth);
  std::reverse(fitted.items.begin(), fitted.items.end());
  const auto rep = recovery_report(truth, fitted);
  CHECK(rep.corr_a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.rmse_b == 0.0);
}

TEST_CASE("recovery_report excludes degenerate items and validates shapes") {
  SynthSpec spec;
  spec.n_respondents = 12;
  spec.n_items = 6;
  spec.seed = 5;
  const auto truth = generate(spec);
  auto fitted = as_fit(truth);
  fitted.items[2].degenerate = true;
  fitted.items[4].degenerate = true;
  const auto rep = recovery_report(truth, fitted);
  CHECK(rep.degenerate_items_excluded == 2);
  CHECK(rep.corr_a == doctest::Approx(1.0).epsilon(1e-12));

  auto short_fit = as_fit(truth);
  short_fit.items.pop_back();
  CHECK_THROWS_WITH_AS(recovery_report(truth, short_fit), doctest::Contains("LengthMismatch"),
                       ValidationError);

  auto renamed = as_fit(truth);
  renamed.items[0].item_id = "stranger";
  CHECK_THROWS_WITH_AS(recovery_report(truth, renamed), doctest::Contains("IdMismatch"),
                       ValidationError);
}

TEST_CASE("generate rejects inconsistent specs") {
  SynthSpec zero;
  zero.n_respondents = 0;
  CHECK_THROWS_WITH_AS(generate(zero), doctest::Contains("BadConfig"), ValidationError);

  SynthSpec c_bad;
  c_bad.c_min = 0.3;
  c_bad.c_max = 0.1;
  CHECK_THROWS_WITH_AS(generate(c_bad), doctest::Contains("BadConfig"), ValidationError);

  SynthSpec c_high;
  c_high.c_max = 1.0;
  CHECK_THROWS_WITH_AS(generate(c_high), doctest::Contains("BadConfig"), ValidationError);

  SynthSpec a_bad;
  a_bad.a_min = 2.0;
  a_bad.a_max = 0.5;
  CHECK_THROWS_WITH_AS(generate(a_bad), doctest::Contains("BadConfig"), ValidationError);

  SynthSpec b_bad;
  b_bad.b_sd = -0.1;
  CHECK_THROWS_WITH_AS(generate(b_bad), doctest::Contains("BadConfig"), ValidationError);
}
