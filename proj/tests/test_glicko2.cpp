#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"

#include "irtbench/errors.hpp"
#include "irtbench/glicko2.hpp"

using namespace irtbench;

namespace {

// Straight-line Glicko-2 period update written from the published formulas,
// with a plain bisection volatility solver. Kept independent of the library.
RatingState oracle_update(const RatingState& s, const std::vector<std::pair<RatingState, double>>& games,
                          double tau) {
  const double pi = std::numbers::pi;
  const double mu = (s.rating - 1500.0) / 173.7178;
  const double phi = s.rd / 173.7178;
  if (games.empty()) {
    const double phi_up = std::sqrt(phi * phi + s.volatility * s.volatility);
    return {s.rating, 173.7178 * phi_up, s.volatility};
  }

  double v_inv = 0.0, dsum = 0.0;
  for (const auto& [opp, score] : games) {
    const double mj = (opp.rating - 1500.0) / 173.7178;
    const double pj = opp.rd / 173.7178;
    const double g = 1.0 / std::sqrt(1.0 + 3.0 * pj * pj / (pi * pi));
    const double e = 1.0 / (1.0 + std::exp(-g * (mu - mj)));
    v_inv += g * g * e * (1.0 - e);
    dsum += g * (score - e);
  }
  const double v = 1.0 / v_inv;
  const double delta = v * dsum;

  const double a0 = std::log(s.volatility * s.volatility);
  const double phi2 = phi * phi, delta2 = delta * delta, tau2 = tau * tau;
  const auto f = [&](double x) {
    const double ex = std::exp(x);
    const double den = phi2 + v + ex;
    return ex * (delta2 - phi2 - v - ex) / (2.0 * den * den) - (x - a0) / tau2;
  };

  double lo = a0, hi;
  if (delta2 > phi2 + v) {
    hi = std::log(delta2 - phi2 - v);
  } else {
    int k = 1;
    while (f(a0 - k * tau) < 0.0) ++k;
    hi = a0 - k * tau;
  }
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (flo * fmid <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  const double sigma_up = std::exp(0.25 * (lo + hi));

  const double phi_star2 = phi2 + sigma_up * sigma_up;
  const double phi_up2 = 1.0 / (1.0 / phi_star2 + 1.0 / v);
  const double mu_up = mu + phi_up2 * dsum;
  return {1500.0 + 173.7178 * mu_up, 173.7178 * std::sqrt(phi_up2), sigma_up};
}

}  // namespace

TEST_CASE("scale conversion between display and internal ratings") {
  const auto def = to_internal(RatingState{});
  CHECK(def.mu == 0.0);
  CHECK(def.phi == doctest::Approx(2.014761).epsilon(1e-6));

  CHECK(to_internal({1673.7178, 350.0, 0.06}).mu == doctest::Approx(1.0).epsilon(1e-12));

  for (const auto& s : std::vector<RatingState>{{1500, 350, 0.06}, {1464.05, 151.52, 0.059},
                                                {2200, 30, 0.02}, {812.5, 90.25, 0.1}}) {
    const auto rt = from_internal(to_internal(s), s.volatility);
    CHECK(rt.rating == doctest::Approx(s.rating).epsilon(1e-9));
    CHECK(rt.rd == doctest::Approx(s.rd).epsilon(1e-9));
    CHECK(rt.volatility == s.volatility);
  }
}

TEST_CASE("expected_score basics") {
  CHECK(g_factor(0.0) == 1.0);
  for (const double phi : {0.0, 0.5, 1.1513, 2.014761}) {
    CHECK(expected_score(0.7, 0.7, phi) == 0.5);
  }
  CHECK(expected_score(0.0, 0.0, 0.0) == 0.5);

  // Hand-evaluated: g(2.014761) = 0.66906957..., logistic(g*1).
  CHECK(expected_score(1.0, 0.0, 2.014761) == doctest::Approx(0.6612947896473632).epsilon(1e-9));

  // Swapping the players mirrors the probability.
  const double e1 = expected_score(1.0, 0.0, 2.014761);
  const double e2 = expected_score(0.0, 1.0, 2.014761);
  CHECK(e1 + e2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("update_period reproduces the classic three-game example") {
  const TournamentConfig cfg;  // tau = 0.5
  const RatingState player{1500.0, 200.0, 0.06};
  const std::vector<MatchOutcome> games{
      {{1400.0, 30.0, 0.06}, 1.0}, {{1550.0, 100.0, 0.06}, 0.0}, {{1700.0, 300.0, 0.06}, 0.0}};

  const auto got = update_period(player, games, cfg);
  CHECK(std::abs(got.rating - 1464.05) <= 0.1);
  CHECK(std::abs(got.rd - 151.52) <= 0.1);
  CHECK(got.rating == doctest::Approx(1464.050671).epsilon(1e-7));
  CHECK(got.rd == doctest::Approx(151.516524).epsilon(1e-7));
  CHECK(got.volatility == doctest::Approx(0.05999598).epsilon(1e-6));

  const auto want = oracle_update(player, {{{1400.0, 30.0, 0.06}, 1.0},
                                           {{1550.0, 100.0, 0.06}, 0.0},
                                           {{1700.0, 300.0, 0.06}, 0.0}},
                                  cfg.tau);
  CHECK(got.rating == doctest::Approx(want.rating).epsilon(1e-7));
  CHECK(got.rd == doctest::Approx(want.rd).epsilon(1e-7));
  CHECK(got.volatility == doctest::Approx(want.volatility).epsilon(1e-7));
}

TEST_CASE("an empty period only grows the deviation") {
  const TournamentConfig cfg;
  const auto got = update_period(RatingState{}, {}, cfg);
  CHECK(got.rating == 1500.0);
  CHECK(got.volatility == 0.06);
  CHECK(got.rd == doctest::Approx(350.15516610002004).epsilon(1e-9));
  CHECK(got.rd > 350.0);
}

TEST_CASE("two identical players tying stay equal and sharpen") {
  const TournamentConfig cfg;
  const RatingState s{};
  const std::vector<MatchOutcome> tie{{s, 0.5}};
  const auto a = update_period(s, tie, cfg);
  const auto b = update_period(s, tie, cfg);
  CHECK(a.rating == b.rating);
  CHECK(a.rd == b.rd);
  CHECK(a.volatility == b.volatility);
  CHECK(a.rating == 1500.0);
  CHECK(a.rd < s.rd);  // a played period always sharpens the estimate
}

TEST_CASE("update_period is invariant to match enumeration order") {
  const TournamentConfig cfg;
  const RatingState player{1500.0, 200.0, 0.06};
  std::vector<MatchOutcome> games{
      {{1400.0, 30.0, 0.06}, 1.0}, {{1550.0, 100.0, 0.06}, 0.0}, {{1700.0, 300.0, 0.06}, 0.0}};
  const auto fwd = update_period(player, games, cfg);
  std::reverse(games.begin(), games.end());
  const auto rev = update_period(player, games, cfg);
  CHECK(fwd.rating == rev.rating);
  CHECK(fwd.rd == rev.rd);
  CHECK(fwd.volatility == rev.volatility);
}

TEST_CASE("conf_interval is R +/- 2 RD") {
  CHECK(conf_interval({1718.65, 31.20, 0.06}).first == 1656.25);
  CHECK(conf_interval({1718.65, 31.20, 0.06}).second == doctest::Approx(1781.05).epsilon(1e-9));

  CHECK(conf_interval(RatingState{}) == std::pair<double, double>{800.0, 2200.0});

  const auto t1 = conf_interval({1732.56, 33.25, 0.06});
  CHECK(t1.first == doctest::Approx(1666.06).epsilon(1e-9));
  CHECK(t1.second == doctest::Approx(1799.06).epsilon(1e-9));
}

TEST_CASE("score_match decides by True-Score with a tie band") {
  CHECK(score_match(5.0, 3.0, 1e-6) == std::pair<double, double>{1.0, 0.0});
  CHECK(score_match(3.0, 5.0, 1e-6) == std::pair<double, double>{0.0, 1.0});
  CHECK(score_match(4.0, 4.0, 1e-6) == std::pair<double, double>{0.5, 0.5});
  CHECK(score_match(4.0000001, 4.0, 1e-6) == std::pair<double, double>{0.5, 0.5});
  CHECK(score_match(4.0001, 4.0, 1e-6).first == 1.0);

  // Scores always sum to one; zero epsilon with distinct scores has a winner.
  for (double d = -2.0; d <= 2.0; d += 0.37) {
    const auto [sa, sb] = score_match(d, 0.1, 1e-6);
    CHECK(sa + sb == 1.0);
  }
  const auto strict = score_match(1.0000001, 1.0, 0.0);
  CHECK(strict.first == 1.0);
  CHECK(strict.second == 0.0);

  CHECK_THROWS_WITH_AS(score_match(1.0, 2.0, -0.1), doctest::Contains("BadConfig"), ValidationError);
}

TEST_CASE("run_tournament single period matches a hand-stepped computation") {
  ScoreTable table;
  table.players = {"alpha", "beta", "gamma"};
  table.datasets = {"d1"};
  table.scores = {{10.0, 5.0, 1.0}};
  const TournamentConfig cfg;

  const auto res = run_tournament(table, cfg);
  REQUIRE(res.final_states.size() == 3);
  CHECK(res.ranking == std::vector<std::size_t>{0, 1, 2});
  CHECK(res.final_states[0].rating > res.final_states[1].rating);
  CHECK(res.final_states[1].rating > res.final_states[2].rating);

  const RatingState init{};
  const std::vector<RatingState> start{init, init, init};
  const std::vector<std::vector<double>> wins{{-1, 1, 1}, {0, -1, 1}, {0, 0, -1}};
  for (std::size_t p = 0; p < 3; ++p) {
    std::vector<std::pair<RatingState, double>> games;
    for (std::size_t q = 0; q < 3; ++q) {
      if (q == p) continue;
      games.push_back({start[q], p < q ? wins[p][q] : 1.0 - wins[q][p]});
    }
    const auto want = oracle_update(start[p], games, cfg.tau);
    CHECK(res.final_states[p].rating == doctest::Approx(want.rating).epsilon(1e-7));
    CHECK(res.final_states[p].rd == doctest::Approx(want.rd).epsilon(1e-7));
    CHECK(res.final_states[p].volatility == doctest::Approx(want.volatility).epsilon(1e-7));
    CHECK(res.final_states[p].rd < 350.0);
  }

  REQUIRE(res.history.size() == 1);
  CHECK(res.history[0].dataset == "d1");
  CHECK(res.history[0].states[0].rating == res.final_states[0].rating);
}

TEST_CASE("identical scores everywhere give identical final states") {
  ScoreTable table;
  table.players = {"a", "b", "c", "d"};
  table.datasets = {"d1", "d2", "d3"};
  table.scores = {{4.0, 4.0, 4.0, 4.0}, {7.5, 7.5, 7.5, 7.5}, {1.0, 1.0, 1.0, 1.0}};
  const auto res = run_tournament(table, TournamentConfig{});
  for (std::size_t p = 1; p < 4; ++p) {
    CHECK(res.final_states[p].rating == res.final_states[0].rating);
    CHECK(res.final_states[p].rd == res.final_states[0].rd);
  }
  // All tied -> ranking falls back to the name order.
  CHECK(res.players[res.ranking[0]] == "a");
  CHECK(res.players[res.ranking[3]] == "d");
}

TEST_CASE("a player dominating every period finishes first, the dominated one last") {
  ScoreTable table;
  table.players = {"mid1", "dom", "mid2", "sub"};
  table.datasets = {"d1", "d2", "d3"};
  table.scores = {{5.0, 9.0, 4.0, 1.0}, {6.0, 9.5, 5.5, 0.5}, {3.0, 8.0, 2.0, 0.1}};
  const auto res = run_tournament(table, TournamentConfig{});
  CHECK(res.players[res.ranking[0]] == "dom");
  CHECK(res.players[res.ranking[3]] == "sub");
  REQUIRE(res.history.size() == 3);
  for (const auto& snap : res.history) CHECK(snap.states.size() == 4);
  CHECK(res.history.back().states[1].rating == res.final_states[1].rating);
}

TEST_CASE("relabeling players permutes results without changing them") {
  ScoreTable t1;
  t1.players = {"p1", "p2", "p3"};
  t1.datasets = {"d1", "d2"};
  t1.scores = {{3.0, 8.0, 5.0}, {4.0, 6.0, 6.0}};

  ScoreTable t2;
  t2.players = {"p3", "p1", "p2"};
  t2.datasets = {"d1", "d2"};
  t2.scores = {{5.0, 3.0, 8.0}, {6.0, 4.0, 6.0}};

  const auto r1 = run_tournament(t1, TournamentConfig{});
  const auto r2 = run_tournament(t2, TournamentConfig{});

  for (std::size_t i = 0; i < 3; ++i) {
    const auto& name = t1.players[i];
    const std::size_t j = name == "p3" ? 0 : (name == "p1" ? 1 : 2);
    CHECK(r1.final_states[i].rating == r2.final_states[j].rating);
    CHECK(r1.final_states[i].rd == r2.final_states[j].rd);
    CHECK(r1.final_states[i].volatility == r2.final_states[j].volatility);
  }
  std::vector<std::string> names1, names2;
  for (auto idx : r1.ranking) names1.push_back(r1.players[idx]);
  for (auto idx : r2.ranking) names2.push_back(r2.players[idx]);
  CHECK(names1 == names2);
}

TEST_CASE("run_tournament validates its score table") {
  ScoreTable solo;
  solo.players = {"only"};
  solo.datasets = {"d1"};
  solo.scores = {{1.0}};
  CHECK_THROWS_WITH_AS(run_tournament(solo, TournamentConfig{}),
                       doctest::Contains("FewerThanTwoPlayers"), ValidationError);

  ScoreTable missing;
  missing.players = {"a", "b"};
  missing.datasets = {"d1"};
  missing.scores = {{1.0}};
  try {
    run_tournament(missing, TournamentConfig{});
    FAIL("expected MissingScore");
  } catch (const ValidationError& e) {
    CHECK(e.code() == errc::missing_score);
    CHECK(std::string(e.what()).find("d1") != std::string::npos);
  }

  ScoreTable short_rows;
  short_rows.players = {"a", "b"};
  short_rows.datasets = {"d1", "d2"};
  short_rows.scores = {{1.0, 2.0}};
  CHECK_THROWS_WITH_AS(run_tournament(short_rows, TournamentConfig{}),
                       doctest::Contains("MissingScore"), ValidationError);
}
