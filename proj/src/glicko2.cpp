#include "irtbench/glicko2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "irtbench/errors.hpp"

namespace irtbench {

namespace {

constexpr double kScale = 173.7178;
constexpr double kBaseRating = 1500.0;

struct Term {
  double mu_j, phi_j, score;
};

}  // namespace

InternalRating to_internal(const RatingState& s) {
  return {(s.rating - kBaseRating) / kScale, s.rd / kScale};
}

RatingState from_internal(const InternalRating& r, double volatility) {
  return {kBaseRating + kScale * r.mu, kScale * r.phi, volatility};
}

double g_factor(double phi) {
  return 1.0 / std::sqrt(1.0 + 3.0 * phi * phi / (std::numbers::pi * std::numbers::pi));
}

double expected_score(double mu, double mu_j, double phi_j) {
  return 1.0 / (1.0 + std::exp(-g_factor(phi_j) * (mu - mu_j)));
}

RatingState update_period(const RatingState& s, std::span<const MatchOutcome> outcomes,
                          const TournamentConfig& cfg) {
  const auto [mu, phi] = to_internal(s);

  if (outcomes.empty()) {
    const double phi_up = std::sqrt(phi * phi + s.volatility * s.volatility);
    return from_internal({mu, phi_up}, s.volatility);
  }

  // Canonical term order: the period update is a sum over games, so sorting
  // the terms makes the result independent of match enumeration order.
  std::vector<Term> terms;
  terms.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    const auto opp = to_internal(o.opponent);
    terms.push_back({opp.mu, opp.phi, o.score});
  }
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) {
    if (x.mu_j != y.mu_j) return x.mu_j < y.mu_j;
    if (x.phi_j != y.phi_j) return x.phi_j < y.phi_j;
    return x.score < y.score;
  });

  double v_inv = 0.0;
  double delta_sum = 0.0;
  for (const auto& t : terms) {
    const double g = g_factor(t.phi_j);
    const double e = expected_score(mu, t.mu_j, t.phi_j);
    v_inv += g * g * e * (1.0 - e);
    delta_sum += g * (t.score - e);
  }
  const double v = 1.0 / v_inv;
  const double delta = v * delta_sum;

  // Volatility equation solved by the Illinois-style bracketing iteration.
  const double a = std::log(s.volatility * s.volatility);
  const double tau2 = cfg.tau * cfg.tau;
  const double phi2 = phi * phi;
  const double delta2 = delta * delta;
  auto f = [&](double x) {
    const double ex = std::exp(x);
    const double denom = phi2 + v + ex;
    return ex * (delta2 - phi2 - v - ex) / (2.0 * denom * denom) - (x - a) / tau2;
  };

  double A = a;
  double B;
  if (delta2 > phi2 + v) {
    B = std::log(delta2 - phi2 - v);
  } else {
    int k = 1;
    while (f(a - k * cfg.tau) < 0.0) {
      ++k;
      if (k > 1000) {
        throw NumericalError(errc::volatility_non_convergence, "volatility bracket search exceeded 1000 steps");
      }
    }
    B = a - k * cfg.tau;
  }

  double fA = f(A);
  double fB = f(B);
  int steps = 0;
  while (std::abs(B - A) > cfg.epsilon_volatility) {
    if (++steps > 1000) {
      throw NumericalError(errc::volatility_non_convergence, "volatility iteration exceeded 1000 steps");
    }
    const double C = A + (A - B) * fA / (fB - fA);
    const double fC = f(C);
    if (fC * fB <= 0.0) {
      A = B;
      fA = fB;
    } else {
      fA /= 2.0;
    }
    B = C;
    fB = fC;
  }
  const double sigma_up = std::exp(A / 2.0);

  const double phi_star = std::sqrt(phi2 + sigma_up * sigma_up);
  const double phi_up = 1.0 / std::sqrt(1.0 / (phi_star * phi_star) + 1.0 / v);
  const double mu_up = mu + phi_up * phi_up * delta_sum;
  return from_internal({mu_up, phi_up}, sigma_up);
}

std::pair<double, double> conf_interval(const RatingState& s) {
  return {s.rating - 2.0 * s.rd, s.rating + 2.0 * s.rd};
}

std::pair<double, double> score_match(double ts_a, double ts_b, double tie_epsilon) {
  if (tie_epsilon < 0.0) throw ValidationError(errc::bad_config, "tie_epsilon must be nonnegative");
  if (std::abs(ts_a - ts_b) <= tie_epsilon) return {0.5, 0.5};
  if (ts_a > ts_b) return {1.0, 0.0};
  return {0.0, 1.0};
}

TournamentResult run_tournament(const ScoreTable& table, const TournamentConfig& cfg) {
  const std::size_t n = table.players.size();
  if (n < 2) {
    throw ValidationError(errc::fewer_than_two_players, "a tournament needs at least 2 players");
  }
  if (table.scores.size() != table.datasets.size()) {
    throw ValidationError(errc::missing_score, "score table rows do not match the dataset list");
  }
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    if (table.scores[d].size() != n) {
      throw ValidationError(errc::missing_score,
                            "dataset '" + table.datasets[d] + "' lacks a score for some player");
    }
  }

  TournamentResult result;
  result.players = table.players;
  std::vector<RatingState> states(n, cfg.initial);

  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    const auto& scores = table.scores[d];
    const std::vector<RatingState> period_start = states;

    for (std::size_t p = 0; p < n; ++p) {
      std::vector<MatchOutcome> outcomes;
      outcomes.reserve(n - 1);
      for (std::size_t q = 0; q < n; ++q) {
        if (q == p) continue;
        const double sp = score_match(scores[p], scores[q], cfg.tie_epsilon).first;
        outcomes.push_back({period_start[q], sp});
      }
      states[p] = update_period(period_start[p], outcomes, cfg);
    }
    result.history.push_back({table.datasets[d], states});
  }

  result.final_states = states;
  result.ranking.resize(n);
  std::iota(result.ranking.begin(), result.ranking.end(), std::size_t{0});
  std::sort(result.ranking.begin(), result.ranking.end(), [&](std::size_t x, std::size_t y) {
    if (states[x].rating != states[y].rating) return states[x].rating > states[y].rating;
    if (states[x].rd != states[y].rd) return states[x].rd < states[y].rd;
    return result.players[x] < result.players[y];
  });
  return result;
}

}  // namespace irtbench
