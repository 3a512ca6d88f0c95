#pragma once

#include <span>
#include <string>
#include <vector>

namespace irtbench {

// Player strength on the presentation scale: rating R, rating deviation RD
// (reliability of R; the true strength sits in [R-2RD, R+2RD] with 95%
// confidence) and volatility sigma (expected rating fluctuation).
struct RatingState {
  double rating = 1500.0;
  double rd = 350.0;
  double volatility = 0.06;
};

// One game inside a rating period, against an opponent state captured at the
// start of the period. Score: 1 win, 0 loss, 0.5 tie.
struct MatchOutcome {
  RatingState opponent;
  double score = 0.0;
};

struct TournamentConfig {
  double tau = 0.5;                // volatility system constant
  double epsilon_volatility = 1e-6;
  double tie_epsilon = 1e-6;       // True-Score equality tolerance
  RatingState initial{};
};

// Internal Glicko-2 scale: mu = (R - 1500)/173.7178, phi = RD/173.7178.
struct InternalRating {
  double mu = 0.0;
  double phi = 0.0;
};

InternalRating to_internal(const RatingState& s);
RatingState from_internal(const InternalRating& r, double volatility);

double g_factor(double phi);
double expected_score(double mu, double mu_j, double phi_j);

// Full rating-period update. An empty outcome list only grows the deviation:
// phi' = sqrt(phi^2 + sigma^2). Throws NumericalError if the volatility
// bracketing iteration exceeds 1000 steps.
RatingState update_period(const RatingState& s, std::span<const MatchOutcome> outcomes,
                          const TournamentConfig& cfg);

// 95% interval [R - 2RD, R + 2RD].
std::pair<double, double> conf_interval(const RatingState& s);

// Match scoring from True-Scores: higher wins, within tie_epsilon ties.
std::pair<double, double> score_match(double ts_a, double ts_b, double tie_epsilon);

// Per-dataset True-Score per player; datasets are ordered rating periods.
struct ScoreTable {
  std::vector<std::string> players;
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> scores;  // scores[dataset][player]
};

struct PeriodSnapshot {
  std::string dataset;
  std::vector<RatingState> states;  // aligned with TournamentResult::players
};

struct TournamentResult {
  std::vector<std::string> players;
  std::vector<RatingState> final_states;      // aligned with players
  std::vector<std::size_t> ranking;           // player indices, best first
  std::vector<PeriodSnapshot> history;        // one snapshot per dataset
};

// Round robin per dataset: every player meets every other player once, all
// matches of a dataset form one rating period, and the post-period values
// seed the next dataset. Final ranking: rating desc, then RD asc, then name.
TournamentResult run_tournament(const ScoreTable& table, const TournamentConfig& cfg);

}  // namespace irtbench
