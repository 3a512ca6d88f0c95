#pragma once

#include <span>
#include <string>
#include <vector>

namespace irtbench {

// Three-parameter logistic item: discrimination a (slope), difficulty b
// (location on the ability scale), guessing c (lower asymptote in [0,1)).
// `degenerate` marks items whose response column was constant, so the
// parameters are clamped conventions rather than estimates.
struct ItemParams {
  std::string item_id;
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  bool degenerate = false;
};

// Latent respondent proficiency, on the same scale as item difficulty.
struct Ability {
  double theta = 0.0;
};

// Logistic in a form that cannot overflow for large |x|.
double stable_logistic(double x);

// Item characteristic curve: P(hit | theta) = c + (1-c) * logistic(a*(theta-b)).
double icc(Ability theta, const ItemParams& item);

// Sum of ICC values over an item set; the respondent's expected raw grade.
double true_score(Ability theta, std::span<const ItemParams> items);

// u*ln(p) + (1-u)*ln(1-p) with p clamped into [kProbEps, 1-kProbEps].
inline constexpr double kProbEps = 1e-10;
double cell_log_likelihood(int u, double p);

}  // namespace irtbench
