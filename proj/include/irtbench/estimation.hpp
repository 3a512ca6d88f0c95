#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irtbench/irt_model.hpp"
#include "irtbench/response_matrix.hpp"

namespace irtbench {

struct FitConfig {
  int max_outer_iters = 20;
  double outer_tolerance = 1e-3;  // max absolute change across all params and abilities
  double a_min = -4.0, a_max = 4.0;
  double b_min = -6.0, b_max = 6.0;
  double c_min = 0.0, c_max = 0.5;
  double theta_min = -6.0, theta_max = 6.0;
  int inner_max_iters = 100;
  double inner_tolerance = 1e-6;

  void validate() const;
};

struct FitResult {
  std::vector<ItemParams> items;
  std::vector<std::string> respondent_ids;
  std::vector<Ability> abilities;  // aligned with respondent_ids
  bool converged = false;
  int outer_iterations = 0;
  std::vector<std::string> degenerate_item_ids;
  double final_log_likelihood = 0.0;
  std::vector<double> loglik_history;  // one entry per outer iteration
};

// Per-respondent accuracy standardized to mean 0 / population sd 1.
// A zero-variance accuracy vector maps to all-zero abilities.
std::vector<Ability> initial_abilities(const ResponseMatrix& m);

// Item log-likelihood over a response column with fixed abilities, and its
// analytic gradient in (a, b, c).
double item_loglik(const ItemParams& p, std::span<const double> thetas, std::span<const std::uint8_t> u);
std::array<double, 3> item_loglik_grad(const ItemParams& p, std::span<const double> thetas,
                                       std::span<const std::uint8_t> u);

// Bounded maximum-likelihood fit of one item given fixed abilities.
// Multi-start ascent; an optional warm start joins the start list. Constant
// columns come back flagged degenerate with the clamped convention
// (a=1, c=0, b=+6 for all-wrong, b=-6 for all-right).
ItemParams fit_item(std::span<const std::uint8_t> responses, std::span<const double> abilities,
                    const FitConfig& cfg, const std::string& item_id = {},
                    const std::optional<ItemParams>& warm = std::nullopt);

// Bounded maximum-likelihood fit of one respondent's ability given fixed
// items: grid scan bracketing plus golden-section refinement.
Ability fit_ability(std::span<const std::uint8_t> responses, std::span<const ItemParams> items,
                    const FitConfig& cfg, std::optional<double> warm_theta = std::nullopt);

// Alternating two-step fit: items given abilities, then abilities given
// items, with abilities re-standardized after each ability pass. Hitting the
// iteration cap is reported through converged=false, not an error.
FitResult birnbaum_fit(const ResponseMatrix& m, const FitConfig& cfg = {});

// Total log-likelihood of a full solution against a matrix.
double total_log_likelihood(const ResponseMatrix& m, std::span<const ItemParams> items,
                            std::span<const Ability> abilities);

}  // namespace irtbench
