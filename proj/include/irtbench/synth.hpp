#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irtbench/estimation.hpp"
#include "irtbench/irt_model.hpp"
#include "irtbench/response_matrix.hpp"

namespace irtbench {

// Generation recipe for a synthetic response matrix with known parameters.
struct SynthSpec {
  std::size_t n_respondents = 100;
  std::size_t n_items = 100;
  double a_min = 0.5, a_max = 2.0;
  double b_mean = 0.0, b_sd = 1.0;
  double c_min = 0.0, c_max = 0.2;
  std::uint64_t seed = 1;
  std::string dataset_name = "synthetic";

  void validate() const;
};

struct SynthResult {
  ResponseMatrix matrix;
  std::vector<ItemParams> true_items;
  std::vector<Ability> true_abilities;
};

// Abilities are standard normal; item parameters follow the requested ranges;
// each cell is an independent coin flip with probability icc(theta, item).
// Rows draw from per-respondent substreams, so the matrix for a given seed
// does not depend on how many rows are generated or in which order.
SynthResult generate(const SynthSpec& spec);

struct RecoveryReport {
  double corr_a = 0.0, corr_b = 0.0, corr_theta = 0.0;
  double rmse_a = 0.0, rmse_b = 0.0, rmse_theta = 0.0;
  std::size_t degenerate_items_excluded = 0;
};

// Pearson correlation and RMSE between true and fitted values, matched by id.
// Degenerate items are left out of the a/b comparisons.
RecoveryReport recovery_report(const SynthResult& truth, const FitResult& fitted);

}  // namespace irtbench
