#pragma once

#include <optional>
#include <string>
#include <vector>

namespace irtbench {

// Complete block design: one value per (block, treatment) pair.
struct RatingSeries {
  std::vector<std::string> blocks;
  std::vector<std::string> treatments;
  std::vector<std::vector<double>> values;  // values[block][treatment]

  void validate() const;
};

struct TestReport {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t df = 0;
  bool degenerate = false;  // every block constant: statistic 0, p 1
  std::vector<std::string> treatments;
  std::optional<std::vector<std::vector<double>>> pairwise;  // symmetric, unit diagonal
};

// Friedman test over within-block average ranks, with the standard tie
// correction; p-value from the chi-square survival function on k-1 df.
TestReport friedman(const RatingSeries& series);

// Nemenyi post-hoc: pairwise p-values from the studentized range
// distribution (infinite degrees of freedom) over rank-mean gaps.
TestReport nemenyi(const RatingSeries& series);

// Chi-square survival function via the regularized incomplete gamma.
double chi_square_sf(double x, int df);

// P(Q > q) for the range of k independent standard normals.
double studentized_range_sf(double q, int k);

// Average ranks of one block, ties sharing their mean rank.
std::vector<double> mid_ranks(const std::vector<double>& values);

}  // namespace irtbench
