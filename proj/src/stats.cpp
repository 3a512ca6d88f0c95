#include "irtbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "irtbench/errors.hpp"

namespace irtbench {

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < 1000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Sum over tie groups of t^3 - t for one block's values.
double tie_term(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double total = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double t = static_cast<double>(j - i);
    total += t * t * t - t;
    i = j;
  }
  return total;
}

}  // namespace

void RatingSeries::validate() const {
  if (blocks.size() < 2 || treatments.size() < 2) {
    throw ValidationError(errc::too_small, "need at least 2 blocks and 2 treatments");
  }
  if (values.size() != blocks.size()) {
    throw ValidationError(errc::length_mismatch, "value rows do not match the block list");
  }
  for (const auto& row : values) {
    if (row.size() != treatments.size()) {
      throw ValidationError(errc::length_mismatch, "a block is missing treatment values");
    }
  }
}

std::vector<double> mid_ranks(const std::vector<double>& values) {
  const std::size_t k = values.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });

  std::vector<double> ranks(k);
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j < k && values[order[j]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j + 1);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = shared;
    i = j;
  }
  return ranks;
}

TestReport friedman(const RatingSeries& series) {
  series.validate();
  const std::size_t n_blocks = series.blocks.size();
  const std::size_t k = series.treatments.size();
  const double n = static_cast<double>(n_blocks);
  const double kd = static_cast<double>(k);

  TestReport report;
  report.treatments = series.treatments;
  report.df = k - 1;

  bool all_constant = true;
  double rank_sq_sum = 0.0;
  double ties = 0.0;
  std::vector<double> rank_sums(k, 0.0);
  for (const auto& row : series.values) {
    const auto ranks = mid_ranks(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    ties += tie_term(row);
    if (!std::all_of(row.begin(), row.end(), [&](double v) { return v == row[0]; })) {
      all_constant = false;
    }
  }
  if (all_constant) {
    report.statistic = 0.0;
    report.p_value = 1.0;
    report.degenerate = true;
    return report;
  }
  for (double r : rank_sums) rank_sq_sum += r * r;

  const double chisq = 12.0 / (n * kd * (kd + 1.0)) * rank_sq_sum - 3.0 * n * (kd + 1.0);
  const double correction = 1.0 - ties / (n * kd * (kd * kd - 1.0));
  report.statistic = chisq / correction;
  report.p_value = chi_square_sf(report.statistic, static_cast<int>(k - 1));
  return report;
}

TestReport nemenyi(const RatingSeries& series) {
  TestReport report = friedman(series);
  const std::size_t n_blocks = series.blocks.size();
  const std::size_t k = series.treatments.size();
  const double n = static_cast<double>(n_blocks);
  const double kd = static_cast<double>(k);

  std::vector<double> mean_ranks(k, 0.0);
  for (const auto& row : series.values) {
    const auto ranks = mid_ranks(row);
    for (std::size_t j = 0; j < k; ++j) mean_ranks[j] += ranks[j];
  }
  for (auto& r : mean_ranks) r /= n;

  // Rank-mean gap scaled to a studentized-range statistic: the gap variance
  // is k(k+1)/(6N), and the range statistic treats the pair as two
  // independent means, hence the extra sqrt(2).
  const double se = std::sqrt(kd * (kd + 1.0) / (6.0 * n));
  std::vector<std::vector<double>> pairwise(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double q = std::abs(mean_ranks[i] - mean_ranks[j]) / se * std::numbers::sqrt2;
      const double p = std::clamp(studentized_range_sf(q, static_cast<int>(k)), 0.0, 1.0);
      pairwise[i][j] = p;
      pairwise[j][i] = p;
    }
  }
  report.pairwise = std::move(pairwise);
  return report;
}

double chi_square_sf(double x, int df) {
  if (x < 0.0 || df < 1) throw ValidationError(errc::bad_config, "chi-square sf needs x >= 0 and df >= 1");
  if (x == 0.0) return 1.0;
  const double a = 0.5 * static_cast<double>(df);
  const double half_x = 0.5 * x;
  if (half_x < a + 1.0) {
    return 1.0 - gamma_p_series(a, half_x);
  }
  return gamma_q_cf(a, half_x);
}

double studentized_range_sf(double q, int k) {
  if (k < 2) throw ValidationError(errc::bad_config, "studentized range needs k >= 2");
  if (q <= 0.0) return 1.0;
  const auto integrand = [q, k](double z) {
    return normal_pdf(z) * std::pow(normal_cdf(z) - normal_cdf(z - q), k - 1);
  };
  const double cdf = k * integrate(integrand, -8.0, 8.0 + q, 1e-10);
  return std::clamp(1.0 - cdf, 0.0, 1.0);
}

}  // namespace irtbench
