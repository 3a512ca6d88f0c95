#include "irtbench/irt_model.hpp"

#include <algorithm>
#include <cmath>

namespace irtbench {

double stable_logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double icc(Ability theta, const ItemParams& item) {
  return item.c + (1.0 - item.c) * stable_logistic(item.a * (theta.theta - item.b));
}

double true_score(Ability theta, std::span<const ItemParams> items) {
  double sum = 0.0;
  for (const auto& item : items) sum += icc(theta, item);
  return sum;
}

double cell_log_likelihood(int u, double p) {
  p = std::clamp(p, kProbEps, 1.0 - kProbEps);
  return u ? std::log(p) : std::log(1.0 - p);
}

}  // namespace irtbench
