#include "irtbench/item_analysis.hpp"

#include <algorithm>

#include "irtbench/errors.hpp"

namespace irtbench {

const char* profile_key_name(ProfileKey key) {
  switch (key) {
    case ProfileKey::difficult: return "difficult";
    case ProfileKey::discriminative: return "discriminative";
    case ProfileKey::guessable: return "guessable";
    case ProfileKey::negative_discrimination: return "negative_discrimination";
  }
  return "difficult";
}

double profile_value(const DatasetProfile& p, ProfileKey key) {
  switch (key) {
    case ProfileKey::difficult: return p.pct_difficult;
    case ProfileKey::discriminative: return p.pct_discriminative;
    case ProfileKey::guessable: return p.pct_guessable;
    case ProfileKey::negative_discrimination: return p.pct_negative_discrimination;
  }
  return p.pct_difficult;
}

ItemFlags classify_item(const ItemParams& p, const Thresholds& t) {
  ItemFlags f;
  f.difficult = p.b > t.difficulty_limit;
  f.discriminative = p.a > t.discrimination_limit;
  f.guessable = p.c > t.guessing_limit;
  f.negative_discrimination = p.a < 0.0;
  return f;
}

DatasetProfile profile_dataset(const std::vector<ItemParams>& items, const Thresholds& t,
                               const std::string& name) {
  if (items.empty()) {
    throw ValidationError(errc::empty_item_list, "profile needs at least one item");
  }
  std::size_t difficult = 0, discriminative = 0, guessable = 0, negative = 0;
  for (const auto& p : items) {
    const auto f = classify_item(p, t);
    difficult += f.difficult;
    discriminative += f.discriminative;
    guessable += f.guessable;
    negative += f.negative_discrimination;
  }
  const double n = static_cast<double>(items.size());
  DatasetProfile prof;
  prof.dataset_name = name;
  prof.n_items = items.size();
  prof.pct_difficult = 100.0 * static_cast<double>(difficult) / n;
  prof.pct_discriminative = 100.0 * static_cast<double>(discriminative) / n;
  prof.pct_guessable = 100.0 * static_cast<double>(guessable) / n;
  prof.pct_negative_discrimination = 100.0 * static_cast<double>(negative) / n;
  return prof;
}

std::vector<DatasetProfile> rank_datasets(std::vector<DatasetProfile> profiles, ProfileKey key) {
  std::sort(profiles.begin(), profiles.end(), [key](const DatasetProfile& x, const DatasetProfile& y) {
    const double vx = profile_value(x, key);
    const double vy = profile_value(y, key);
    if (vx != vy) return vx < vy;
    return x.dataset_name < y.dataset_name;
  });
  return profiles;
}

BenchmarkSummary benchmark_summary(const std::vector<DatasetProfile>& profiles) {
  if (profiles.empty()) {
    throw ValidationError(errc::empty_profiles, "summary needs at least one profile");
  }
  BenchmarkSummary s;
  s.n_datasets = profiles.size();
  for (const auto& p : profiles) {
    if (p.pct_difficult < 27.0) ++s.difficult_lt_27_count;
    if (p.pct_difficult > 50.0) ++s.difficult_gt_50_count;
    if (100.0 - p.pct_difficult > 70.0) ++s.easy_gt_70_count;
    if (p.pct_discriminative >= 80.0) ++s.discriminative_ge_80_count;
    if (p.pct_discriminative < 50.0) ++s.discriminative_lt_50_count;
  }
  const double n = static_cast<double>(s.n_datasets);
  s.difficult_lt_27_fraction = static_cast<double>(s.difficult_lt_27_count) / n;
  s.easy_gt_70_fraction = static_cast<double>(s.easy_gt_70_count) / n;
  return s;
}

}  // namespace irtbench
