#pragma once

#include <string>
#include <vector>

#include "irtbench/irt_model.hpp"

namespace irtbench {

// Flag limits; an item qualifies only by exceeding a limit strictly.
struct Thresholds {
  double difficulty_limit = 1.0;
  double discrimination_limit = 0.75;
  double guessing_limit = 0.2;
};

struct ItemFlags {
  bool difficult = false;
  bool discriminative = false;
  bool guessable = false;
  bool negative_discrimination = false;
};

struct DatasetProfile {
  std::string dataset_name;
  std::size_t n_items = 0;
  double pct_difficult = 0.0;
  double pct_discriminative = 0.0;
  double pct_guessable = 0.0;
  double pct_negative_discrimination = 0.0;
};

enum class ProfileKey { difficult, discriminative, guessable, negative_discrimination };

const char* profile_key_name(ProfileKey key);
double profile_value(const DatasetProfile& p, ProfileKey key);

ItemFlags classify_item(const ItemParams& p, const Thresholds& t);

// Percentages over all items, degenerate ones included.
DatasetProfile profile_dataset(const std::vector<ItemParams>& items, const Thresholds& t,
                               const std::string& name);

// Ascending by the chosen percentage; ties by dataset name.
std::vector<DatasetProfile> rank_datasets(std::vector<DatasetProfile> profiles, ProfileKey key);

// Benchmark-level aggregation over dataset profiles.
struct BenchmarkSummary {
  std::size_t n_datasets = 0;
  std::size_t difficult_lt_27_count = 0;
  double difficult_lt_27_fraction = 0.0;
  std::size_t difficult_gt_50_count = 0;
  std::size_t easy_gt_70_count = 0;  // easy = 100 - pct_difficult
  double easy_gt_70_fraction = 0.0;
  std::size_t discriminative_ge_80_count = 0;
  std::size_t discriminative_lt_50_count = 0;
};

BenchmarkSummary benchmark_summary(const std::vector<DatasetProfile>& profiles);

}  // namespace irtbench
