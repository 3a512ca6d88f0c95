#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace irtbench {

// Dichotomous respondent x item outcomes: 1 = the respondent classified the
// item correctly, 0 = it missed. Rectangular, binary, duplicate-free ids.
struct ResponseMatrix {
  std::string dataset_name;
  std::vector<std::string> respondent_ids;
  std::vector<std::string> item_ids;
  std::vector<std::uint8_t> cells;  // row-major, respondent-by-item

  std::size_t n_respondents() const { return respondent_ids.size(); }
  std::size_t n_items() const { return item_ids.size(); }

  std::uint8_t at(std::size_t r, std::size_t i) const { return cells[r * n_items() + i]; }
  std::uint8_t& at(std::size_t r, std::size_t i) { return cells[r * n_items() + i]; }

  std::vector<std::uint8_t> row(std::size_t r) const;
  std::vector<std::uint8_t> column(std::size_t i) const;
};

// True class label per item, plus the label histogram over the item set.
struct ItemLabels {
  std::vector<std::string> item_ids;
  std::vector<std::string> labels;  // aligned with item_ids
  std::map<std::string, std::size_t> class_counts;

  std::size_t n_items() const { return item_ids.size(); }

  // Sub-labels for the given item subset, with class_counts recomputed.
  ItemLabels restricted_to(const std::vector<std::string>& keep_item_ids) const;
};

ItemLabels make_item_labels(std::vector<std::string> item_ids, std::vector<std::string> labels);

struct RespondentKind {
  enum class Tag { real, optimal, pessimal, majority, minority, random };

  Tag tag = Tag::real;
  int seed_index = 0;  // meaningful for Tag::random only (1-based)

  std::string id() const;
  bool is_artificial() const { return tag != Tag::real; }

  // Classifies a respondent id; the reserved ids produced by
  // synthesize_artificial map back to their artificial tags.
  static RespondentKind from_id(const std::string& respondent_id);
};

// Reads the response-matrix CSV contract: header `respondent,<item ids...>`,
// one row per respondent, literal 0/1 cells.
ResponseMatrix load_matrix(const std::filesystem::path& path, const std::string& dataset_name);
void save_matrix(const ResponseMatrix& m, const std::filesystem::path& path);

// Labels CSV: header `item,label`.
ItemLabels load_labels(const std::filesystem::path& path);

// Keeps at most max_items items, chosen as a seeded uniform subsample that
// preserves the original item order. No-op when the matrix is already small.
ResponseMatrix cap_items(const ResponseMatrix& m, std::size_t max_items, std::uint64_t seed);

// The seven reference respondents: optimal, pessimal, majority, minority and
// three seeded random ones. Rows are aligned with labels.item_ids.
std::vector<std::pair<RespondentKind, std::vector<std::uint8_t>>> synthesize_artificial(
    const ItemLabels& labels, const std::array<std::uint64_t, 3>& seeds);

// Appends the seven artificial rows to a matrix whose items carry labels.
ResponseMatrix augment_with_artificial(const ResponseMatrix& m, const ItemLabels& labels,
                                       const std::array<std::uint64_t, 3>& seeds);

// Fraction of hits per respondent.
std::vector<double> accuracy(const ResponseMatrix& m);

}  // namespace irtbench
