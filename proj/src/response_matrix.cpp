#include "irtbench/response_matrix.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "irtbench/errors.hpp"
#include "irtbench/rng.hpp"

namespace irtbench {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw ValidationError(errc::duplicate_id, std::string("repeated ") + what + " id '" + id + "'");
    }
  }
}

}  // namespace

std::vector<std::uint8_t> ResponseMatrix::row(std::size_t r) const {
  return {cells.begin() + static_cast<std::ptrdiff_t>(r * n_items()),
          cells.begin() + static_cast<std::ptrdiff_t>((r + 1) * n_items())};
}

std::vector<std::uint8_t> ResponseMatrix::column(std::size_t i) const {
  std::vector<std::uint8_t> col(n_respondents());
  for (std::size_t r = 0; r < n_respondents(); ++r) col[r] = at(r, i);
  return col;
}

ResponseMatrix load_matrix(const std::filesystem::path& path, const std::string& dataset_name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open response matrix file: " + path.string());

  std::string line;
  std::size_t line_no = 0;
  ResponseMatrix m;
  m.dataset_name = dataset_name;

  if (!std::getline(in, line)) throw ValidationError(errc::empty_matrix, "file has no header: " + path.string());
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "respondent") {
    throw ValidationError(errc::non_binary_cell, "header must start with 'respondent' (line 1)");
  }
  m.item_ids.assign(header.begin() + 1, header.end());
  if (m.item_ids.empty()) throw ValidationError(errc::empty_matrix, "header declares no items");
  check_unique(m.item_ids, "item");

  const std::size_t n_items = m.item_ids.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != n_items + 1) {
      throw ValidationError(errc::ragged_rows, "line " + std::to_string(line_no) + " has " +
                                                   std::to_string(fields.size() - 1) + " cells, expected " +
                                                   std::to_string(n_items));
    }
    m.respondent_ids.push_back(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i] == "0") {
        m.cells.push_back(0);
      } else if (fields[i] == "1") {
        m.cells.push_back(1);
      } else {
        throw ValidationError(errc::non_binary_cell, "cell '" + fields[i] + "' at line " +
                                                         std::to_string(line_no) + ", column " +
                                                         std::to_string(i + 1) + " is not 0 or 1");
      }
    }
  }
  if (m.respondent_ids.empty()) throw ValidationError(errc::empty_matrix, "no respondent rows in " + path.string());
  check_unique(m.respondent_ids, "respondent");
  return m;
}

void save_matrix(const ResponseMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write response matrix file: " + path.string());
  out << "respondent";
  for (const auto& id : m.item_ids) out << ',' << id;
  out << '\n';
  for (std::size_t r = 0; r < m.n_respondents(); ++r) {
    out << m.respondent_ids[r];
    for (std::size_t i = 0; i < m.n_items(); ++i) out << ',' << (m.at(r, i) ? '1' : '0');
    out << '\n';
  }
  if (!out) throw IoError("failed writing response matrix file: " + path.string());
}

ItemLabels make_item_labels(std::vector<std::string> item_ids, std::vector<std::string> labels) {
  if (item_ids.size() != labels.size()) {
    throw ValidationError(errc::length_mismatch, "item ids and labels differ in length");
  }
  ItemLabels out;
  out.item_ids = std::move(item_ids);
  out.labels = std::move(labels);
  check_unique(out.item_ids, "item");
  for (const auto& label : out.labels) ++out.class_counts[label];
  return out;
}

ItemLabels ItemLabels::restricted_to(const std::vector<std::string>& keep_item_ids) const {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < item_ids.size(); ++i) pos.emplace(item_ids[i], i);
  std::vector<std::string> ids, labs;
  ids.reserve(keep_item_ids.size());
  labs.reserve(keep_item_ids.size());
  for (const auto& id : keep_item_ids) {
    auto it = pos.find(id);
    if (it == pos.end()) throw ValidationError(errc::id_mismatch, "item '" + id + "' has no label");
    ids.push_back(id);
    labs.push_back(labels[it->second]);
  }
  return make_item_labels(std::move(ids), std::move(labs));
}

ItemLabels load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open labels file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(errc::empty_labels, "labels file has no header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "item,label") throw ValidationError(errc::non_binary_cell, "labels header must be 'item,label'");

  std::vector<std::string> ids, labs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw ValidationError(errc::ragged_rows, "labels line " + std::to_string(line_no) + " must have 2 fields");
    }
    ids.push_back(fields[0]);
    labs.push_back(fields[1]);
  }
  if (ids.empty()) throw ValidationError(errc::empty_labels, "labels file has no rows");
  return make_item_labels(std::move(ids), std::move(labs));
}

std::string RespondentKind::id() const {
  switch (tag) {
    case Tag::real: return "real";
    case Tag::optimal: return "optimal";
    case Tag::pessimal: return "pessimal";
    case Tag::majority: return "majority";
    case Tag::minority: return "minority";
    case Tag::random: return "rand" + std::to_string(seed_index);
  }
  return "real";
}

RespondentKind RespondentKind::from_id(const std::string& respondent_id) {
  if (respondent_id == "optimal") return {Tag::optimal, 0};
  if (respondent_id == "pessimal") return {Tag::pessimal, 0};
  if (respondent_id == "majority") return {Tag::majority, 0};
  if (respondent_id == "minority") return {Tag::minority, 0};
  if (respondent_id == "rand1") return {Tag::random, 1};
  if (respondent_id == "rand2") return {Tag::random, 2};
  if (respondent_id == "rand3") return {Tag::random, 3};
  return {Tag::real, 0};
}

ResponseMatrix cap_items(const ResponseMatrix& m, std::size_t max_items, std::uint64_t seed) {
  if (max_items == 0) throw ValidationError(errc::bad_config, "max_items must be at least 1");
  if (m.n_items() <= max_items) return m;

  Rng rng(seed);
  const auto keep = rng.sample_indices(m.n_items(), max_items);

  ResponseMatrix out;
  out.dataset_name = m.dataset_name;
  out.respondent_ids = m.respondent_ids;
  out.item_ids.reserve(max_items);
  for (auto i : keep) out.item_ids.push_back(m.item_ids[i]);
  out.cells.reserve(m.n_respondents() * max_items);
  for (std::size_t r = 0; r < m.n_respondents(); ++r) {
    for (auto i : keep) out.cells.push_back(m.at(r, i));
  }
  return out;
}

std::vector<std::pair<RespondentKind, std::vector<std::uint8_t>>> synthesize_artificial(
    const ItemLabels& labels, const std::array<std::uint64_t, 3>& seeds) {
  if (labels.class_counts.empty() || labels.n_items() == 0) {
    throw ValidationError(errc::empty_labels, "artificial respondents need at least one labeled item");
  }
  if (seeds[0] == seeds[1] || seeds[0] == seeds[2] || seeds[1] == seeds[2]) {
    throw ValidationError(errc::bad_config, "the three random-respondent seeds must be distinct");
  }

  const std::size_t n = labels.n_items();

  // class_counts is an ordered map, so scanning it breaks count ties on the
  // lexicographically smallest label.
  std::string modal, minority_class;
  std::size_t max_count = 0;
  std::size_t min_count = std::numeric_limits<std::size_t>::max();
  for (const auto& [label, count] : labels.class_counts) {
    if (count > max_count) {
      max_count = count;
      modal = label;
    }
    if (count < min_count) {
      min_count = count;
      minority_class = label;
    }
  }

  std::vector<std::string> label_set;
  label_set.reserve(labels.class_counts.size());
  for (const auto& [label, count] : labels.class_counts) label_set.push_back(label);

  std::vector<std::pair<RespondentKind, std::vector<std::uint8_t>>> rows;
  rows.reserve(7);

  rows.push_back({{RespondentKind::Tag::optimal, 0}, std::vector<std::uint8_t>(n, 1)});
  rows.push_back({{RespondentKind::Tag::pessimal, 0}, std::vector<std::uint8_t>(n, 0)});

  std::vector<std::uint8_t> majority_row(n), minority_row(n);
  for (std::size_t i = 0; i < n; ++i) {
    majority_row[i] = labels.labels[i] == modal ? 1 : 0;
    minority_row[i] = labels.labels[i] == minority_class ? 1 : 0;
  }
  rows.push_back({{RespondentKind::Tag::majority, 0}, std::move(majority_row)});
  rows.push_back({{RespondentKind::Tag::minority, 0}, std::move(minority_row)});

  for (int k = 0; k < 3; ++k) {
    Rng rng(seeds[static_cast<std::size_t>(k)]);
    std::vector<std::uint8_t> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& guess = label_set[rng.below(label_set.size())];
      row[i] = guess == labels.labels[i] ? 1 : 0;
    }
    rows.push_back({{RespondentKind::Tag::random, k + 1}, std::move(row)});
  }
  return rows;
}

ResponseMatrix augment_with_artificial(const ResponseMatrix& m, const ItemLabels& labels,
                                       const std::array<std::uint64_t, 3>& seeds) {
  const ItemLabels aligned = labels.restricted_to(m.item_ids);
  auto artificial = synthesize_artificial(aligned, seeds);

  ResponseMatrix out = m;
  for (auto& [kind, row] : artificial) {
    const std::string id = kind.id();
    if (std::find(out.respondent_ids.begin(), out.respondent_ids.end(), id) != out.respondent_ids.end()) {
      throw ValidationError(errc::duplicate_id, "matrix already contains reserved respondent id '" + id + "'");
    }
    out.respondent_ids.push_back(id);
    out.cells.insert(out.cells.end(), row.begin(), row.end());
  }
  return out;
}

std::vector<double> accuracy(const ResponseMatrix& m) {
  if (m.n_respondents() == 0 || m.n_items() == 0) {
    throw ValidationError(errc::empty_matrix, "accuracy needs a nonempty matrix");
  }
  std::vector<double> acc(m.n_respondents());
  for (std::size_t r = 0; r < m.n_respondents(); ++r) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < m.n_items(); ++i) hits += m.at(r, i);
    acc[r] = static_cast<double>(hits) / static_cast<double>(m.n_items());
  }
  return acc;
}

}  // namespace irtbench
