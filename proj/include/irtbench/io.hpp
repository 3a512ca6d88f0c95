#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "irtbench/estimation.hpp"
#include "irtbench/glicko2.hpp"
#include "irtbench/irt_model.hpp"
#include "irtbench/item_analysis.hpp"
#include "irtbench/stats.hpp"

namespace irtbench::io {

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
// Builds content first, then writes in one shot; failures leave no partial file.
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Item parameter JSON: array of {item_id, a, b, c, degenerate}.
void save_item_params(const std::filesystem::path& path, const std::vector<ItemParams>& items);
std::vector<ItemParams> load_item_params(const std::filesystem::path& path);

// Abilities JSON: array of {respondent_id, theta}.
struct AbilityFile {
  std::vector<std::string> respondent_ids;
  std::vector<Ability> abilities;
};
void save_abilities(const std::filesystem::path& path, const std::vector<std::string>& respondent_ids,
                    const std::vector<Ability>& abilities);
AbilityFile load_abilities(const std::filesystem::path& path);

// Whether the item cap reduced the matrix before fitting.
struct CapInfo {
  bool capped = false;
  std::size_t original_items = 0;
  std::size_t used_items = 0;
};
void save_fit_report(const std::filesystem::path& path, const std::string& dataset_name,
                     const FitResult& fit, const CapInfo& cap);

// Profile CSV: dataset,n_items,pct_difficult,pct_discriminative,pct_guessable,pct_negative_discrimination.
void save_profiles_csv(const std::filesystem::path& path, const std::vector<DatasetProfile>& profiles);
void save_summary_json(const std::filesystem::path& path, const BenchmarkSummary& s);

// Score table CSV: player,dataset,true_score. The loader keeps first-appearance
// order for players and datasets and requires a complete table.
void save_score_table(const std::filesystem::path& path, const ScoreTable& table);
ScoreTable load_score_table(const std::filesystem::path& path);

// Ranking CSV: player,rating,rd,volatility — best first.
void save_ranking_csv(const std::filesystem::path& path, const TournamentResult& result);

// History JSON: player roster with respondent kinds, the starting state, and
// the post-period state of every player after each dataset.
struct HistoryFile {
  std::vector<std::string> players;
  std::vector<std::string> kinds;  // "real", "optimal", ... aligned with players
  std::vector<std::string> datasets;
  std::vector<std::vector<RatingState>> states;  // states[period][player]
};
void save_history_json(const std::filesystem::path& path, const TournamentResult& result,
                       const TournamentConfig& cfg);
HistoryFile load_history(const std::filesystem::path& path);

// Nemenyi heatmap CSV: treatment_i,treatment_j,p_value — the full k x k grid.
void save_nemenyi_csv(const std::filesystem::path& path, const TestReport& report);
// Test report JSON: {friedman_statistic, friedman_p, df, degenerate}.
void save_test_report(const std::filesystem::path& path, const TestReport& report);

}  // namespace irtbench::io
