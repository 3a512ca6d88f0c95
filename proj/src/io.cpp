#include "irtbench/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "irtbench/errors.hpp"
#include "irtbench/response_matrix.hpp"

namespace irtbench::io {

namespace {

using nlohmann::json;

double parse_double(const std::string& s, const std::filesystem::path& path) {
  double v{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || p != last) {
    throw IoError(path.string() + ": bad numeric field '" + s + "'");
  }
  return v;
}

json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw IoError(path.string() + ": not valid JSON");
  }
  return j;
}

const json& require(const json& obj, const char* key, const std::filesystem::path& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw IoError(path.string() + ": missing field '" + key + "'");
  }
  return *it;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

const char* tag_name(RespondentKind::Tag t) {
  switch (t) {
    case RespondentKind::Tag::real: return "real";
    case RespondentKind::Tag::optimal: return "optimal";
    case RespondentKind::Tag::pessimal: return "pessimal";
    case RespondentKind::Tag::majority: return "majority";
    case RespondentKind::Tag::minority: return "minority";
    case RespondentKind::Tag::random: return "random";
  }
  return "real";
}

json state_to_json(const RatingState& s) {
  return json{{"rating", s.rating}, {"rd", s.rd}, {"volatility", s.volatility}};
}

RatingState state_from_json(const json& j, const std::filesystem::path& path) {
  RatingState s;
  s.rating = require(j, "rating", path).get<double>();
  s.rd = require(j, "rd", path).get<double>();
  s.volatility = require(j, "volatility", path).get<double>();
  return s;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return std::move(out).str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out.good()) throw IoError("write failure on '" + path.string() + "'");
}

void save_item_params(const std::filesystem::path& path, const std::vector<ItemParams>& items) {
  json arr = json::array();
  for (const auto& it : items) {
    arr.push_back(json{{"item_id", it.item_id},
                       {"a", it.a},
                       {"b", it.b},
                       {"c", it.c},
                       {"degenerate", it.degenerate}});
  }
  write_text_file(path, arr.dump(2) + "\n");
}

std::vector<ItemParams> load_item_params(const std::filesystem::path& path) {
  const json arr = parse_json_file(path);
  if (!arr.is_array()) throw IoError(path.string() + ": expected a JSON array");
  std::vector<ItemParams> items;
  items.reserve(arr.size());
  for (const auto& j : arr) {
    ItemParams p;
    p.item_id = require(j, "item_id", path).get<std::string>();
    p.a = require(j, "a", path).get<double>();
    p.b = require(j, "b", path).get<double>();
    p.c = require(j, "c", path).get<double>();
    p.degenerate = require(j, "degenerate", path).get<bool>();
    items.push_back(std::move(p));
  }
  return items;
}

void save_abilities(const std::filesystem::path& path, const std::vector<std::string>& respondent_ids,
                    const std::vector<Ability>& abilities) {
  if (respondent_ids.size() != abilities.size()) {
    throw ValidationError(errc::length_mismatch, "respondent ids and abilities differ in length");
  }
  json arr = json::array();
  for (std::size_t i = 0; i < abilities.size(); ++i) {
    arr.push_back(json{{"respondent_id", respondent_ids[i]}, {"theta", abilities[i].theta}});
  }
  write_text_file(path, arr.dump(2) + "\n");
}

AbilityFile load_abilities(const std::filesystem::path& path) {
  const json arr = parse_json_file(path);
  if (!arr.is_array()) throw IoError(path.string() + ": expected a JSON array");
  AbilityFile file;
  for (const auto& j : arr) {
    file.respondent_ids.push_back(require(j, "respondent_id", path).get<std::string>());
    file.abilities.push_back({require(j, "theta", path).get<double>()});
  }
  return file;
}

void save_fit_report(const std::filesystem::path& path, const std::string& dataset_name,
                     const FitResult& fit, const CapInfo& cap) {
  json j{{"dataset", dataset_name},
         {"converged", fit.converged},
         {"outer_iterations", fit.outer_iterations},
         {"degenerate_item_ids", fit.degenerate_item_ids},
         {"final_log_likelihood", fit.final_log_likelihood},
         {"loglik_history", fit.loglik_history},
         {"capped", cap.capped},
         {"original_items", cap.original_items},
         {"used_items", cap.used_items}};
  write_text_file(path, j.dump(2) + "\n");
}

void save_profiles_csv(const std::filesystem::path& path, const std::vector<DatasetProfile>& profiles) {
  std::string out =
      "dataset,n_items,pct_difficult,pct_discriminative,pct_guessable,pct_negative_discrimination\n";
  for (const auto& p : profiles) {
    out += p.dataset_name + ',' + std::to_string(p.n_items) + ',' + format_double(p.pct_difficult) +
           ',' + format_double(p.pct_discriminative) + ',' + format_double(p.pct_guessable) + ',' +
           format_double(p.pct_negative_discrimination) + '\n';
  }
  write_text_file(path, out);
}

void save_summary_json(const std::filesystem::path& path, const BenchmarkSummary& s) {
  json j{{"n_datasets", s.n_datasets},
         {"difficult_lt_27_count", s.difficult_lt_27_count},
         {"difficult_lt_27_fraction", s.difficult_lt_27_fraction},
         {"difficult_gt_50_count", s.difficult_gt_50_count},
         {"easy_gt_70_count", s.easy_gt_70_count},
         {"easy_gt_70_fraction", s.easy_gt_70_fraction},
         {"discriminative_ge_80_count", s.discriminative_ge_80_count},
         {"discriminative_lt_50_count", s.discriminative_lt_50_count}};
  write_text_file(path, j.dump(2) + "\n");
}

void save_score_table(const std::filesystem::path& path, const ScoreTable& table) {
  std::string out = "player,dataset,true_score\n";
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    for (std::size_t p = 0; p < table.players.size(); ++p) {
      out += table.players[p] + ',' + table.datasets[d] + ',' + format_double(table.scores[d][p]) + '\n';
    }
  }
  write_text_file(path, out);
}

ScoreTable load_score_table(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "player,dataset,true_score") {
    throw IoError(path.string() + ": expected header 'player,dataset,true_score'");
  }
  ScoreTable table;
  std::map<std::string, std::size_t> player_index;
  std::map<std::string, std::size_t> dataset_index;
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto fields = split_csv_line(lines[ln]);
    if (fields.size() != 3) {
      throw IoError(path.string() + ": line " + std::to_string(ln + 1) + " does not have 3 fields");
    }
    const auto [pit, p_new] = player_index.try_emplace(fields[0], table.players.size());
    if (p_new) table.players.push_back(fields[0]);
    const auto [dit, d_new] = dataset_index.try_emplace(fields[1], table.datasets.size());
    if (d_new) table.datasets.push_back(fields[1]);
    const auto key = std::make_pair(dit->second, pit->second);
    if (!cells.emplace(key, parse_double(fields[2], path)).second) {
      throw ValidationError(errc::duplicate_id, "player '" + fields[0] + "' scored twice on dataset '" +
                                                    fields[1] + "'");
    }
  }
  table.scores.assign(table.datasets.size(), std::vector<double>(table.players.size()));
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    for (std::size_t p = 0; p < table.players.size(); ++p) {
      const auto it = cells.find({d, p});
      if (it == cells.end()) {
        throw ValidationError(errc::missing_score, "player '" + table.players[p] +
                                                       "' has no score on dataset '" +
                                                       table.datasets[d] + "'");
      }
      table.scores[d][p] = it->second;
    }
  }
  return table;
}

void save_ranking_csv(const std::filesystem::path& path, const TournamentResult& result) {
  std::string out = "player,rating,rd,volatility\n";
  for (const std::size_t idx : result.ranking) {
    const auto& s = result.final_states[idx];
    out += result.players[idx] + ',' + format_double(s.rating) + ',' + format_double(s.rd) + ',' +
           format_double(s.volatility) + '\n';
  }
  write_text_file(path, out);
}

void save_history_json(const std::filesystem::path& path, const TournamentResult& result,
                       const TournamentConfig& cfg) {
  json players = json::array();
  for (const auto& name : result.players) {
    players.push_back(json{{"player", name}, {"kind", tag_name(RespondentKind::from_id(name).tag)}});
  }
  json periods = json::array();
  for (const auto& snap : result.history) {
    json states = json::array();
    for (std::size_t p = 0; p < result.players.size(); ++p) {
      json s = state_to_json(snap.states[p]);
      s["player"] = result.players[p];
      states.push_back(std::move(s));
    }
    periods.push_back(json{{"dataset", snap.dataset}, {"states", std::move(states)}});
  }
  json j{{"players", std::move(players)},
         {"initial", state_to_json(cfg.initial)},
         {"tau", cfg.tau},
         {"tie_epsilon", cfg.tie_epsilon},
         {"periods", std::move(periods)}};
  write_text_file(path, j.dump(2) + "\n");
}

HistoryFile load_history(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  HistoryFile file;
  std::map<std::string, std::size_t> index;
  for (const auto& pj : require(j, "players", path)) {
    index.emplace(require(pj, "player", path).get<std::string>(), file.players.size());
    file.players.push_back(require(pj, "player", path).get<std::string>());
    file.kinds.push_back(require(pj, "kind", path).get<std::string>());
  }
  for (const auto& period : require(j, "periods", path)) {
    file.datasets.push_back(require(period, "dataset", path).get<std::string>());
    std::vector<RatingState> row(file.players.size());
    std::vector<bool> seen(file.players.size(), false);
    for (const auto& sj : require(period, "states", path)) {
      const std::string name = require(sj, "player", path).get<std::string>();
      const auto it = index.find(name);
      if (it == index.end()) {
        throw ValidationError(errc::id_mismatch, "history period names unknown player '" + name + "'");
      }
      row[it->second] = state_from_json(sj, path);
      seen[it->second] = true;
    }
    for (std::size_t p = 0; p < seen.size(); ++p) {
      if (!seen[p]) {
        throw ValidationError(errc::missing_score, "history period '" + file.datasets.back() +
                                                       "' lacks a state for player '" +
                                                       file.players[p] + "'");
      }
    }
    file.states.push_back(std::move(row));
  }
  return file;
}

void save_nemenyi_csv(const std::filesystem::path& path, const TestReport& report) {
  if (!report.pairwise) {
    throw ValidationError(errc::bad_config, "report carries no pairwise matrix");
  }
  std::string out = "treatment_i,treatment_j,p_value\n";
  const auto& m = *report.pairwise;
  for (std::size_t i = 0; i < report.treatments.size(); ++i) {
    for (std::size_t j = 0; j < report.treatments.size(); ++j) {
      out += report.treatments[i] + ',' + report.treatments[j] + ',' + format_double(m[i][j]) + '\n';
    }
  }
  write_text_file(path, out);
}

void save_test_report(const std::filesystem::path& path, const TestReport& report) {
  json j{{"friedman_statistic", report.statistic},
         {"friedman_p", report.p_value},
         {"df", report.df},
         {"degenerate", report.degenerate}};
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace irtbench::io
