// Command-line front end: ingest -> fit -> analyze -> truescore -> tournament
// -> stats, staged through files so every step is independently inspectable.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "irtbench/errors.hpp"
#include "irtbench/estimation.hpp"
#include "irtbench/glicko2.hpp"
#include "irtbench/io.hpp"
#include "irtbench/irt_model.hpp"
#include "irtbench/item_analysis.hpp"
#include "irtbench/response_matrix.hpp"
#include "irtbench/rng.hpp"
#include "irtbench/stats.hpp"
#include "irtbench/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace irtbench;

namespace {

// Structured warnings, one JSON object per line. No timestamps: identical
// runs must produce identical files.
struct RunLog {
  std::vector<json> entries;

  void add(json e) { entries.push_back(std::move(e)); }

  void write(const fs::path& path) const {
    std::string out;
    for (const auto& e : entries) out += e.dump() + "\n";
    io::write_text_file(path, out);
  }
};

void ensure_out_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());
}

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw IoError("input file '" + p.string() + "' does not exist");
}

std::array<std::uint64_t, 3> artificial_seeds(std::uint64_t seed) {
  const std::uint64_t base = Rng::mix(seed);
  return {base ^ 1, base ^ 2, base ^ 3};
}

std::string strip_suffix(std::string s, const std::string& suffix) {
  if (s.size() > suffix.size() && s.ends_with(suffix)) s.resize(s.size() - suffix.size());
  return s;
}

// ---- fit ------------------------------------------------------------------

struct FitOutcome {
  FitResult fit;
  io::CapInfo cap;
};

FitOutcome fit_dataset(ResponseMatrix m, const std::optional<ItemLabels>& labels,
                       std::size_t max_items, std::uint64_t seed, RunLog& log) {
  io::CapInfo cap{false, m.n_items(), m.n_items()};
  if (m.n_items() > max_items) {
    m = cap_items(m, max_items, seed);
    cap.capped = true;
    cap.used_items = m.n_items();
    log.add({{"event", "item_cap"},
             {"dataset", m.dataset_name},
             {"original_items", cap.original_items},
             {"used_items", cap.used_items}});
  }
  if (labels) {
    m = augment_with_artificial(m, *labels, artificial_seeds(seed));
  }

  FitOutcome outcome{birnbaum_fit(m, FitConfig{}), cap};
  if (!outcome.fit.converged) {
    std::cerr << "warning: fit for dataset '" << m.dataset_name
              << "' hit the iteration cap before converging\n";
    log.add({{"event", "non_convergence"},
             {"dataset", m.dataset_name},
             {"outer_iterations", outcome.fit.outer_iterations}});
  }
  if (!outcome.fit.degenerate_item_ids.empty()) {
    log.add({{"event", "degenerate_items"},
             {"dataset", m.dataset_name},
             {"item_ids", outcome.fit.degenerate_item_ids}});
  }
  return outcome;
}

void save_fit_outputs(const fs::path& out, const std::string& name, const FitOutcome& o) {
  io::save_item_params(out / (name + "_items.json"), o.fit.items);
  io::save_abilities(out / (name + "_abilities.json"), o.fit.respondent_ids, o.fit.abilities);
  io::save_fit_report(out / (name + "_fit_report.json"), name, o.fit, o.cap);
}

// ---- analyze ---------------------------------------------------------------

void run_analyze(const fs::path& out, const std::vector<std::pair<std::string, std::vector<ItemParams>>>& fitted,
                 const Thresholds& t) {
  std::vector<DatasetProfile> profiles;
  profiles.reserve(fitted.size());
  for (const auto& [name, items] : fitted) {
    profiles.push_back(profile_dataset(items, t, name));
  }
  io::save_profiles_csv(out / "profiles.csv", profiles);
  io::save_summary_json(out / "summary.json", benchmark_summary(profiles));
  for (const ProfileKey key : {ProfileKey::difficult, ProfileKey::discriminative,
                               ProfileKey::guessable, ProfileKey::negative_discrimination}) {
    const std::string file = std::string("ranking_by_") + profile_key_name(key) + ".csv";
    io::save_profiles_csv(out / file, rank_datasets(profiles, key));
  }
}

// ---- truescore --------------------------------------------------------------

struct DatasetFit {
  std::string name;
  std::vector<ItemParams> items;
  io::AbilityFile abilities;
};

ScoreTable build_score_table(const std::vector<DatasetFit>& fits) {
  if (fits.empty()) throw ValidationError(errc::too_small, "no datasets to score");
  ScoreTable table;
  table.players = fits[0].abilities.respondent_ids;
  std::map<std::string, std::size_t> index;
  for (std::size_t p = 0; p < table.players.size(); ++p) {
    if (!index.emplace(table.players[p], p).second) {
      throw ValidationError(errc::duplicate_id, "respondent '" + table.players[p] + "' appears twice");
    }
  }
  for (const auto& f : fits) {
    table.datasets.push_back(f.name);
    if (f.abilities.respondent_ids.size() != table.players.size()) {
      throw ValidationError(errc::id_mismatch,
                            "dataset '" + f.name + "' has a different respondent roster");
    }
    std::vector<double> row(table.players.size());
    for (std::size_t r = 0; r < f.abilities.respondent_ids.size(); ++r) {
      const auto it = index.find(f.abilities.respondent_ids[r]);
      if (it == index.end()) {
        throw ValidationError(errc::id_mismatch, "dataset '" + f.name + "' names respondent '" +
                                                     f.abilities.respondent_ids[r] +
                                                     "' missing from the first dataset");
      }
      row[it->second] = true_score(f.abilities.abilities[r], f.items);
    }
    table.scores.push_back(std::move(row));
  }
  return table;
}

// ---- stats ------------------------------------------------------------------

RatingSeries series_from_history(const io::HistoryFile& history) {
  RatingSeries series;
  std::vector<std::size_t> real;
  for (std::size_t p = 0; p < history.players.size(); ++p) {
    if (history.kinds[p] == "real") real.push_back(p);
  }
  if (real.size() < 2) {
    throw ValidationError(errc::fewer_than_two_players,
                          "need at least 2 real players after removing artificial ones");
  }
  if (history.datasets.size() < 2) {
    throw ValidationError(errc::too_small, "need at least 2 rating periods");
  }
  series.blocks = history.datasets;
  for (const std::size_t p : real) series.treatments.push_back(history.players[p]);
  for (std::size_t d = 0; d < history.datasets.size(); ++d) {
    std::vector<double> row;
    row.reserve(real.size());
    for (const std::size_t p : real) row.push_back(history.states[d][p].rating);
    series.values.push_back(std::move(row));
  }
  return series;
}

void run_stats(const fs::path& out, const io::HistoryFile& history, RunLog& log) {
  const RatingSeries series = series_from_history(history);
  const TestReport post = nemenyi(series);
  if (post.degenerate) {
    std::cerr << "warning: degenerate rating series (every period ranks all players equally)\n";
    log.add({{"event", "degenerate_series"}});
  }
  io::save_test_report(out / "friedman.json", post);
  io::save_nemenyi_csv(out / "nemenyi.csv", post);
}

// ---- synth ------------------------------------------------------------------

void run_synth(const fs::path& out, const SynthSpec& spec) {
  const SynthResult result = generate(spec);
  save_matrix(result.matrix, out / (spec.dataset_name + "_matrix.csv"));
  io::save_item_params(out / (spec.dataset_name + "_true_items.json"), result.true_items);
  io::save_abilities(out / (spec.dataset_name + "_true_abilities.json"),
                     result.matrix.respondent_ids, result.true_abilities);
}

// ---- report (full pipeline from a manifest) ----------------------------------

struct Manifest {
  std::uint64_t seed = 1;
  std::vector<SynthSpec> synth;
  struct Ingest {
    std::string name;
    fs::path matrix;
    std::optional<fs::path> labels;
  };
  std::vector<Ingest> datasets;
  std::size_t max_items = 500;
  Thresholds thresholds;
  TournamentConfig tournament;
};

Manifest load_manifest(const fs::path& path, std::uint64_t default_seed) {
  const std::string text = io::read_text_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError(path.string() + ": not valid JSON");

  try {
    Manifest m;
    m.seed = j.value("seed", default_seed);
    std::size_t synth_index = 0;
    for (const auto& sj : j.value("synth", json::array())) {
      ++synth_index;
      SynthSpec spec;
      spec.dataset_name = sj.value("name", "synth" + std::to_string(synth_index));
      spec.n_respondents = sj.value("respondents", spec.n_respondents);
      spec.n_items = sj.value("items", spec.n_items);
      spec.a_min = sj.value("a_min", spec.a_min);
      spec.a_max = sj.value("a_max", spec.a_max);
      spec.b_mean = sj.value("b_mean", spec.b_mean);
      spec.b_sd = sj.value("b_sd", spec.b_sd);
      spec.c_min = sj.value("c_min", spec.c_min);
      spec.c_max = sj.value("c_max", spec.c_max);
      spec.seed = sj.value("seed", Rng::mix(m.seed) ^ (1000 + synth_index));
      m.synth.push_back(spec);
    }
    for (const auto& dj : j.value("datasets", json::array())) {
      Manifest::Ingest in;
      in.matrix = fs::path(dj.at("matrix").get<std::string>());
      in.name = dj.value("name", strip_suffix(in.matrix.stem().string(), "_matrix"));
      if (dj.contains("labels")) in.labels = fs::path(dj.at("labels").get<std::string>());
      m.datasets.push_back(std::move(in));
    }
    m.max_items = j.value("max_items", m.max_items);
    if (j.contains("thresholds")) {
      const auto& tj = j.at("thresholds");
      m.thresholds.difficulty_limit = tj.value("difficulty_limit", m.thresholds.difficulty_limit);
      m.thresholds.discrimination_limit =
          tj.value("discrimination_limit", m.thresholds.discrimination_limit);
      m.thresholds.guessing_limit = tj.value("guessing_limit", m.thresholds.guessing_limit);
    }
    m.tournament.tau = j.value("tau", m.tournament.tau);
    m.tournament.tie_epsilon = j.value("tie_epsilon", m.tournament.tie_epsilon);
    return m;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

int run_report(const fs::path& out, const Manifest& manifest) {
  // Validate every referenced path before writing anything.
  for (const auto& d : manifest.datasets) {
    require_file(d.matrix);
    if (d.labels) require_file(*d.labels);
  }
  if (manifest.synth.empty() && manifest.datasets.empty()) {
    throw ValidationError(errc::bad_config, "manifest lists no synth specs and no datasets");
  }
  ensure_out_dir(out);
  RunLog log;

  struct Pending {
    ResponseMatrix matrix;
    std::optional<ItemLabels> labels;
  };
  std::vector<Pending> pending;
  for (const auto& spec : manifest.synth) {
    SynthResult result = generate(spec);
    save_matrix(result.matrix, out / (spec.dataset_name + "_matrix.csv"));
    io::save_item_params(out / (spec.dataset_name + "_true_items.json"), result.true_items);
    io::save_abilities(out / (spec.dataset_name + "_true_abilities.json"),
                       result.matrix.respondent_ids, result.true_abilities);
    pending.push_back({std::move(result.matrix), std::nullopt});
  }
  for (const auto& d : manifest.datasets) {
    Pending p{load_matrix(d.matrix, d.name), std::nullopt};
    if (d.labels) p.labels = load_labels(*d.labels);
    pending.push_back(std::move(p));
  }

  std::vector<std::pair<std::string, std::vector<ItemParams>>> fitted;
  std::vector<DatasetFit> fits;
  for (auto& p : pending) {
    const std::string name = p.matrix.dataset_name;
    FitOutcome o = fit_dataset(std::move(p.matrix), p.labels, manifest.max_items, manifest.seed, log);
    save_fit_outputs(out, name, o);
    fitted.emplace_back(name, o.fit.items);
    fits.push_back({name, std::move(o.fit.items),
                    {std::move(o.fit.respondent_ids), std::move(o.fit.abilities)}});
  }

  run_analyze(out, fitted, manifest.thresholds);

  const ScoreTable table = build_score_table(fits);
  io::save_score_table(out / "scores.csv", table);

  const TournamentResult result = run_tournament(table, manifest.tournament);
  io::save_ranking_csv(out / "ranking.csv", result);
  io::save_history_json(out / "history.json", result, manifest.tournament);

  std::size_t real_players = 0;
  for (const auto& name : table.players) {
    if (!RespondentKind::from_id(name).is_artificial()) ++real_players;
  }
  if (table.datasets.size() >= 2 && real_players >= 2) {
    run_stats(out, io::load_history(out / "history.json"), log);
  } else {
    std::cerr << "warning: skipping significance tests (need >= 2 datasets and >= 2 real players)\n";
    log.add({{"event", "stats_skipped"},
             {"datasets", table.datasets.size()},
             {"real_players", real_players}});
  }

  log.write(out / "report_log.jsonl");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRT benchmark decoder: fit 3PL item parameters from classifier response "
               "matrices, profile datasets, and rank classifiers with Glicko-2."};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::uint64_t seed = 1;
  app.add_option("--out", out_dir, "Output directory (created if missing)")->capture_default_str();
  app.add_option("--seed", seed, "Seed for every randomized step")->capture_default_str();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit item parameters and abilities from a matrix CSV");
  fit_cmd->fallthrough();
  std::string fit_matrix, fit_name, fit_labels;
  std::size_t max_items = 500;
  fit_cmd->add_option("--matrix", fit_matrix, "Response matrix CSV")->required();
  fit_cmd->add_option("--name", fit_name, "Dataset name (default: matrix file stem)");
  fit_cmd->add_option("--labels", fit_labels, "Item labels CSV; adds the 7 artificial respondents");
  fit_cmd->add_option("--max-items", max_items, "Item cap before fitting")->capture_default_str();

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Profile datasets from item-parameter files");
  analyze_cmd->fallthrough();
  std::vector<std::string> params_files;
  Thresholds thresholds;
  analyze_cmd->add_option("--params", params_files, "Item-parameter JSON files")->required();
  analyze_cmd->add_option("--difficulty-limit", thresholds.difficulty_limit, "Difficult above this b")
      ->capture_default_str();
  analyze_cmd
      ->add_option("--discrimination-limit", thresholds.discrimination_limit,
                   "Discriminative above this a")
      ->capture_default_str();
  analyze_cmd->add_option("--guessing-limit", thresholds.guessing_limit, "Guessable above this c")
      ->capture_default_str();

  // truescore
  auto* truescore_cmd =
      app.add_subcommand("truescore", "Build the score table from fitted parameters and abilities");
  truescore_cmd->fallthrough();
  std::vector<std::string> dataset_specs;
  truescore_cmd
      ->add_option("--dataset", dataset_specs,
                   "NAME=ITEMS.json,ABILITIES.json (repeat per dataset)")
      ->required();

  // tournament
  auto* tournament_cmd = app.add_subcommand("tournament", "Glicko-2 round robin over a score table");
  tournament_cmd->fallthrough();
  std::string scores_file;
  TournamentConfig tcfg;
  tournament_cmd->add_option("--scores", scores_file, "Score table CSV")->required();
  tournament_cmd->add_option("--tau", tcfg.tau, "Volatility system constant")->capture_default_str();
  tournament_cmd->add_option("--tie-epsilon", tcfg.tie_epsilon, "True-Score tie tolerance")
      ->capture_default_str();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Friedman + Nemenyi over a tournament history");
  stats_cmd->fallthrough();
  std::string history_file;
  stats_cmd->add_option("--history", history_file, "Tournament history JSON")->required();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic matrix with known parameters");
  synth_cmd->fallthrough();
  SynthSpec synth_spec;
  synth_cmd->add_option("--respondents", synth_spec.n_respondents, "Number of respondents")
      ->capture_default_str();
  synth_cmd->add_option("--items", synth_spec.n_items, "Number of items")->capture_default_str();
  synth_cmd->add_option("--a-min", synth_spec.a_min, "Discrimination lower bound")->capture_default_str();
  synth_cmd->add_option("--a-max", synth_spec.a_max, "Discrimination upper bound")->capture_default_str();
  synth_cmd->add_option("--b-mean", synth_spec.b_mean, "Difficulty mean")->capture_default_str();
  synth_cmd->add_option("--b-sd", synth_spec.b_sd, "Difficulty standard deviation")->capture_default_str();
  synth_cmd->add_option("--c-min", synth_spec.c_min, "Guessing lower bound")->capture_default_str();
  synth_cmd->add_option("--c-max", synth_spec.c_max, "Guessing upper bound")->capture_default_str();
  synth_cmd->add_option("--name", synth_spec.dataset_name, "Dataset name")->capture_default_str();

  // report
  auto* report_cmd = app.add_subcommand("report", "Run the full pipeline from a manifest");
  report_cmd->fallthrough();
  std::string manifest_file;
  report_cmd->add_option("--manifest", manifest_file, "Run manifest JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const fs::path out(out_dir);

    if (fit_cmd->parsed()) {
      require_file(fit_matrix);
      const std::string name =
          fit_name.empty() ? strip_suffix(fs::path(fit_matrix).stem().string(), "_matrix") : fit_name;
      ResponseMatrix m = load_matrix(fit_matrix, name);
      std::optional<ItemLabels> labels;
      if (!fit_labels.empty()) {
        require_file(fit_labels);
        labels = load_labels(fit_labels);
      }
      ensure_out_dir(out);
      RunLog log;
      const FitOutcome o = fit_dataset(std::move(m), labels, max_items, seed, log);
      save_fit_outputs(out, name, o);
      log.write(out / "fit_log.jsonl");
      return 0;
    }

    if (analyze_cmd->parsed()) {
      std::vector<std::pair<std::string, std::vector<ItemParams>>> fitted;
      for (const auto& file : params_files) {
        require_file(file);
        fitted.emplace_back(strip_suffix(fs::path(file).stem().string(), "_items"),
                            io::load_item_params(file));
      }
      ensure_out_dir(out);
      run_analyze(out, fitted, thresholds);
      return 0;
    }

    if (truescore_cmd->parsed()) {
      std::vector<DatasetFit> fits;
      for (const auto& spec : dataset_specs) {
        const auto eq = spec.find('=');
        const auto comma = spec.find(',', eq == std::string::npos ? 0 : eq + 1);
        if (eq == std::string::npos || comma == std::string::npos || eq == 0) {
          throw ValidationError(errc::bad_config,
                                "--dataset expects NAME=ITEMS.json,ABILITIES.json, got '" + spec + "'");
        }
        DatasetFit f;
        f.name = spec.substr(0, eq);
        const std::string items_path = spec.substr(eq + 1, comma - eq - 1);
        const std::string abilities_path = spec.substr(comma + 1);
        require_file(items_path);
        require_file(abilities_path);
        f.items = io::load_item_params(items_path);
        f.abilities = io::load_abilities(abilities_path);
        fits.push_back(std::move(f));
      }
      const ScoreTable table = build_score_table(fits);
      ensure_out_dir(out);
      io::save_score_table(out / "scores.csv", table);
      return 0;
    }

    if (tournament_cmd->parsed()) {
      require_file(scores_file);
      const ScoreTable table = io::load_score_table(scores_file);
      const TournamentResult result = run_tournament(table, tcfg);
      ensure_out_dir(out);
      io::save_ranking_csv(out / "ranking.csv", result);
      io::save_history_json(out / "history.json", result, tcfg);
      return 0;
    }

    if (stats_cmd->parsed()) {
      require_file(history_file);
      const io::HistoryFile history = io::load_history(history_file);
      ensure_out_dir(out);
      RunLog log;
      run_stats(out, history, log);
      log.write(out / "stats_log.jsonl");
      return 0;
    }

    if (synth_cmd->parsed()) {
      synth_spec.seed = seed;
      ensure_out_dir(out);
      run_synth(out, synth_spec);
      return 0;
    }

    if (report_cmd->parsed()) {
      require_file(manifest_file);
      return run_report(out, load_manifest(manifest_file, seed));
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
