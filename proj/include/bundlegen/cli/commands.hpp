// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bundlegen/cli/run_config.hpp"
#include "bundlegen/core/parallel.hpp"
#include "bundlegen/data/corpus.hpp"
#include "bundlegen/data/events.hpp"
#include "bundlegen/data/synthetic.hpp"
#include "bundlegen/eval/evaluate.hpp"
#include "bundlegen/eval/latency.hpp"
#include "bundlegen/generate/generate.hpp"
#include "bundlegen/model/checkpoint.hpp"
#include "bundlegen/model/train.hpp"

namespace bundlegen::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitIncompatible = 3;

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIncompatibleArtifact:
      return kExitIncompatible;
    case ErrorKind::kDivergence:
    case ErrorKind::kAllMasked:
    case ErrorKind::kSingularKernel:
      return kExitInternal;
    default:
      return kExitBadInput;
  }
}

// Runs a command and turns any failure into a message and an exit code.
inline int guarded(const std::function<void()>& command, std::ostream& err = std::cerr) {
  try {
    command();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  data::SyntheticOptions options;
  std::string out_dir;
};

// Writes events.jsonl and a manifest describing the planted patterns.
inline data::SyntheticCorpus cmd_synth(const SynthArgs& a, std::ostream& out = std::cout) {
  if (a.out_dir.empty()) throw Error(ErrorKind::kInvalidArgument, "missing output directory");
  data::SyntheticCorpus corpus = data::make_synthetic_corpus(a.options);
  fs::create_directories(a.out_dir);
  data::write_events((fs::path(a.out_dir) / "events.jsonl").string(), corpus.events);
  json patterns = json::array();
  for (std::size_t p = 0; p < corpus.patterns.size(); ++p) {
    patterns.push_back({{"items", corpus.patterns[p]},
                        {"weight", corpus.pattern_weights[p]},
                        {"orders", corpus.pattern_orders[p]}});
  }
  const auto& o = a.options;
  json options = {{"users", o.n_users},       {"items", o.n_items},
                  {"patterns", o.n_patterns}, {"noise", o.noise},
                  {"categories", o.n_categories}};
  write_json_file(fs::path(a.out_dir) / "synth_manifest.json",
                  {{"seed", o.seed},
                   {"options", options},
                   {"config_hash", config_hash(options)},
                   {"events", corpus.events.size()},
                   {"patterns", std::move(patterns)}});
  out << "wrote " << corpus.events.size() << " events for " << o.n_users << " users to "
      << a.out_dir << '\n';
  return corpus;
}

// ---- ingest / stats ------------------------------------------------------

struct CorpusSource {
  std::string events;
  std::string bundles;
  std::string catalog;
};

struct LoadedCorpus {
  std::vector<data::UserHistory> users;
  data::Catalog catalog;
  data::CorpusKind kind = data::CorpusKind::kCoPurchase;
  std::string source;
};

inline LoadedCorpus load_corpus(const CorpusSource& s) {
  if (s.events.empty() == s.bundles.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "give exactly one of --events or --bundles");
  }
  LoadedCorpus c;
  if (!s.events.empty()) {
    require_file(s.events, "events file");
    const auto events = data::load_events(s.events);
    c.catalog = data::catalog_from_events(events);
    c.users = data::group_bundles(events, c.catalog);
    c.source = s.events;
  } else {
    require_file(s.bundles, "bundle file");
    require_file(s.catalog, "catalog file");
    c.catalog = data::load_catalog(s.catalog);
    c.users = data::load_bundle_corpus(s.bundles, c.catalog);
    c.kind = data::CorpusKind::kPredefined;
    c.source = s.bundles;
  }
  return c;
}

struct IngestArgs {
  CorpusSource source;
  std::string out_dir;
  std::uint64_t seed = 7;
  double valid_fraction = 0.1;
};

inline data::DatasetSplit cmd_ingest(const IngestArgs& a, std::ostream& out = std::cout) {
  if (a.out_dir.empty()) throw Error(ErrorKind::kInvalidArgument, "missing output directory");
  if (!(a.valid_fraction >= 0.0 && a.valid_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "valid fraction must be in [0, 1)");
  }
  const LoadedCorpus c = load_corpus(a.source);
  const data::CorpusStats stats = data::compute_stats(c.users, c.catalog);
  data::DatasetSplit split = data::make_split(c.users, c.catalog, c.kind, a.seed, a.valid_fraction);
  const json settings = {{"source", c.source},
                         {"kind", data::to_string(c.kind)},
                         {"seed", a.seed},
                         {"valid_fraction", a.valid_fraction}};
  data::save_split(a.out_dir, split,
                   {{"source", c.source},
                    {"valid_fraction", a.valid_fraction},
                    {"config_hash", config_hash(settings)},
                    {"stats", data::stats_to_json(stats)}});
  out << data::format_stats(stats);
  out << "train " << split.train.size() << ", valid " << split.valid.size() << ", test "
      << split.test.size() << " examples; " << split.vocab.size() << " items in vocabulary\n";
  return split;
}

struct StatsArgs {
  CorpusSource source;
  bool as_json = false;
};

inline data::CorpusStats cmd_stats(const StatsArgs& a, std::ostream& out = std::cout) {
  const LoadedCorpus c = load_corpus(a.source);
  const data::CorpusStats s = data::compute_stats(c.users, c.catalog);
  if (a.as_json) {
    out << data::stats_to_json(s).dump(2) << '\n';
  } else {
    out << data::format_stats(s);
  }
  return s;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  RunConfig run;
  std::string resume;  // checkpoint to continue from
  bool verbose = true;
};

struct TrainOutput {
  std::string checkpoint;
  model::TrainState state;
};

inline data::DatasetSplit load_split_dir(const std::string& dir) {
  if (dir.empty()) throw Error(ErrorKind::kInvalidArgument, "missing split directory");
  require_file((fs::path(dir) / "manifest.json").string(), "split manifest");
  return data::load_split(dir);
}

// Trains (or resumes) on a persisted split and writes checkpoint.json,
// loss_curve.csv and train_manifest.json to the output directory. On resume
// the epoch budget and patience come from the run config and everything
// else from the checkpoint.
inline TrainOutput cmd_train(const TrainArgs& a, std::ostream& out = std::cout) {
  const RunConfig& run = a.run;
  if (run.output_dir.empty()) throw Error(ErrorKind::kInvalidArgument, "missing output directory");
  const data::DatasetSplit split = load_split_dir(run.data.split_dir);
  const auto train_set = model::to_training_examples(split.train, split.vocab);
  const auto valid_set = model::to_training_examples(split.valid, split.vocab);

  std::optional<model::Checkpoint> ck;
  if (!a.resume.empty()) {
    require_file(a.resume, "checkpoint");
    json j = read_json_file(a.resume);
    if (j.is_object() && j.contains("config") && j["config"].is_object()) {
      j["config"]["max_epochs"] = run.model.max_epochs;
      j["config"]["patience"] = run.model.patience;
    }
    ck.emplace(model::checkpoint_from_json(j));
    model::require_same_vocab(ck->model, split.vocab);
  } else {
    ck.emplace(model::Checkpoint{model::QualityModel(run.seeded_model(), split.vocab), {}});
  }
  model::QualityModel& m = ck->model;
  model::TrainState& state = ck->state;

  const auto start = std::chrono::steady_clock::now();
  model::train(m, train_set, valid_set, state, [&](const model::EpochStats& e) {
    if (a.verbose) {
      out << "epoch " << e.epoch << "  train " << e.train_loss << "  valid " << e.valid_loss
          << '\n';
    }
  });
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(run.output_dir);
  const fs::path dir(run.output_dir);
  TrainOutput result{(dir / "checkpoint.json").string(), state};
  model::save_checkpoint(result.checkpoint, m, &state);
  {
    std::ofstream csv(dir / "loss_curve.csv");
    if (!csv) throw Error(ErrorKind::kIo, "cannot write loss curve");
    csv << "epoch,train_loss,valid_loss\n";
    csv.precision(10);
    for (const auto& e : state.curve) {
      csv << e.epoch << ',' << e.train_loss << ',' << e.valid_loss << '\n';
    }
  }
  RunConfig recorded = run;
  recorded.model = m.config();
  recorded.seed = m.config().seed;
  const json cfg = to_json(recorded);
  write_json_file(dir / "train_manifest.json",
                  {{"config", cfg},
                   {"config_hash", config_hash(cfg)},
                   {"seed", recorded.seed},
                   {"vocab_hash", data::hash_hex(split.vocab.hash())},
                   {"epochs_done", state.epochs_done},
                   {"best_valid", state.best_valid},
                   {"stopped_early", state.stopped},
                   {"resumed_from", a.resume}});
  out << "trained " << state.epochs_done << " epochs in " << seconds << " s, best valid "
      << state.best_valid << "; checkpoint " << result.checkpoint << '\n';
  return result;
}

// ---- generate ------------------------------------------------------------

struct UserHistoryInput {
  RawId user = 0;
  std::vector<RawId> history;
};

// Users file: one {"user_id": int, "history": [item ids, oldest first]} per line.
inline std::vector<UserHistoryInput> load_users(const std::string& path) {
  std::vector<UserHistoryInput> out;
  data::detail::for_each_jsonl(path, [&](const json& obj, std::size_t line) {
    UserHistoryInput u;
    u.user = data::detail::require_id(obj, "user_id", line);
    auto it = obj.find("history");
    if (it == obj.end() || !it->is_array()) throw ParseError(line, "\"history\" must be an array");
    for (const json& v : *it) {
      if (!v.is_number_integer()) throw ParseError(line, "history entries must be integers");
      u.history.push_back(v.get<RawId>());
    }
    out.push_back(std::move(u));
  });
  return out;
}

struct GenerateArgs {
  std::string checkpoint;
  std::string split_dir;   // generate for the test users of a split
  std::string users_path;  // or for the users listed in a file
  std::string out_path;
  generate::GenerationConfig config;
  unsigned threads = thread_count();
};

struct GenerateOutput {
  std::vector<eval::UserList> lists;
  std::size_t short_lists = 0;
};

// Contexts sorted by user id, from exactly one of a split or a users file.
inline std::vector<UserContext> generation_contexts(const std::string& split_dir,
                                                    const std::string& users_path,
                                                    const model::QualityModel& m,
                                                    std::ostream& err) {
  if (split_dir.empty() == users_path.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "give exactly one of --split or --users");
  }
  std::vector<UserContext> out;
  if (!split_dir.empty()) {
    const data::DatasetSplit split = load_split_dir(split_dir);
    model::require_same_vocab(m, split.vocab);
    out = eval::test_contexts(split.test, m.vocab());
  } else {
    require_file(users_path, "users file");
    std::size_t empty = 0;
    for (const auto& u : load_users(users_path)) {
      if (u.history.empty()) {
        ++empty;
        continue;
      }
      UserContext c;
      c.user = u.user;
      for (RawId id : u.history) c.history.push_back(m.vocab().token_for(id));
      out.push_back(std::move(c));
    }
    if (empty > 0) err << "warning: skipped " << empty << " users with empty history\n";
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const UserContext& a, const UserContext& b) { return a.user < b.user; });
  return out;
}

// Selection that keeps whatever fits when fewer than K candidates survive.
inline BundleList select_or_partial(const generate::CandidateSet& c,
                                    const generate::GenerationConfig& cfg, bool& short_list) {
  try {
    short_list = false;
    return generate::dpp_select(c, cfg);
  } catch (const generate::ShortListError& e) {
    short_list = true;
    return e.partial();
  }
}

// Writes one JSON line per user, ordered by user id, and a sidecar manifest.
inline GenerateOutput cmd_generate(const GenerateArgs& a, std::ostream& out = std::cout,
                                   std::ostream& err = std::cerr) {
  a.config.validate();
  if (a.out_path.empty()) throw Error(ErrorKind::kInvalidArgument, "missing output path");
  require_file(a.checkpoint, "checkpoint");
  const model::Checkpoint ck = model::load_checkpoint(a.checkpoint);
  const auto users = generation_contexts(a.split_dir, a.users_path, ck.model, err);
  const generate::InferenceModel im(ck.model);

  std::vector<BundleList> lists(users.size());
  std::vector<char> short_flags(users.size(), 0);
  parallel_for(users.size(), a.threads, [&](std::size_t i) {
    bool s = false;
    lists[i] = select_or_partial(generate::beam_search(im, users[i].history, a.config), a.config, s);
    short_flags[i] = s;
  });

  GenerateOutput result;
  const fs::path path(a.out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + a.out_path);
  for (std::size_t i = 0; i < users.size(); ++i) {
    file << generate::recommendation_to_json(users[i].user, lists[i], im.vocab(), a.config).dump()
         << '\n';
    result.lists.push_back(eval::to_user_list(users[i].user, lists[i], im.vocab()));
    result.short_lists += short_flags[i] ? 1 : 0;
  }
  const json cfg = generate::to_json(a.config);
  write_json_file(a.out_path + ".manifest.json",
                  {{"checkpoint", a.checkpoint},
                   {"generation", cfg},
                   {"config_hash", config_hash(cfg)},
                   {"seed", ck.model.config().seed},
                   {"vocab_hash", data::hash_hex(im.vocab().hash())},
                   {"users", users.size()},
                   {"short_lists", result.short_lists}});
  if (result.short_lists > 0) {
    err << "warning: " << result.short_lists << " users received fewer than "
        << a.config.list_size << " bundles\n";
  }
  out << "wrote recommendations for " << users.size() << " users to " << a.out_path << '\n';
  return result;
}

// ---- evaluate ------------------------------------------------------------

struct Recommendations {
  std::vector<eval::UserList> lists;
  double lambda = 0.0;
  int shift = 0;
};

inline Recommendations load_recommendations(const std::string& path) {
  Recommendations r;
  std::set<RawId> seen;
  data::detail::for_each_jsonl(path, [&](const json& obj, std::size_t line) {
    eval::UserList ul;
    ul.user = data::detail::require_id(obj, "user", line);
    if (!seen.insert(ul.user).second) throw ParseError(line, "duplicate user");
    try {
      for (const json& b : obj.at("bundles")) ul.bundles.emplace_back(b.get<std::vector<RawId>>());
      r.lambda = obj.value("lambda", r.lambda);
      r.shift = obj.value("C", r.shift);
    } catch (const json::exception& e) {
      throw ParseError(line, e.what());
    }
    r.lists.push_back(std::move(ul));
  });
  return r;
}

// Ground-truth file: one {"user": int, "bundle": [item ids]} per line; a user
// may appear on several lines.
inline eval::GroundTruth load_ground_truth(const std::string& path) {
  eval::GroundTruth gt;
  data::detail::for_each_jsonl(path, [&](const json& obj, std::size_t line) {
    const RawId user = data::detail::require_id(obj, "user", line);
    try {
      gt[user].emplace_back(obj.at("bundle").get<std::vector<RawId>>());
    } catch (const json::exception& e) {
      throw ParseError(line, e.what());
    }
  });
  return gt;
}

struct EvaluateArgs {
  std::string recommendations;
  std::string split_dir;   // ground truth from the split's test examples
  std::string truth_path;  // or from a ground-truth file
  std::string checkpoint;  // enables AUC; needs the split
  std::vector<std::size_t> ks{5, 10};
  std::string run_id = "run";
  std::string out_json;
  std::string out_csv;
  std::uint64_t seed = 7;
};

inline void write_report_files(const eval::EvalReport& r, const std::string& out_json,
                               const std::string& out_csv) {
  if (!out_json.empty()) write_json_file(out_json, eval::to_json(r));
  if (!out_csv.empty()) {
    const fs::path p(out_csv);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream csv(p);
    if (!csv) throw Error(ErrorKind::kIo, "cannot write " + out_csv);
    csv << eval::csv_header() << '\n' << eval::csv_row(r) << '\n';
  }
}

inline eval::EvalReport cmd_evaluate(const EvaluateArgs& a, std::ostream& out = std::cout,
                                     std::ostream& err = std::cerr) {
  require_file(a.recommendations, "recommendations file");
  if (a.split_dir.empty() == a.truth_path.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "give exactly one of --split or --truth");
  }
  if (!a.checkpoint.empty() && a.split_dir.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "AUC needs --split alongside --checkpoint");
  }
  const Recommendations recs = load_recommendations(a.recommendations);
  std::optional<data::DatasetSplit> split;
  eval::GroundTruth gt;
  if (!a.split_dir.empty()) {
    split = load_split_dir(a.split_dir);
    gt = eval::ground_truth(split->test);
  } else {
    require_file(a.truth_path, "ground-truth file");
    gt = load_ground_truth(a.truth_path);
  }

  // Align on user ids; both directions of mismatch are reported.
  std::vector<eval::UserList> aligned;
  std::set<RawId> with_recs;
  std::size_t min_len = std::numeric_limits<std::size_t>::max(), max_len = 0;
  for (const auto& ul : recs.lists) {
    with_recs.insert(ul.user);
    if (!gt.count(ul.user)) continue;
    aligned.push_back(ul);
    min_len = std::min(min_len, ul.bundles.size());
    max_len = std::max(max_len, ul.bundles.size());
  }
  const std::size_t no_truth = recs.lists.size() - aligned.size();
  std::size_t no_recs = 0;
  for (const auto& [user, bundles] : gt) no_recs += with_recs.count(user) ? 0 : 1;
  if (no_truth > 0) err << "warning: " << no_truth << " users have no ground truth; skipped\n";
  if (no_recs > 0) err << "warning: " << no_recs << " ground-truth users have no recommendations\n";
  if (aligned.empty()) throw Error(ErrorKind::kInvalidArgument, "no users in common");

  std::vector<std::size_t> ks;
  for (std::size_t k : a.ks) {
    if (k <= min_len) {
      ks.push_back(k);
    } else {
      err << "warning: pre@" << k << " skipped; shortest list has " << min_len << " bundles\n";
    }
  }

  eval::EvalReport report;
  report.run_id = a.run_id;
  report.config.lambda = recs.lambda;
  report.config.shift = recs.shift;
  report.config.list_size = max_len;
  report.config.beam_width = 0;
  const std::string manifest = a.recommendations + ".manifest.json";
  if (fs::exists(manifest)) {
    const json m = read_json_file(manifest);
    if (m.contains("generation")) {
      report.config = generate::generation_config_from_json(m.at("generation"), report.config);
    }
  }
  eval::score_lists(report, aligned, gt, ks);
  report.skipped_users = no_truth;
  if (min_len < 2) report.diversity.reset();

  if (!a.checkpoint.empty()) {
    require_file(a.checkpoint, "checkpoint");
    const model::Checkpoint ck = model::load_checkpoint(a.checkpoint);
    model::require_same_vocab(ck.model, split->vocab);
    std::vector<data::RawExample> all = split->train;
    all.insert(all.end(), split->valid.begin(), split->valid.end());
    all.insert(all.end(), split->test.begin(), split->test.end());
    const auto pool = eval::bundle_pool(all, ck.model.vocab());
    report.auc = eval::model_auc(ck.model, split->test, pool, a.seed);
  }
  write_report_files(report, a.out_json, a.out_csv);
  out << eval::to_json(report).dump(2) << '\n';
  return report;
}

// ---- sweep ---------------------------------------------------------------

struct SweepArgs {
  std::string checkpoint;
  std::string split_dir;
  std::vector<double> lambdas;
  std::vector<int> shifts;
  generate::GenerationConfig base;
  std::size_t max_users = 0;  // 0 keeps every test user
  std::vector<std::size_t> ks{5, 10};
  std::string out_csv;
  unsigned threads = thread_count();
};

struct SweepRow {
  eval::EvalReport report;
  double mean_size = 0.0;
  std::size_t short_lists = 0;
};

inline std::string sweep_csv_header() { return eval::csv_header() + ",mean_size,short_lists"; }

// Grid over (λ, C). Beam search runs once per C and its candidates are
// reused for every λ. Latency per user is beam time plus selection time.
inline std::vector<SweepRow> cmd_sweep(const SweepArgs& a, std::ostream& out = std::cout,
                                       std::ostream& err = std::cerr) {
  if (a.lambdas.empty() || a.shifts.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "lambda and C grids must be non-empty");
  }
  for (double l : a.lambdas) {
    generate::GenerationConfig c = a.base;
    c.lambda = l;
    c.validate();
  }
  for (int s : a.shifts) {
    if (s < 0) throw Error(ErrorKind::kInvalidArgument, "C must be >= 0");
  }
  require_file(a.checkpoint, "checkpoint");
  const model::Checkpoint ck = model::load_checkpoint(a.checkpoint);
  const data::DatasetSplit split = load_split_dir(a.split_dir);
  model::require_same_vocab(ck.model, split.vocab);
  auto users = generation_contexts(a.split_dir, "", ck.model, err);
  if (a.max_users > 0 && users.size() > a.max_users) users.resize(a.max_users);
  if (users.empty()) throw Error(ErrorKind::kEmptyCorpus, "no test users");
  const eval::GroundTruth gt = eval::ground_truth(split.test);
  const generate::InferenceModel im(ck.model);
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  std::vector<SweepRow> rows;
  for (int shift : a.shifts) {
    generate::GenerationConfig cfg = a.base;
    cfg.shift = shift;
    std::vector<generate::CandidateSet> cands(users.size());
    std::vector<double> beam_ms(users.size());
    parallel_for(users.size(), a.threads, [&](std::size_t i) {
      const auto t0 = clock::now();
      cands[i] = generate::beam_search(im, users[i].history, cfg);
      beam_ms[i] = ms_since(t0);
    });
    for (double lambda : a.lambdas) {
      cfg.lambda = lambda;
      std::vector<BundleList> lists(users.size());
      std::vector<double> total_ms(users.size());
      std::vector<char> short_flags(users.size(), 0);
      parallel_for(users.size(), a.threads, [&](std::size_t i) {
        const auto t0 = clock::now();
        bool s = false;
        lists[i] = select_or_partial(cands[i], cfg, s);
        short_flags[i] = s;
        total_ms[i] = beam_ms[i] + ms_since(t0);
      });
      SweepRow row;
      char id[64];
      std::snprintf(id, sizeof id, "lambda=%g;C=%d", lambda, shift);
      row.report.run_id = id;
      row.report.config = cfg;
      std::vector<eval::UserList> full;
      double size_sum = 0.0;
      std::size_t n_bundles = 0;
      for (std::size_t i = 0; i < users.size(); ++i) {
        for (const Bundle& b : lists[i].bundles) size_sum += static_cast<double>(b.size());
        n_bundles += lists[i].size();
        if (short_flags[i]) {
          ++row.short_lists;
        } else {
          full.push_back(eval::to_user_list(users[i].user, lists[i], im.vocab()));
        }
      }
      row.mean_size = n_bundles > 0 ? size_sum / static_cast<double>(n_bundles) : 0.0;
      std::vector<std::size_t> ks;
      for (std::size_t k : a.ks) {
        if (k <= cfg.list_size) ks.push_back(k);
      }
      if (!full.empty()) eval::score_lists(row.report, full, gt, ks);
      row.report.latency = eval::latency_stats(total_ms);
      out << row.report.run_id << ": pre@" << (ks.empty() ? 0 : ks.back()) << ' '
          << (ks.empty() || full.empty() ? 0.0 : row.report.precision.at(ks.back())) << ", div "
          << row.report.diversity.value_or(0.0) << ", mean size " << row.mean_size << '\n';
      rows.push_back(std::move(row));
    }
  }
  if (!a.out_csv.empty()) {
    const fs::path p(a.out_csv);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream csv(p);
    if (!csv) throw Error(ErrorKind::kIo, "cannot write " + a.out_csv);
    csv << sweep_csv_header() << '\n';
    for (const SweepRow& r : rows) {
      csv << eval::csv_row(r.report) << ',' << r.mean_size << ',' << r.short_lists << '\n';
    }
  }
  return rows;
}

}  // namespace bundlegen::cli
