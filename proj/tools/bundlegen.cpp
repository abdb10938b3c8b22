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

// bundlegen: command-line pipeline for bundle list generation.
//
//   bundlegen synth    --out DIR [--users N --items N --patterns N --seed S]
//   bundlegen ingest   (--events F | --bundles F --catalog F) --out DIR
//   bundlegen stats    (--events F | --bundles F --catalog F) [--json]
//   bundlegen train    [--config RUN.json] --split DIR --out DIR [--resume CKPT]
//   bundlegen generate --checkpoint CKPT (--split DIR | --users F) --out F
//   bundlegen evaluate --recs F (--split DIR | --truth F) [--checkpoint CKPT]
//   bundlegen sweep    --checkpoint CKPT --split DIR --lambdas L,.. --shifts C,..
//
// Exit codes: 0 ok, 1 internal error, 2 bad input, 3 incompatible artifact.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bundlegen/cli/commands.hpp"

namespace {

using namespace bundlegen;
using namespace bundlegen::cli;

template <class T>
void override_with(T& target, const std::optional<T>& flag) {
  if (flag) target = *flag;
}

struct GenerationFlags {
  std::optional<double> lambda;
  std::optional<int> shift;
  std::optional<std::size_t> beam_width;
  std::optional<std::size_t> list_size;
  std::optional<std::size_t> max_bundle_size;

  void add_to(CLI::App* app) {
    app->add_option("--lambda", lambda, "quality/diversity trade-off (>= 0)");
    app->add_option("-C,--shift", shift, "END penalty horizon");
    app->add_option("-M,--beam", beam_width, "beam width");
    app->add_option("-K,--k", list_size, "bundles per list");
    app->add_option("-T,--max-size", max_bundle_size, "maximum bundle size");
  }

  void apply(generate::GenerationConfig& c) const {
    override_with(c.lambda, lambda);
    override_with(c.shift, shift);
    override_with(c.beam_width, beam_width);
    override_with(c.list_size, list_size);
    override_with(c.max_bundle_size, max_bundle_size);
  }
};

RunConfig base_config(const std::string& path) {
  return path.empty() ? RunConfig{} : load_run_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized bundle list generation"};
  app.require_subcommand(1);
  int status = kExitOk;

  // synth
  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "write a synthetic co-purchase corpus");
  s->add_option("--out", synth.out_dir, "output directory")->required();
  s->add_option("--seed", synth.options.seed);
  s->add_option("--users", synth.options.n_users);
  s->add_option("--items", synth.options.n_items);
  s->add_option("--patterns", synth.options.n_patterns);
  s->add_option("--noise", synth.options.noise);
  s->add_option("--categories", synth.options.n_categories);
  s->callback([&] { status = guarded([&] { cmd_synth(synth); }); });

  // ingest
  IngestArgs ingest;
  auto* in = app.add_subcommand("ingest", "split a corpus into train/valid/test files");
  in->add_option("--events", ingest.source.events, "co-purchase events JSONL");
  in->add_option("--bundles", ingest.source.bundles, "pre-defined bundles JSONL");
  in->add_option("--catalog", ingest.source.catalog, "item catalog JSONL (with --bundles)");
  in->add_option("--out", ingest.out_dir, "split directory")->required();
  in->add_option("--seed", ingest.seed);
  in->add_option("--valid-fraction", ingest.valid_fraction);
  in->callback([&] { status = guarded([&] { cmd_ingest(ingest); }); });

  // stats
  StatsArgs stats;
  auto* st = app.add_subcommand("stats", "print corpus statistics");
  st->add_option("--events", stats.source.events);
  st->add_option("--bundles", stats.source.bundles);
  st->add_option("--catalog", stats.source.catalog);
  st->add_flag("--json", stats.as_json);
  st->callback([&] { status = guarded([&] { cmd_stats(stats); }); });

  // train
  std::string train_config, train_split, train_out, resume;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs, patience, n_neg, hidden, embed, batch;
  std::optional<double> lr;
  std::optional<std::string> softmax;
  bool quiet = false;
  auto* tr = app.add_subcommand("train", "train the bundle quality model");
  tr->add_option("--config", train_config, "run config JSON");
  tr->add_option("--split", train_split, "split directory");
  tr->add_option("--out", train_out, "output directory");
  tr->add_option("--resume", resume, "checkpoint to continue from");
  tr->add_option("--seed", seed);
  tr->add_option("--epochs", epochs);
  tr->add_option("--patience", patience);
  tr->add_option("--lr", lr);
  tr->add_option("--n-neg", n_neg);
  tr->add_option("--hidden", hidden);
  tr->add_option("--embed", embed);
  tr->add_option("--batch", batch);
  tr->add_option("--softmax", softmax, "feature_aware or id_only");
  tr->add_flag("--quiet", quiet);
  tr->callback([&] {
    status = guarded([&] {
      TrainArgs a;
      a.run = base_config(train_config);
      if (!train_split.empty()) a.run.data.split_dir = train_split;
      if (!train_out.empty()) a.run.output_dir = train_out;
      override_with(a.run.seed, seed);
      auto& m = a.run.model;
      override_with(m.max_epochs, epochs);
      override_with(m.patience, patience);
      override_with(m.learning_rate, lr);
      override_with(m.n_neg_samples, n_neg);
      override_with(m.hidden_dim, hidden);
      override_with(m.embed_dim, embed);
      override_with(m.batch_size, batch);
      if (softmax) m.softmax = model::softmax_kind_from_string(*softmax);
      m.validate();
      a.resume = resume;
      a.verbose = !quiet;
      cmd_train(a);
    });
  });

  // generate
  GenerateArgs gen;
  std::string gen_config;
  GenerationFlags gen_flags;
  std::optional<unsigned> gen_threads;
  auto* ge = app.add_subcommand("generate", "generate bundle lists");
  ge->add_option("--config", gen_config, "run config JSON");
  ge->add_option("--checkpoint", gen.checkpoint)->required();
  ge->add_option("--split", gen.split_dir, "use the split's test users");
  ge->add_option("--users", gen.users_path, "users JSONL");
  ge->add_option("--out", gen.out_path, "recommendations JSONL")->required();
  ge->add_option("--threads", gen_threads);
  gen_flags.add_to(ge);
  ge->callback([&] {
    status = guarded([&] {
      gen.config = base_config(gen_config).generation;
      gen_flags.apply(gen.config);
      override_with(gen.threads, gen_threads);
      cmd_generate(gen);
    });
  });

  // evaluate
  EvaluateArgs ev;
  std::vector<std::size_t> eval_ks;
  auto* evc = app.add_subcommand("evaluate", "score recommendations");
  evc->add_option("--recs", ev.recommendations, "recommendations JSONL")->required();
  evc->add_option("--split", ev.split_dir, "split whose test bundles are the ground truth");
  evc->add_option("--truth", ev.truth_path, "ground-truth JSONL");
  evc->add_option("--checkpoint", ev.checkpoint, "model for AUC");
  evc->add_option("--k", eval_ks, "precision cut-offs")->delimiter(',');
  evc->add_option("--run-id", ev.run_id);
  evc->add_option("--json", ev.out_json, "report JSON path");
  evc->add_option("--csv", ev.out_csv, "report CSV path");
  evc->add_option("--seed", ev.seed);
  evc->callback([&] {
    status = guarded([&] {
      if (!eval_ks.empty()) ev.ks = eval_ks;
      cmd_evaluate(ev);
    });
  });

  // sweep
  SweepArgs sw;
  std::string sweep_config;
  GenerationFlags sweep_flags;
  std::optional<unsigned> sweep_threads;
  auto* swc = app.add_subcommand("sweep", "grid over lambda and C");
  swc->add_option("--config", sweep_config, "run config JSON");
  swc->add_option("--checkpoint", sw.checkpoint)->required();
  swc->add_option("--split", sw.split_dir)->required();
  swc->add_option("--lambdas", sw.lambdas, "lambda grid")->delimiter(',');
  swc->add_option("--shifts", sw.shifts, "C grid")->delimiter(',');
  swc->add_option("--max-users", sw.max_users);
  swc->add_option("--out", sw.out_csv, "CSV path");
  swc->add_option("--threads", sweep_threads);
  sweep_flags.add_to(swc);
  swc->callback([&] {
    status = guarded([&] {
      sw.base = base_config(sweep_config).generation;
      sweep_flags.apply(sw.base);
      override_with(sw.threads, sweep_threads);
      cmd_sweep(sw);
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }
  return status;
}
