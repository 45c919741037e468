// rnnt-lab/tools/rnnt_lab.cc

// Copyright 2026  rnnt-lab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: corpus generation, pre-training, training,
// decoding, delay analysis and the full experiment.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rnnt/checkpoint.h"
#include "rnnt/corpus.h"
#include "rnnt/decoding.h"
#include "rnnt/harness.h"
#include "rnnt/pretrain.h"

namespace {

using namespace rnnt;

ExperimentConfig config_or_default(const std::string &path) {
  if (path.empty()) return ExperimentConfig{};
  return load_experiment_config(path);
}

void print_epoch(const char *what, const EpochReport &r) {
  std::cerr << what << " epoch " << r.epoch << " loss " << r.mean_loss << " (" << r.used
            << " utterances";
  if (r.skipped) std::cerr << ", " << r.skipped << " skipped";
  std::cerr << ")\n";
}

RnntModel load_model(const std::string &path) {
  Checkpoint ckpt = load_checkpoint(path);
  RnntModel model(ckpt.config);
  restore(model, ckpt);
  return model;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"rnnt-lab: transducer training with alignment-based pre-training"};
  app.require_subcommand(1);

  std::string config_path;

  // gen-corpus
  auto *gen = app.add_subcommand("gen-corpus", "generate synthetic train/test corpora");
  std::string gen_out = ".";
  std::optional<std::uint64_t> gen_seed;
  std::optional<double> gen_noise;
  std::optional<std::size_t> gen_train, gen_test;
  gen->add_option("--config", config_path, "experiment config (its corpus section is used)");
  gen->add_option("--out-dir", gen_out, "directory for train.jsonl and test.jsonl");
  gen->add_option("--seed", gen_seed, "override the corpus seed");
  gen->add_option("--noise", gen_noise, "override the feature noise level");
  gen->add_option("--train", gen_train, "number of training utterances");
  gen->add_option("--test", gen_test, "number of test utterances");

  // pretrain
  auto *pre = app.add_subcommand("pretrain", "run one pre-training schedule");
  std::string variant, pre_corpus, pre_out, pre_manifest;
  pre->add_option("--variant", variant, "schedule")
      ->required()
      ->check(CLI::IsMember({"enc-ce", "enc-ctc", "lm", "y1", "y2", "y3"}));
  pre->add_option("--corpus", pre_corpus, "training corpus (JSON lines)")->required();
  pre->add_option("--config", config_path, "experiment config (model, init_seed, pretrain)");
  pre->add_option("--out", pre_out, "output checkpoint")->required();
  pre->add_option("--manifest", pre_manifest, "sidecar manifest (default: <out>.manifest.json)");

  // train
  auto *train = app.add_subcommand("train", "transducer-loss training");
  std::string init = "random", init_part = "all", train_corpus, train_out;
  train->add_option("--init", init, "checkpoint to start from, or 'random'");
  train->add_option("--init-part", init_part, "tensors taken from --init")
      ->check(CLI::IsMember({"all", "encoder", "prediction"}));
  train->add_option("--corpus", train_corpus, "training corpus (JSON lines)")->required();
  train->add_option("--config", config_path, "experiment config (model, init_seed, train)");
  train->add_option("--out", train_out, "output checkpoint")->required();

  // decode
  auto *dec = app.add_subcommand("decode", "beam-decode a corpus");
  std::string dec_model, dec_corpus, dec_nbest;
  std::size_t beam = 5, max_symbols = kDefaultMaxSymbolsPerFrame;
  dec->add_option("--model", dec_model, "checkpoint")->required();
  dec->add_option("--corpus", dec_corpus, "corpus to decode (JSON lines)")->required();
  dec->add_option("--beam", beam, "beam width (1 = greedy)")->check(CLI::PositiveNumber);
  dec->add_option("--max-symbols", max_symbols, "emissions allowed per frame")
      ->check(CLI::PositiveNumber);
  dec->add_option("--nbest", dec_nbest, "n-best output (JSON lines, default stdout)");

  // delay-stats
  auto *delay = app.add_subcommand("delay-stats", "greedy emission delay per word");
  std::string del_model, del_corpus, del_out;
  delay->add_option("--model", del_model, "checkpoint")->required();
  delay->add_option("--corpus", del_corpus, "corpus with word alignments")->required();
  delay->add_option("--out", del_out, "CSV output (default stdout)");

  // experiment
  auto *exp = app.add_subcommand("experiment", "compare initialisation strategies");
  std::string exp_out = "experiment_out";
  std::vector<std::string> exp_arms;
  bool exp_parallel = false, quiet = false;
  exp->add_option("--config", config_path, "experiment config")->required();
  exp->add_option("--out-dir", exp_out, "output directory");
  exp->add_option("--arms", exp_arms, "subset of arms")->delimiter(',');
  exp->add_flag("--parallel", exp_parallel, "run arms concurrently");
  exp->add_flag("--quiet", quiet, "no per-epoch progress");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      ExperimentConfig cfg = config_or_default(config_path);
      if (gen_seed) cfg.corpus.seed = *gen_seed;
      if (gen_noise) cfg.corpus.noise = *gen_noise;
      if (gen_train) cfg.corpus.train_utterances = *gen_train;
      if (gen_test) cfg.corpus.test_utterances = *gen_test;
      CorpusSplit split = gen_corpus(cfg.corpus);
      std::filesystem::create_directories(gen_out);
      save_corpus(split.train, std::filesystem::path(gen_out) / "train.jsonl");
      save_corpus(split.test, std::filesystem::path(gen_out) / "test.jsonl");
      std::cout << "train " << split.train.size() << " utterances, hash "
                << corpus_hash(split.train) << "\ntest " << split.test.size()
                << " utterances, hash " << corpus_hash(split.test) << '\n';
    } else if (*pre) {
      ExperimentConfig cfg = config_or_default(config_path);
      Corpus corpus = load_corpus(pre_corpus);
      RnntModel model(cfg.model);
      model.init(cfg.init_seed);
      PretrainResult r;
      if (variant == "enc-ce")
        r = pretrain_encoder_ce(model, corpus, cfg.pretrain);
      else if (variant == "enc-ctc")
        r = pretrain_encoder_ctc(model, corpus, cfg.pretrain);
      else if (variant == "lm")
        r = pretrain_prediction_lm(model, corpus, cfg.pretrain);
      else
        r = pretrain_whole_network(model, corpus, parse_whole_variant(variant), cfg.pretrain);
      for (const EpochReport &e : r.epochs) print_epoch(variant.c_str(), e);
      save_checkpoint(r.checkpoint, pre_out);
      save_manifest(r.manifest, pre_manifest.empty() ? pre_out + ".manifest.json" : pre_manifest);
    } else if (*train) {
      ExperimentConfig cfg = config_or_default(config_path);
      Corpus corpus = load_corpus(train_corpus);
      RnntModel model(cfg.model);
      model.init(cfg.init_seed);
      if (init != "random") {
        Checkpoint ckpt = load_checkpoint(init);
        std::string prefix = init_part == "all" ? "" : init_part + ".";
        restore(model, ckpt, prefix);
      }
      train_rnnt(model, corpus, cfg.train,
                 [](const EpochReport &r) { print_epoch("rnnt", r); });
      save_checkpoint(snapshot(model), train_out);
    } else if (*dec) {
      RnntModel model = load_model(dec_model);
      Corpus corpus = load_corpus(dec_corpus);
      std::ofstream file;
      if (!dec_nbest.empty()) file.open(dec_nbest);
      std::ostream &os = dec_nbest.empty() ? std::cout : file;
      std::size_t errors = 0, ref = 0;
      for (const Utterance &utt : corpus) {
        ModelScorer scorer(model, model_input(utt, model.config()));
        auto nbest = beam_decode(scorer, beam, max_symbols);
        for (const Hypothesis &h : nbest) os << nbest_entry(utt.id, h).dump() << '\n';
        errors += edit_distance(nbest.front().prefix, utt.transcript);
        ref += utt.transcript.size();
      }
      std::cerr << "token error rate " << (ref ? double(errors) / double(ref) : 0.0) << " ("
                << errors << " / " << ref << ")\n";
    } else if (*delay) {
      RnntModel model = load_model(del_model);
      Corpus corpus = load_corpus(del_corpus);
      DelayStats stats;
      for (const Utterance &utt : corpus) {
        ModelScorer scorer(model, model_input(utt, model.config()));
        stats.merge(measure_delay(greedy_decode(scorer), utt.words, utt.transcript));
      }
      std::ofstream file;
      if (!del_out.empty()) file.open(del_out);
      write_delay_csv(stats, del_out.empty() ? std::cout : file);
      std::cerr << stats.utterances << " utterances measured, " << stats.skipped
                << " skipped (misrecognised)\n";
    } else if (*exp) {
      ExperimentConfig cfg = load_experiment_config(config_path);
      if (!exp_arms.empty()) cfg.arms = exp_arms;
      if (exp_parallel) cfg.parallel_arms = true;
      cfg.validate();
      ExperimentHooks hooks;
      if (!quiet)
        hooks.on_row = [](const MetricsRow &r) {
          std::cerr << r.arm << " epoch " << r.epoch << " loss "
                    << (r.train_loss ? std::to_string(*r.train_loss) : "-") << " ter "
                    << r.token_error_rate << " delay "
                    << (r.mean_delay ? std::to_string(*r.mean_delay) : "-") << " ("
                    << r.wall_seconds << " s)\n";
        };
      ExperimentReport report = run_experiment(cfg, hooks);
      write_report(report, exp_out);
      int failures = 0;
      for (const ArmResult &a : report.arms)
        if (a.error) {
          std::cerr << "arm " << a.arm << " failed: " << *a.error << '\n';
          ++failures;
        }
      std::cout << report.summary().dump(2) << '\n';
      return failures ? 1 : 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
