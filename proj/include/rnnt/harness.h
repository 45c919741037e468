// rnnt-lab/include/rnnt/harness.h

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

#ifndef RNNT_HARNESS_H_
#define RNNT_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnnt/corpus.h"
#include "rnnt/decoding.h"
#include "rnnt/model.h"
#include "rnnt/pretrain.h"
#include "rnnt/trainer.h"

namespace rnnt {

// Levenshtein distance with unit costs.
std::size_t edit_distance(std::span<const int> hyp, std::span<const int> ref);

// Initialisation strategies compared by the experiment.
inline const std::vector<std::string> kAllArms = {
    "random", "ctc_encoder", "ctc_lm", "encoder_ce", "whole_y1", "whole_y2", "whole_y3"};

struct ExperimentConfig {
  std::string name = "default";
  ModelConfig model;
  CorpusConfig corpus;
  std::uint64_t init_seed = 1;  // same random init for every arm
  TrainOptions pretrain;        // all pre-training schedules
  TrainOptions train;           // main transducer training, shared by all arms
  std::vector<std::string> arms = kAllArms;
  std::size_t beam_width = 5;
  std::size_t max_symbols_per_frame = kDefaultMaxSymbolsPerFrame;
  std::size_t eval_every = 1;  // epochs between test-set evaluations
  bool parallel_arms = false;

  // Checks the pieces against each other (vocab and feature widths, arms).
  void validate() const;
};

void to_json(nlohmann::json &j, const ExperimentConfig &c);
void from_json(const nlohmann::json &j, ExperimentConfig &c);
ExperimentConfig load_experiment_config(const std::filesystem::path &path);
std::string config_hash(const ExperimentConfig &c);

// Transducer-loss training of the whole model: the post-initialisation code
// path of every arm.
std::vector<EpochReport> train_rnnt(RnntModel &model, const Corpus &corpus,
                                    const TrainOptions &options,
                                    const EpochCallback &on_epoch = {});

struct EvalResult {
  std::size_t errors = 0;      // summed edit distance of the best hypotheses
  std::size_t ref_tokens = 0;  // summed reference length
  DelayStats delay;            // from greedy decoding
  std::vector<std::string> utt_ids;
  std::vector<std::vector<Hypothesis>> nbest;  // per utterance, best first

  double token_error_rate() const;
};

// Beam decoding for the error rate, greedy decoding for the delays.
EvalResult evaluate(RnntModel &model, const Corpus &test, std::size_t beam_width,
                    std::size_t max_symbols_per_frame);

struct MetricsRow {
  std::string config_hash;
  std::string arm;
  std::size_t epoch = 0;  // 0 = right after initialisation
  std::optional<double> train_loss;
  double token_error_rate = 0.0;
  std::optional<double> mean_delay;
  std::size_t delay_words = 0;
  std::size_t delay_skipped = 0;
  double wall_seconds = 0.0;  // not written to the CSV, which must be reproducible
};

std::string metrics_csv_header();
std::string metrics_csv_line(const MetricsRow &row);

// Builds the initial model of an arm: seeded random init, then the arm's
// pre-training schedules with the matching tensors transferred.
struct ArmInit {
  std::vector<PretrainManifest> manifests;
};
ArmInit initialize_arm(RnntModel &model, const std::string &arm, const ExperimentConfig &cfg,
                       const Corpus &train);

struct ArmResult {
  std::string arm;
  std::vector<MetricsRow> rows;
  std::vector<PretrainManifest> manifests;
  std::optional<std::string> error;
  EvalResult final_eval;
  double wall_seconds = 0.0;
};

// Observers for tests and progress output.
struct ExperimentHooks {
  std::function<void(const std::string &arm, RnntModel &model)> on_initialized;
  std::function<void(const std::string &arm, RnntModel &model)> on_trained;
  std::function<void(const MetricsRow &row)> on_row;
};

struct ExperimentReport {
  std::string config_hash;
  std::string corpus_hash;
  std::vector<ArmResult> arms;

  const ArmResult *find(const std::string &arm) const;
  std::string metrics_csv() const;
  nlohmann::json summary() const;
};

ExperimentReport run_experiment(const ExperimentConfig &cfg, const CorpusSplit &data,
                                const ExperimentHooks &hooks = {});
ExperimentReport run_experiment(const ExperimentConfig &cfg, const ExperimentHooks &hooks = {});

// metrics.csv, summary.json, and per-arm nbest_<arm>.jsonl / delay_<arm>.csv.
void write_report(const ExperimentReport &report, const std::filesystem::path &dir);

}  // namespace rnnt

#endif  // RNNT_HARNESS_H_
