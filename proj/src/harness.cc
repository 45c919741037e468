// rnnt-lab/src/harness.cc

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

#include "rnnt/harness.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "rnnt/checkpoint.h"
#include "rnnt/loss.h"

namespace rnnt {

namespace {

std::string format_double(double v) { return nlohmann::json(v).dump(); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Pre-trains a scratch copy of the arm's random init and copies the tensors
// under `prefix` into `model`.
template <typename Schedule>
PretrainManifest transfer(RnntModel &model, const ExperimentConfig &cfg, const Corpus &train,
                          const std::string &prefix, Schedule schedule) {
  RnntModel scratch(cfg.model);
  scratch.init(cfg.init_seed);
  PretrainResult r = schedule(scratch, train, cfg.pretrain);
  restore(model, r.checkpoint, prefix);
  return r.manifest;
}

ArmResult run_arm(const std::string &arm, const ExperimentConfig &cfg, const CorpusSplit &data,
                  const std::string &hash, const ExperimentHooks &hooks) {
  ArmResult result;
  result.arm = arm;
  auto start = std::chrono::steady_clock::now();
  try {
    RnntModel model(cfg.model);
    result.manifests = initialize_arm(model, arm, cfg, data.train).manifests;
    if (hooks.on_initialized) hooks.on_initialized(arm, model);

    auto record = [&](std::size_t epoch, std::optional<double> loss) {
      result.final_eval =
          evaluate(model, data.test, cfg.beam_width, cfg.max_symbols_per_frame);
      MetricsRow row;
      row.config_hash = hash;
      row.arm = arm;
      row.epoch = epoch;
      row.train_loss = loss;
      row.token_error_rate = result.final_eval.token_error_rate();
      if (!result.final_eval.delay.empty()) row.mean_delay = result.final_eval.delay.mean();
      row.delay_words = result.final_eval.delay.samples.size();
      row.delay_skipped = result.final_eval.delay.skipped;
      row.wall_seconds = seconds_since(start);
      result.rows.push_back(row);
      if (hooks.on_row) hooks.on_row(row);
    };
    record(0, std::nullopt);
    const std::size_t every = std::max<std::size_t>(cfg.eval_every, 1);
    train_rnnt(model, data.train, cfg.train, [&](const EpochReport &rep) {
      if (rep.epoch % every == 0 || rep.epoch == cfg.train.epochs)
        record(rep.epoch, rep.mean_loss);
    });
    if (hooks.on_trained) hooks.on_trained(arm, model);
  } catch (const std::exception &e) {
    result.error = e.what();
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

}  // namespace

std::size_t edit_distance(std::span<const int> hyp, std::span<const int> ref) {
  std::vector<std::size_t> prev(ref.size() + 1), cur(ref.size() + 1);
  for (std::size_t j = 0; j <= ref.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= ref.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[ref.size()];
}

void ExperimentConfig::validate() const {
  model.validate();
  corpus.validate();
  if (model.vocab_size != corpus.vocab_size)
    throw InvalidArgument("model vocab_size " + std::to_string(model.vocab_size) +
                          " != corpus vocab_size " + std::to_string(corpus.vocab_size));
  if (model.input_dim != corpus.input_dim)
    throw InvalidArgument("model input_dim " + std::to_string(model.input_dim) +
                          " != corpus input_dim " + std::to_string(corpus.input_dim));
  if (model.stride != corpus.stride)
    throw InvalidArgument("model stride " + std::to_string(model.stride) +
                          " != corpus stride " + std::to_string(corpus.stride));
  if (beam_width == 0) throw InvalidArgument("beam_width must be >= 1");
  if (max_symbols_per_frame == 0) throw InvalidArgument("max_symbols_per_frame must be >= 1");
  if (arms.empty()) throw InvalidArgument("no experiment arms");
  for (const std::string &a : arms)
    if (std::find(kAllArms.begin(), kAllArms.end(), a) == kAllArms.end())
      throw InvalidArgument("unknown arm '" + a + "'");
}

void to_json(nlohmann::json &j, const ExperimentConfig &c) {
  j = {{"name", c.name},
       {"model", c.model},
       {"corpus", c.corpus},
       {"init_seed", c.init_seed},
       {"pretrain", c.pretrain},
       {"train", c.train},
       {"arms", c.arms},
       {"beam_width", c.beam_width},
       {"max_symbols_per_frame", c.max_symbols_per_frame},
       {"eval_every", c.eval_every},
       {"parallel_arms", c.parallel_arms}};
}

void from_json(const nlohmann::json &j, ExperimentConfig &c) {
  ExperimentConfig d;
  c.name = j.value("name", d.name);
  c.model = j.value("model", d.model);
  c.corpus = j.value("corpus", d.corpus);
  c.init_seed = j.value("init_seed", d.init_seed);
  c.pretrain = j.value("pretrain", d.pretrain);
  c.train = j.value("train", d.train);
  c.arms = j.value("arms", d.arms);
  c.beam_width = j.value("beam_width", d.beam_width);
  c.max_symbols_per_frame = j.value("max_symbols_per_frame", d.max_symbols_per_frame);
  c.eval_every = j.value("eval_every", d.eval_every);
  c.parallel_arms = j.value("parallel_arms", d.parallel_arms);
}

ExperimentConfig load_experiment_config(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot read " + path.string());
  ExperimentConfig c;
  try {
    c = nlohmann::json::parse(is).get<ExperimentConfig>();
  } catch (const nlohmann::json::exception &e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

std::string config_hash(const ExperimentConfig &c) {
  nlohmann::json j = c;
  // Scheduling does not change any number.
  j.erase("parallel_arms");
  return fnv1a_hex(j.dump());
}

std::vector<EpochReport> train_rnnt(RnntModel &model, const Corpus &corpus,
                                    const TrainOptions &options, const EpochCallback &on_epoch) {
  const ModelConfig &cfg = model.config();
  auto loss = [&](Tape &tape, const Utterance &utt) -> std::optional<Var> {
    Var z = model.logits(tape, model_input(utt, cfg), utt.transcript);
    return rnnt_loss(z, utt.transcript, cfg.blank());
  };
  return train_loop(model.parameters(), corpus, options, loss, on_epoch);
}

double EvalResult::token_error_rate() const {
  if (ref_tokens == 0) return errors == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(errors) / static_cast<double>(ref_tokens);
}

EvalResult evaluate(RnntModel &model, const Corpus &test, std::size_t beam_width,
                    std::size_t max_symbols_per_frame) {
  EvalResult r;
  for (const Utterance &utt : test) {
    ModelScorer scorer(model, model_input(utt, model.config()));
    std::vector<Hypothesis> nbest = beam_decode(scorer, beam_width, max_symbols_per_frame);
    r.errors += edit_distance(nbest.front().prefix, utt.transcript);
    r.ref_tokens += utt.transcript.size();
    r.delay.merge(measure_delay(greedy_decode(scorer, max_symbols_per_frame), utt.words,
                                utt.transcript));
    r.utt_ids.push_back(utt.id);
    r.nbest.push_back(std::move(nbest));
  }
  return r;
}

std::string metrics_csv_header() {
  return "config_hash,arm,epoch,train_loss,token_error_rate,mean_delay,delay_words,"
         "delay_skipped";
}

std::string metrics_csv_line(const MetricsRow &row) {
  std::ostringstream os;
  os << row.config_hash << ',' << row.arm << ',' << row.epoch << ','
     << (row.train_loss ? format_double(*row.train_loss) : "") << ','
     << format_double(row.token_error_rate) << ','
     << (row.mean_delay ? format_double(*row.mean_delay) : "") << ',' << row.delay_words << ','
     << row.delay_skipped;
  return os.str();
}

ArmInit initialize_arm(RnntModel &model, const std::string &arm, const ExperimentConfig &cfg,
                       const Corpus &train) {
  model.init(cfg.init_seed);
  ArmInit init;
  auto whole = [](WholeVariant v) {
    return [v](RnntModel &m, const Corpus &c, const TrainOptions &o) {
      return pretrain_whole_network(m, c, v, o);
    };
  };
  if (arm == "random") {
  } else if (arm == "ctc_encoder" || arm == "ctc_lm") {
    init.manifests.push_back(transfer(model, cfg, train, "encoder.", pretrain_encoder_ctc));
    if (arm == "ctc_lm")
      init.manifests.push_back(
          transfer(model, cfg, train, "prediction.", pretrain_prediction_lm));
  } else if (arm == "encoder_ce") {
    init.manifests.push_back(transfer(model, cfg, train, "encoder.", pretrain_encoder_ce));
  } else if (arm == "whole_y1") {
    init.manifests.push_back(transfer(model, cfg, train, "", whole(WholeVariant::kY1)));
  } else if (arm == "whole_y2") {
    init.manifests.push_back(transfer(model, cfg, train, "", whole(WholeVariant::kY2)));
  } else if (arm == "whole_y3") {
    init.manifests.push_back(transfer(model, cfg, train, "", whole(WholeVariant::kY3)));
  } else {
    throw InvalidArgument("unknown arm '" + arm + "'");
  }
  return init;
}

const ArmResult *ExperimentReport::find(const std::string &arm) const {
  for (const ArmResult &a : arms)
    if (a.arm == arm) return &a;
  return nullptr;
}

std::string ExperimentReport::metrics_csv() const {
  std::string out = metrics_csv_header() + "\n";
  for (const ArmResult &a : arms)
    for (const MetricsRow &r : a.rows) out += metrics_csv_line(r) + "\n";
  return out;
}

nlohmann::json ExperimentReport::summary() const {
  nlohmann::json arms_json = nlohmann::json::array();
  const ArmResult *random = find("random");
  auto ok = [](const ArmResult *a) { return a && !a->error && !a->rows.empty(); };
  nlohmann::json comparisons = nlohmann::json::object();
  for (const ArmResult &a : arms) {
    nlohmann::json j = {{"arm", a.arm}, {"wall_seconds", a.wall_seconds}};
    j["pretrain"] = a.manifests;
    if (a.error) j["error"] = *a.error;
    if (ok(&a)) {
      const MetricsRow &last = a.rows.back();
      j["epochs"] = last.epoch;
      j["final_token_error_rate"] = last.token_error_rate;
      j["initial_token_error_rate"] = a.rows.front().token_error_rate;
      j["final_train_loss"] = last.train_loss ? nlohmann::json(*last.train_loss) : nullptr;
      j["final_mean_delay"] = last.mean_delay ? nlohmann::json(*last.mean_delay) : nullptr;
      j["delay_words"] = last.delay_words;
      if (ok(random) && a.arm != "random") {
        const MetricsRow &base = random->rows.back();
        nlohmann::json c;
        c["token_error_rate_delta"] = last.token_error_rate - base.token_error_rate;
        if (base.token_error_rate > 0)
          c["token_error_rate_relative"] =
              (last.token_error_rate - base.token_error_rate) / base.token_error_rate;
        if (last.mean_delay && base.mean_delay)
          c["mean_delay_delta"] = *last.mean_delay - *base.mean_delay;
        comparisons[a.arm + "_vs_random"] = c;
      }
    }
    arms_json.push_back(j);
  }
  return {{"config_hash", config_hash},
          {"corpus_hash", corpus_hash},
          {"arms", arms_json},
          {"comparisons", comparisons}};
}

ExperimentReport run_experiment(const ExperimentConfig &cfg, const CorpusSplit &data,
                                const ExperimentHooks &hooks) {
  cfg.validate();
  ExperimentReport report;
  report.config_hash = config_hash(cfg);
  report.corpus_hash = corpus_hash(data.train);
  if (cfg.parallel_arms) {
    // Arms share nothing mutable; results are collected in configuration
    // order so the outputs match a sequential run.
    std::vector<std::future<ArmResult>> futures;
    for (const std::string &arm : cfg.arms)
      futures.push_back(std::async(std::launch::async, run_arm, arm, std::cref(cfg),
                                   std::cref(data), report.config_hash, std::cref(hooks)));
    for (auto &f : futures) report.arms.push_back(f.get());
  } else {
    for (const std::string &arm : cfg.arms)
      report.arms.push_back(run_arm(arm, cfg, data, report.config_hash, hooks));
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig &cfg, const ExperimentHooks &hooks) {
  cfg.validate();
  return run_experiment(cfg, gen_corpus(cfg.corpus), hooks);
}

void write_report(const ExperimentReport &report, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string &name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw InvalidArgument("cannot write " + (dir / name).string());
    return os;
  };
  open("metrics.csv") << report.metrics_csv();
  open("summary.json") << report.summary().dump(2) << '\n';
  for (const ArmResult &a : report.arms) {
    if (a.error) continue;
    std::ofstream nb = open("nbest_" + a.arm + ".jsonl");
    for (std::size_t i = 0; i < a.final_eval.nbest.size(); ++i)
      for (const Hypothesis &h : a.final_eval.nbest[i])
        nb << nbest_entry(a.final_eval.utt_ids[i], h).dump() << '\n';
    std::ofstream dc = open("delay_" + a.arm + ".csv");
    write_delay_csv(a.final_eval.delay, dc);
  }
}

}  // namespace rnnt
