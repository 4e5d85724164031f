// Copyright 2026 The Slotlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "slotlab/checkpoint.h"
#include "slotlab/convert.h"
#include "slotlab/data.h"
#include "slotlab/errors.h"
#include "slotlab/model.h"
#include "slotlab/synthetic.h"
#include "slotlab/trainer.h"

namespace slotlab {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr const char* kTrainManifest = "train_manifest.json";

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void write_json(const fs::path& path, const ojson& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

struct ConfigFlags {
  std::string path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> threads;
  std::optional<std::string> variant;
  std::optional<std::string> dtype;
  bool deterministic = false;

  void add_to(CLI::App* app, bool config_required) {
    auto* opt = app->add_option("--config", path, "Model config (JSON, ModelConfig field names)");
    if (config_required) opt->required();
    app->add_option("--seed", seed, "Overrides the config seed");
    app->add_option("--epochs", epochs, "Overrides max_epochs");
    app->add_option("--threads", threads, "Overrides num_threads (0 = all)");
    app->add_option("--variant", variant, "none|self_abs|self_rel|abstract_rel");
    app->add_option("--dtype", dtype, "f32|f64");
    app->add_flag("--deterministic", deterministic, "Serial batches");
  }

  ModelConfig resolve() const {
    ModelConfig c = path.empty() ? ModelConfig{} : load_config(path);
    if (seed) c.seed = *seed;
    if (epochs) c.max_epochs = *epochs;
    if (threads) c.num_threads = *threads;
    if (variant) c.variant = parse_variant(*variant);
    if (dtype) c.dtype = parse_dtype(*dtype);
    if (deterministic) c.deterministic = true;
    c.validate();
    return c;
  }
};

struct TrainFlags {
  ConfigFlags config;
  std::string train_path;
  std::string dev_path;
  std::size_t denominator = 1;
  std::uint64_t fraction_seed = 0;
  std::optional<double> target_f1;
  std::string log_path;
};

template <typename Real>
std::unique_ptr<SlotTagger<Real>> fit(const TrainFlags& flags, const ModelConfig& config, ojson& summary) {
  auto train_set = load_dataset(flags.train_path);
  if (flags.denominator != 1) train_set = fraction_split(train_set, flags.denominator, flags.fraction_seed);
  const auto dev_set = flags.dev_path.empty() ? std::vector<Utterance>{} : load_dataset(flags.dev_path);
  auto model = build_model<Real>(config, train_set);
  std::ofstream log_file;
  TrainOptions opt;
  if (!flags.log_path.empty()) {
    log_file.open(flags.log_path);
    if (!log_file) throw DataError("cannot write " + flags.log_path);
    opt.log = &log_file;
  }
  opt.target_dev_f1 = flags.target_f1;
  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult r = train(*model, train_set, dev_set, opt);
  summary = ojson{{"config_hash", config_hash(config)},
                  {"seed", config.seed},
                  {"variant", variant_name(config.variant)},
                  {"train", flags.train_path},
                  {"dev", flags.dev_path},
                  {"train_size", train_set.size()},
                  {"dev_size", dev_set.size()},
                  {"denominator", flags.denominator},
                  {"fraction_seed", flags.fraction_seed},
                  {"parameters", model->parameters().total_count()},
                  {"epochs_run", r.epochs.size()},
                  {"best_epoch", r.best_epoch},
                  {"best_dev_f1", r.best_dev_f1},
                  {"first_epoch_loss", r.epochs.empty() ? 0.0 : r.epochs.front().train_loss},
                  {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  return model;
}

template <typename Real>
int do_train(const TrainFlags& flags, const ModelConfig& config, const std::string& out_dir, std::ostream& out) {
  ojson summary;
  auto model = fit<Real>(flags, config, summary);
  save_checkpoint(out_dir, *model);
  write_json(fs::path(out_dir) / kTrainManifest, summary);
  out << summary.dump(2) << "\n";
  return 0;
}

ojson report_manifest(const fs::path& ckpt, const std::string& test_path, std::size_t test_size) {
  const auto m = read_manifest(ckpt);
  ojson j{{"checkpoint", ckpt.string()},
          {"config_hash", m.value("config_hash", "")},
          {"seed", m.contains("config") ? m["config"].value("seed", 0) : 0},
          {"test", test_path},
          {"test_size", test_size},
          {"denominator", 1}};
  std::ifstream f(ckpt / kTrainManifest);
  if (f) {
    try {
      const auto t = nlohmann::json::parse(f);
      j["denominator"] = t.value("denominator", 1);
      j["fraction_seed"] = t.value("fraction_seed", 0);
      j["train"] = t.value("train", "");
      j["train_size"] = t.value("train_size", 0);
    } catch (const nlohmann::json::exception& e) {
      throw DataError((ckpt / kTrainManifest).string() + ": " + e.what());
    }
  }
  return j;
}

template <typename Real>
EvalReport eval_checkpoint(const fs::path& ckpt, const std::string& test_path, std::size_t threads) {
  auto model = load_checkpoint<Real>(ckpt);
  const auto test = load_dataset(test_path);
  EvalReport r = evaluate(*model, test, threads);
  r.manifest = report_manifest(ckpt, test_path, test.size());
  return r;
}

template <typename Real>
ojson predict_text(const fs::path& ckpt, const std::string& text) {
  auto model = load_checkpoint<Real>(ckpt);
  const Utterance u = make_utterance(text, {});
  ojson spans = ojson::array();
  for (const SlotSpan& s : model->predict(u)) {
    std::string surface;
    for (std::size_t i = s.start; i <= s.end; ++i) surface += (i == s.start ? "" : " ") + u.tokens[i].text;
    spans.push_back({{"slot", s.slot},
                     {"start", s.start},
                     {"end", s.end},
                     {"start_char", u.tokens[s.start].char_start},
                     {"end_char", u.tokens[s.end].char_end},
                     {"text", surface}});
  }
  ojson tokens = ojson::array();
  for (const Token& t : u.tokens) tokens.push_back(t.text);
  return {{"text", text}, {"tokens", tokens}, {"spans", spans}};
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

template <typename Real>
ojson ablate_one(const TrainFlags& flags, const ModelConfig& config, const std::string& test_path) {
  ojson summary;
  auto model = fit<Real>(flags, config, summary);
  const auto test = load_dataset(test_path);
  const EvalReport r = evaluate(*model, test, resolve_threads(config));
  summary["test_micro_f1"] = r.f1();
  summary["test_macro_f1"] = r.macro_f1;
  summary["test"] = r.to_json();
  return summary;
}

const std::vector<std::pair<std::string, AttentionVariant>> kLattice = {
    {"crf_only", AttentionVariant::kNone},
    {"self_abs", AttentionVariant::kSelfAbs},
    {"self_rel", AttentionVariant::kSelfRel},
    {"abstract_rel", AttentionVariant::kAbstractRel}};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Slot labelling with a CRF, character LSTM and relative attention"};
  app.name("slotlab");
  app.require_subcommand(1);

  TrainFlags tf;
  std::string out_dir;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  tf.config.add_to(train_cmd, false);
  train_cmd->add_option("--train", tf.train_path, "Training set (.jsonl or .conll)")->required();
  train_cmd->add_option("--dev", tf.dev_path, "Dev set for model selection");
  train_cmd->add_option("--out", out_dir, "Checkpoint directory")->required();
  train_cmd->add_option("--denominator", tf.denominator, "Train on floor(N/d) examples");
  train_cmd->add_option("--fraction-seed", tf.fraction_seed, "Seed of the fraction shuffle");
  train_cmd->add_option("--target-dev-f1", tf.target_f1, "Stop once dev F1 reaches this value");
  train_cmd->add_option("--log", tf.log_path, "Per-epoch JSON lines");

  std::string ckpt, test_path, report_path;
  std::size_t eval_threads = 1;
  auto* eval_cmd = app.add_subcommand("evaluate", "Span F1 of a checkpoint on a test set");
  eval_cmd->add_option("--ckpt", ckpt, "Checkpoint directory")->required();
  eval_cmd->add_option("--test", test_path, "Test set")->required();
  eval_cmd->add_option("--report", report_path, "Write the JSON report here");
  eval_cmd->add_option("--threads", eval_threads, "Worker threads");

  std::string text;
  auto* predict_cmd = app.add_subcommand("predict", "Tag one utterance");
  predict_cmd->add_option("--ckpt", ckpt, "Checkpoint directory")->required();
  predict_cmd->add_option("--text", text, "Utterance")->required();

  ConfigFlags pf;
  std::size_t vocab = 47, tags = 79;
  auto* params_cmd = app.add_subcommand("params", "Parameter counts, full and block-diagonal");
  pf.add_to(params_cmd, false);
  params_cmd->add_option("--vocab", vocab, "Character vocabulary size incl. PAD and UNK");
  params_cmd->add_option("--tags", tags, "BIO tag set size");

  std::string in_path, out_path;
  std::size_t denominator = 1;
  std::uint64_t seed = 0;
  auto* subset_cmd = app.add_subcommand("subset", "Deterministic 1/d training subset");
  subset_cmd->add_option("--in", in_path, "Dataset")->required();
  subset_cmd->add_option("--denominator", denominator, "Power of two up to 256")->required();
  subset_cmd->add_option("--seed", seed, "Shuffle seed");
  subset_cmd->add_option("--out", out_path, "Output dataset")->required();

  std::string slot, values_path, reference_path;
  auto* subst_cmd = app.add_subcommand("substitute", "Replace the surface forms of one slot type");
  subst_cmd->add_option("--in", in_path, "Dataset")->required();
  subst_cmd->add_option("--slot", slot, "Slot type")->required();
  subst_cmd->add_option("--values", values_path, "Replacement values, one per line")->required();
  subst_cmd->add_option("--reference", reference_path, "Training set the values must not occur in");
  subst_cmd->add_option("--seed", seed, "Sampling seed");
  subst_cmd->add_option("--out", out_path, "Output dataset")->required();

  TrainFlags af;
  auto* ablate_cmd = app.add_subcommand("ablate", "Train and test every attention variant");
  af.config.add_to(ablate_cmd, false);
  ablate_cmd->add_option("--train", af.train_path, "Training set")->required();
  ablate_cmd->add_option("--dev", af.dev_path, "Dev set");
  ablate_cmd->add_option("--test", test_path, "Test set")->required();
  ablate_cmd->add_option("--denominator", af.denominator, "Train on floor(N/d) examples");
  ablate_cmd->add_option("--fraction-seed", af.fraction_seed, "Seed of the fraction shuffle");
  ablate_cmd->add_option("--report", report_path, "Write the JSON report here");

  std::string format;
  auto* convert_cmd = app.add_subcommand("convert", "Convert a native corpus layout to JSONL or CoNLL");
  convert_cmd->add_option("--format", format, "restaurants8k|atis|mtop")->required();
  convert_cmd->add_option("--in", in_path, "Native file")->required();
  convert_cmd->add_option("--out", out_path, "Output dataset")->required();

  std::string corpus = "city";
  std::size_t train_size = 0, dev_size = 0, test_size = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Write a generated corpus as train/dev/test JSONL");
  synth_cmd->add_option("--corpus", corpus, "city|restaurant");
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Generator seed");
  synth_cmd->add_option("--train-size", train_size, "Training utterances");
  synth_cmd->add_option("--dev-size", dev_size, "Dev utterances");
  synth_cmd->add_option("--test-size", test_size, "Test utterances");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (train_cmd->parsed()) {
      const ModelConfig c = tf.config.resolve();
      return c.dtype == DType::kF64 ? do_train<double>(tf, c, out_dir, out) : do_train<float>(tf, c, out_dir, out);
    }
    if (eval_cmd->parsed()) {
      const EvalReport r = checkpoint_dtype(ckpt) == DType::kF64 ? eval_checkpoint<double>(ckpt, test_path, eval_threads)
                                                                 : eval_checkpoint<float>(ckpt, test_path, eval_threads);
      if (!report_path.empty()) write_json(report_path, r.to_json());
      out << r.table() << "F1 " << fixed(r.f1(), 3) << "\n";
      return 0;
    }
    if (predict_cmd->parsed()) {
      const ojson j = checkpoint_dtype(ckpt) == DType::kF64 ? predict_text<double>(ckpt, text)
                                                            : predict_text<float>(ckpt, text);
      out << j.dump() << "\n";
      return 0;
    }
    if (params_cmd->parsed()) {
      ModelConfig full = pf.resolve();
      full.use_block_dense = false;
      ModelConfig blocked = full;
      blocked.use_block_dense = true;
      blocked.validate();
      const auto f = count_parameters(full, vocab, tags);
      const auto b = count_parameters(blocked, vocab, tags);
      const double factor = static_cast<double>(f.total) / static_cast<double>(b.total);
      out << std::left << std::setw(40) << "parameter" << std::right << std::setw(12) << "full" << std::setw(12)
          << "blocked" << "\n";
      for (std::size_t i = 0; i < f.entries.size(); ++i) {
        out << std::left << std::setw(40) << f.entries[i].first << std::right << std::setw(12) << f.entries[i].second
            << std::setw(12) << b.entries[i].second << "\n";
      }
      out << std::left << std::setw(40) << "total" << std::right << std::setw(12) << f.total << std::setw(12)
          << b.total << "\n";
      out << "blocks " << blocked.num_blocks << "  vocab " << vocab << "  tags " << tags << "\n";
      out << "reduction factor " << fixed(factor, 2) << "\n";
      return 0;
    }
    if (subset_cmd->parsed()) {
      const auto all = load_dataset(in_path);
      const auto sub = fraction_split(all, denominator, seed);
      save_dataset(out_path, sub);
      out << ojson{{"in", in_path}, {"size", all.size()}, {"denominator", denominator}, {"seed", seed},
                   {"out", out_path}, {"subset_size", sub.size()}}
                 .dump()
          << "\n";
      return 0;
    }
    if (subst_cmd->parsed()) {
      const auto data = load_dataset(in_path);
      const auto values = read_lines(values_path);
      std::vector<Utterance> reference;
      if (!reference_path.empty()) reference = load_dataset(reference_path);
      const auto result =
          substitute_entities(data, slot, values, seed, reference_path.empty() ? nullptr : &reference);
      save_dataset(out_path, result);
      out << ojson{{"in", in_path}, {"slot", slot}, {"values", values.size()}, {"seed", seed}, {"out", out_path}}
                 .dump()
          << "\n";
      return 0;
    }
    if (ablate_cmd->parsed()) {
      const ModelConfig base = af.config.resolve();
      ojson rows = ojson::array();
      out << std::left << std::setw(16) << "variant" << std::right << std::setw(10) << "micro F1" << std::setw(10)
          << "macro F1" << std::setw(10) << "dev F1" << std::setw(12) << "params" << "\n";
      for (const auto& [label, variant] : kLattice) {
        ModelConfig c = base;
        c.variant = variant;
        c.mask_current.reset();
        ojson row = c.dtype == DType::kF64 ? ablate_one<double>(af, c, test_path) : ablate_one<float>(af, c, test_path);
        row["label"] = label;
        out << std::left << std::setw(16) << label << std::right << std::setw(10)
            << fixed(row["test_micro_f1"].get<double>(), 3) << std::setw(10)
            << fixed(row["test_macro_f1"].get<double>(), 3) << std::setw(10)
            << fixed(row["best_dev_f1"].get<double>(), 3) << std::setw(12) << row["parameters"].get<std::size_t>()
            << "\n";
        rows.push_back(row);
      }
      const ojson report{{"manifest",
                          {{"config", config_to_json(base)},
                           {"config_hash", config_hash(base)},
                           {"seed", base.seed},
                           {"train", af.train_path},
                           {"dev", af.dev_path},
                           {"test", test_path},
                           {"denominator", af.denominator},
                           {"fraction_seed", af.fraction_seed}}},
                         {"rows", rows}};
      if (!report_path.empty()) write_json(report_path, report);
      return 0;
    }
    if (convert_cmd->parsed()) {
      const auto data = load_native(in_path, parse_native_format(format));
      save_dataset(out_path, data);
      out << ojson{{"in", in_path}, {"format", format}, {"utterances", data.size()}, {"out", out_path}}.dump()
          << "\n";
      return 0;
    }
    if (synth_cmd->parsed()) {
      SyntheticCorpus sc;
      if (corpus == "city") {
        CityCorpusOptions o;
        o.seed = seed;
        if (train_size) o.train_size = train_size;
        if (dev_size) o.dev_size = dev_size;
        if (test_size) o.test_size = test_size;
        sc = make_city_corpus(o);
      } else if (corpus == "restaurant") {
        RestaurantCorpusOptions o;
        o.seed = seed;
        if (train_size) o.train_size = train_size;
        if (dev_size) o.dev_size = dev_size;
        if (test_size) o.test_size = test_size;
        sc = make_restaurant_corpus(o);
      } else {
        throw ConfigError("unknown corpus '" + corpus + "' (expected city or restaurant)");
      }
      fs::create_directories(out_dir);
      save_jsonl(fs::path(out_dir) / "train.jsonl", sc.train);
      save_jsonl(fs::path(out_dir) / "dev.jsonl", sc.dev);
      save_jsonl(fs::path(out_dir) / "test.jsonl", sc.test);
      out << ojson{{"corpus", corpus}, {"seed", seed}, {"train", sc.train.size()}, {"dev", sc.dev.size()},
                   {"test", sc.test.size()}}
                 .dump()
          << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace slotlab
