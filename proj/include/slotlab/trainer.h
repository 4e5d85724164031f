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

#ifndef SLOTLAB_TRAINER_H_
#define SLOTLAB_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "slotlab/eval.h"
#include "slotlab/model.h"

namespace slotlab {

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// is rethrown on the caller.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);
std::size_t resolve_threads(const ModelConfig& config);

// Adam with decoupled weight decay; parameters with decay == false skip the
// decay term.
template <typename Real>
class AdamW {
 public:
  AdamW(ParameterStore<Real>& store, const OptimizerConfig& config, double weight_decay);
  void step();
  std::size_t steps() const { return steps_; }

 private:
  ParameterStore<Real>& store_;
  OptimizerConfig config_;
  double weight_decay_;
  std::size_t steps_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

// Name of the first parameter whose value or gradient is not finite, or "".
template <typename Real>
std::string first_nonfinite_parameter(const ParameterStore<Real>& store);

struct Example {
  std::vector<CharIds> words;
  std::vector<std::size_t> tags;
};

template <typename Real>
std::vector<Example> make_examples(const SlotTagger<Real>& model, const std::vector<Utterance>& utts);

// Accumulates d(mean loss)/d(params) into Parameter::grad and returns the
// summed (not averaged) loss. Per-utterance tapes are reduced in batch order,
// so the result does not depend on the thread count.
template <typename Real>
double accumulate_batch_gradients(const SlotTagger<Real>& model, const std::vector<Example>& examples,
                                  const std::vector<std::size_t>& batch, bool training, std::uint64_t epoch_seed,
                                  std::size_t threads);

template <typename Real>
std::vector<std::vector<SlotSpan>> predict_all(const SlotTagger<Real>& model, const std::vector<Utterance>& utts,
                                               std::size_t threads = 1);

template <typename Real>
EvalReport evaluate(const SlotTagger<Real>& model, const std::vector<Utterance>& utts, std::size_t threads = 1);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean per-utterance NLL over the epoch
  double dev_f1 = 0.0;
  double wall_seconds = 0.0;
  bool improved = false;

  nlohmann::ordered_json to_json() const;
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_dev_f1 = 0.0;
  bool stopped_early = false;
};

struct TrainOptions {
  // One JSON object per epoch.
  std::ostream* log = nullptr;
  std::function<void(const EpochRecord&)> on_epoch;
  // Stops as soon as dev F1 reaches this value.
  std::optional<double> target_dev_f1;
};

// Trains in place and restores the parameters of the best dev-F1 epoch (the
// latest one on ties). With an empty dev set the last epoch is kept and dev_f1
// is reported as 0.
template <typename Real>
TrainResult train(SlotTagger<Real>& model, const std::vector<Utterance>& train_set,
                  const std::vector<Utterance>& dev_set, const TrainOptions& options = {});

// Vocabulary and tag set come from the training split only.
template <typename Real>
std::unique_ptr<SlotTagger<Real>> build_model(const ModelConfig& config, const std::vector<Utterance>& train_set);

}  // namespace slotlab

#endif  // SLOTLAB_TRAINER_H_
