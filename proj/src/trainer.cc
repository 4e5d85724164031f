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

#include "slotlab/trainer.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace slotlab {

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&]() {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

std::size_t resolve_threads(const ModelConfig& config) {
  if (config.deterministic) return 1;
  if (config.num_threads == 0) return std::max(1u, std::thread::hardware_concurrency());
  return config.num_threads;
}

// ---------------------------------------------------------------------------

template <typename Real>
AdamW<Real>::AdamW(ParameterStore<Real>& store, const OptimizerConfig& config, double weight_decay)
    : store_(store), config_(config), weight_decay_(weight_decay) {
  for (const auto& p : store_.items()) {
    m_.emplace_back(p->value.size(), 0.0);
    v_.emplace_back(p->value.size(), 0.0);
  }
}

template <typename Real>
void AdamW<Real>::step() {
  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const auto& params = store_.items();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter<Real>& p = *params[i];
    const double decay = p.decay ? weight_decay_ : 0.0;
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      const double update = (m[j] / c1) / (std::sqrt(v[j] / c2) + config_.eps) + decay * p.value[j];
      p.value[j] = static_cast<Real>(p.value[j] - config_.lr * update);
    }
  }
}

template <typename Real>
std::string first_nonfinite_parameter(const ParameterStore<Real>& store) {
  for (const auto& p : store.items()) {
    if (!all_finite(p->value) || !all_finite(p->grad)) return p->name;
  }
  return "";
}

template <typename Real>
std::vector<Example> make_examples(const SlotTagger<Real>& model, const std::vector<Utterance>& utts) {
  std::vector<Example> out;
  out.reserve(utts.size());
  for (const Utterance& u : utts) out.push_back({model.encode_words(u.words()), bio_from_spans(u, model.tagset())});
  return out;
}

namespace {
std::uint64_t example_seed(std::uint64_t epoch_seed, std::size_t index) {
  return derive_seed(epoch_seed, "utterance/" + std::to_string(index));
}
}  // namespace

template <typename Real>
double accumulate_batch_gradients(const SlotTagger<Real>& model, const std::vector<Example>& examples,
                                  const std::vector<std::size_t>& batch, bool training, std::uint64_t epoch_seed,
                                  std::size_t threads) {
  const Real inv = static_cast<Real>(1.0 / static_cast<double>(batch.size()));
  std::vector<double> losses(batch.size(), 0.0);
  auto run = [&](std::size_t i, Tape<Real>& tape) {
    const Example& ex = examples[batch[i]];
    Var<Real> loss = model.loss(tape, ex.words, ex.tags, training, example_seed(epoch_seed, batch[i]));
    losses[i] = static_cast<double>(loss.value().item());
    tape.propagate(scale(loss, inv));
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Tape<Real> tape;
      run(i, tape);
      tape.accumulate_parameter_grads();
    }
  } else {
    std::vector<std::unique_ptr<Tape<Real>>> tapes(batch.size());
    parallel_for(batch.size(), threads, [&](std::size_t i) {
      auto tape = std::make_unique<Tape<Real>>();
      run(i, *tape);
      tapes[i] = std::move(tape);
    });
    for (auto& tape : tapes) {
      tape->accumulate_parameter_grads();
      tape.reset();
    }
  }
  double total = 0.0;
  for (double l : losses) total += l;
  return total;
}

template <typename Real>
std::vector<std::vector<SlotSpan>> predict_all(const SlotTagger<Real>& model, const std::vector<Utterance>& utts,
                                               std::size_t threads) {
  std::vector<std::vector<SlotSpan>> out(utts.size());
  parallel_for(utts.size(), threads, [&](std::size_t i) { out[i] = model.predict(utts[i]); });
  return out;
}

template <typename Real>
EvalReport evaluate(const SlotTagger<Real>& model, const std::vector<Utterance>& utts, std::size_t threads) {
  std::vector<std::vector<SlotSpan>> gold;
  gold.reserve(utts.size());
  for (const Utterance& u : utts) gold.push_back(u.spans);
  return span_f1(gold, predict_all(model, utts, threads));
}

nlohmann::ordered_json EpochRecord::to_json() const {
  return {{"epoch", epoch},
          {"train_loss", train_loss},
          {"dev_f1", dev_f1},
          {"wall_seconds", wall_seconds},
          {"improved", improved}};
}

template <typename Real>
TrainResult train(SlotTagger<Real>& model, const std::vector<Utterance>& train_set,
                  const std::vector<Utterance>& dev_set, const TrainOptions& options) {
  if (train_set.empty()) throw DataError("training set is empty");
  const ModelConfig& config = model.config();
  const std::size_t threads = resolve_threads(config);
  const std::vector<Example> examples = make_examples(model, train_set);
  ParameterStore<Real>& store = model.parameters();
  AdamW<Real> optimizer(store, config.optimizer, config.weight_decay);

  auto snapshot = [&]() {
    std::vector<Tensor<Real>> values;
    for (const auto& p : store.items()) values.push_back(p->value);
    return values;
  };
  std::vector<Tensor<Real>> best = snapshot();
  TrainResult result;
  result.best_dev_f1 = -1.0;
  std::size_t since_best = 0;
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::size_t> order(examples.size());
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::uint64_t epoch_seed = derive_seed(config.seed, "epoch/" + std::to_string(epoch));
    Rng(derive_seed(epoch_seed, "shuffle")).shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::vector<std::size_t> batch(order.begin() + b,
                                           order.begin() + std::min(order.size(), b + config.batch_size));
      store.zero_grads();
      const double batch_loss = accumulate_batch_gradients(model, examples, batch, true, epoch_seed, threads);
      if (!std::isfinite(batch_loss) || !first_nonfinite_parameter(store).empty()) {
        const std::string name = first_nonfinite_parameter(store);
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           (name.empty() ? std::string(" (all parameters and gradients finite)")
                                         : "; first non-finite parameter or gradient: " + name));
      }
      loss_sum += batch_loss;
      optimizer.step();
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(examples.size());
    record.dev_f1 = dev_set.empty() ? 0.0 : evaluate(model, dev_set, threads).f1();
    record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record.improved = dev_set.empty() || record.dev_f1 > result.best_dev_f1;
    // Ties keep the later epoch; only strict gains reset the patience count.
    if (record.improved || record.dev_f1 == result.best_dev_f1) {
      result.best_dev_f1 = record.dev_f1;
      result.best_epoch = epoch;
      best = snapshot();
    }
    since_best = record.improved ? 0 : since_best + 1;
    result.epochs.push_back(record);
    if (options.log) *options.log << record.to_json().dump() << std::endl;
    if (options.on_epoch) options.on_epoch(record);
    if (!dev_set.empty() && options.target_dev_f1 && record.dev_f1 >= *options.target_dev_f1) break;
    if (!dev_set.empty() && since_best >= config.patience) {
      result.stopped_early = epoch < config.max_epochs;
      break;
    }
  }
  const auto& params = store.items();
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  if (result.best_dev_f1 < 0.0) result.best_dev_f1 = 0.0;
  return result;
}

template <typename Real>
std::unique_ptr<SlotTagger<Real>> build_model(const ModelConfig& config, const std::vector<Utterance>& train_set) {
  if (train_set.empty()) throw DataError("training set is empty");
  return std::make_unique<SlotTagger<Real>>(config, CharVocab::build(collect_words(train_set)),
                                            build_tagset(train_set));
}

#define SLOTLAB_INSTANTIATE_TRAINER(Real)                                                                         \
  template class AdamW<Real>;                                                                                     \
  template std::string first_nonfinite_parameter(const ParameterStore<Real>&);                                    \
  template std::vector<Example> make_examples(const SlotTagger<Real>&, const std::vector<Utterance>&);            \
  template double accumulate_batch_gradients(const SlotTagger<Real>&, const std::vector<Example>&,                \
                                             const std::vector<std::size_t>&, bool, std::uint64_t, std::size_t);  \
  template std::vector<std::vector<SlotSpan>> predict_all(const SlotTagger<Real>&, const std::vector<Utterance>&, \
                                                          std::size_t);                                           \
  template EvalReport evaluate(const SlotTagger<Real>&, const std::vector<Utterance>&, std::size_t);              \
  template TrainResult train(SlotTagger<Real>&, const std::vector<Utterance>&, const std::vector<Utterance>&,     \
                             const TrainOptions&);                                                                \
  template std::unique_ptr<SlotTagger<Real>> build_model(const ModelConfig&, const std::vector<Utterance>&);

SLOTLAB_INSTANTIATE_TRAINER(float)
SLOTLAB_INSTANTIATE_TRAINER(double)

}  // namespace slotlab
