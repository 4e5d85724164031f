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

#ifndef SLOTLAB_SYNTHETIC_H_
#define SLOTLAB_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "slotlab/data.h"

namespace slotlab {

struct SyntheticCorpus {
  std::vector<Utterance> train;
  std::vector<Utterance> dev;
  std::vector<Utterance> test;
};

// Fills "{slot}" placeholders and records the filled ranges as spans.
Utterance fill_template(const std::string& pattern, const std::vector<std::pair<std::string, std::string>>& values);

// 30 flight templates with {from_city} / {to_city} placeholders.
const std::vector<std::string>& city_templates();
// 160 city names; the first 120 are training cities, the last 40 are held out.
const std::vector<std::string>& city_names();
std::vector<std::string> training_cities();
std::vector<std::string> heldout_cities();

struct CityCorpusOptions {
  std::size_t train_size = 600;
  std::size_t dev_size = 150;
  std::size_t test_size = 300;
  std::uint64_t seed = 0;
};

// Train and dev use training cities only; test uses held-out cities only.
SyntheticCorpus make_city_corpus(const CityCorpusOptions& options = {});

struct RestaurantCorpusOptions {
  std::size_t train_size = 400;
  std::size_t dev_size = 100;
  std::size_t test_size = 200;
  std::uint64_t seed = 0;
};

// Booking requests with people, time, date, first_name and last_name slots.
// Bare numbers are people or time depending on the surrounding words.
SyntheticCorpus make_restaurant_corpus(const RestaurantCorpusOptions& options = {});

}  // namespace slotlab

#endif  // SLOTLAB_SYNTHETIC_H_
