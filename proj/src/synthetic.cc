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

#include "slotlab/synthetic.h"

#include <algorithm>

#include "slotlab/rng.h"
#include "slotlab/utf8.h"

namespace slotlab {

Utterance fill_template(const std::string& pattern, const std::vector<std::pair<std::string, std::string>>& values) {
  std::string text;
  std::vector<CharSpan> spans;
  std::size_t code_points = 0;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const auto open = pattern.find('{', pos);
    const std::string literal = pattern.substr(pos, open == std::string::npos ? std::string::npos : open - pos);
    text += literal;
    code_points += decode_utf8(literal).size();
    if (open == std::string::npos) break;
    const auto close = pattern.find('}', open);
    if (close == std::string::npos) throw ConfigError("unterminated placeholder in '" + pattern + "'");
    const std::string slot = pattern.substr(open + 1, close - open - 1);
    auto it = std::find_if(values.begin(), values.end(), [&](const auto& kv) { return kv.first == slot; });
    if (it == values.end()) throw ConfigError("no value for placeholder {" + slot + "}");
    const std::size_t length = decode_utf8(it->second).size();
    spans.push_back({code_points, code_points + length, slot});
    text += it->second;
    code_points += length;
    pos = close + 1;
  }
  return make_utterance(text, spans);
}

const std::vector<std::string>& city_templates() {
  static const std::vector<std::string> templates = {
      "i want to fly from {from_city} to {to_city}",
      "show me flights from {from_city} to {to_city}",
      "flights from {from_city} to {to_city} tomorrow morning",
      "i need a flight to {to_city} from {from_city}",
      "what flights go from {from_city} to {to_city} on friday",
      "book a ticket from {from_city} to {to_city} please",
      "are there any nonstop flights between {from_city} and {to_city}",
      "list the cheapest fares from {from_city} to {to_city}",
      "i would like to travel to {to_city} leaving from {from_city}",
      "how much is a one way ticket from {from_city} to {to_city}",
      "show me the earliest flight leaving {from_city} arriving in {to_city}",
      "departing {from_city} going to {to_city} next week",
      "i am flying out of {from_city} into {to_city}",
      "give me flights to {to_city} departing from {from_city} after 5 pm",
      "which airlines fly from {from_city} to {to_city}",
      "find me a round trip from {from_city} to {to_city}",
      "i need to get from {from_city} to {to_city} by tonight",
      "what is the first flight out of {from_city} to {to_city}",
      "flights to {to_city} please",
      "show flights leaving {from_city}",
      "i want to go to {to_city}",
      "what time does the flight from {from_city} land",
      "is there a red eye from {from_city} to {to_city}",
      "get me to {to_city} from {from_city} on the cheapest airline",
      "from {from_city} to {to_city} on monday",
      "my trip starts in {from_city} and ends in {to_city}",
      "i am leaving {from_city} for {to_city} on sunday",
      "morning flights from {from_city} heading to {to_city}",
      "can i fly {from_city} to {to_city} nonstop",
      "cheapest way to fly into {to_city} out of {from_city}",
  };
  return templates;
}

const std::vector<std::string>& city_names() {
  static const std::vector<std::string> cities = {
      // training
      "boston", "denver", "dallas", "atlanta", "chicago", "seattle", "houston", "phoenix", "detroit", "miami",
      "orlando", "tampa", "memphis", "nashville", "austin", "portland", "oakland", "baltimore", "pittsburgh",
      "cleveland", "cincinnati", "columbus", "indianapolis", "milwaukee", "minneapolis", "st. louis", "kansas city",
      "omaha", "tulsa", "albuquerque", "tucson", "el paso", "san antonio", "san diego", "san francisco", "san jose",
      "los angeles", "las vegas", "salt lake city", "sacramento", "fresno", "reno", "boise", "spokane", "anchorage",
      "honolulu", "new york", "newark", "philadelphia", "washington", "richmond", "charlotte", "raleigh", "columbia",
      "jacksonville", "savannah", "charleston", "birmingham", "new orleans", "baton rouge", "little rock", "jackson",
      "louisville", "lexington", "knoxville", "buffalo", "rochester", "syracuse", "albany", "hartford", "providence",
      "burlington", "portsmouth", "toronto", "montreal", "vancouver", "calgary", "ottawa", "london", "paris",
      "berlin", "madrid", "rome", "lisbon", "dublin", "amsterdam", "brussels", "vienna", "prague", "warsaw",
      "moscow", "stockholm", "oslo", "helsinki", "copenhagen", "athens", "istanbul", "cairo", "tokyo", "osaka",
      "seoul", "beijing", "shanghai", "hong kong", "singapore", "bangkok", "delhi", "mumbai", "sydney", "melbourne",
      "auckland", "mexico city", "bogota", "lima", "santiago", "buenos aires", "sao paulo", "rio de janeiro",
      "havana", "dakar",
      // held out
      "zagreb", "ljubljana", "bratislava", "tallinn", "riga", "vilnius", "minsk", "kyiv", "tbilisi", "yerevan",
      "baku", "almaty", "tashkent", "ulaanbaatar", "kathmandu", "dhaka", "colombo", "hanoi", "manila", "jakarta",
      "kuala lumpur", "perth", "brisbane", "wellington", "suva", "nairobi", "addis ababa", "lagos", "accra",
      "casablanca", "tunis", "quito", "la paz", "montevideo", "asuncion", "caracas", "panama city", "san juan",
      "reykjavik", "valletta",
  };
  return cities;
}

std::vector<std::string> training_cities() {
  const auto& all = city_names();
  return {all.begin(), all.begin() + 120};
}

std::vector<std::string> heldout_cities() {
  const auto& all = city_names();
  return {all.begin() + 120, all.end()};
}

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.uniform_index(items.size())];
}

std::vector<Utterance> city_split(Rng& rng, std::size_t n, const std::vector<std::string>& cities) {
  std::vector<Utterance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& pattern = pick(rng, city_templates());
    const std::string& from = pick(rng, cities);
    std::string to = pick(rng, cities);
    while (to == from) to = pick(rng, cities);
    out.push_back(fill_template(pattern, {{"from_city", from}, {"to_city", to}}));
  }
  return out;
}

}  // namespace

SyntheticCorpus make_city_corpus(const CityCorpusOptions& options) {
  Rng rng(derive_seed(options.seed, "city-corpus"));
  SyntheticCorpus corpus;
  const auto train_cities = training_cities();
  corpus.train = city_split(rng, options.train_size, train_cities);
  corpus.dev = city_split(rng, options.dev_size, train_cities);
  corpus.test = city_split(rng, options.test_size, heldout_cities());
  return corpus;
}

namespace {

const std::vector<std::string>& restaurant_templates() {
  static const std::vector<std::string> templates = {
      "a table for {people} at {time}",
      "book a table for {people} at {time} {date}",
      "can i reserve for {people} {date} at {time}",
      "we are {people} and would like to come at {time}",
      "table at {time} for {people} please",
      "my name is {first_name} {last_name}",
      "the booking is under {last_name}",
      "{people} of us {date} around {time}",
      "is there space at {time} for {people}",
      "reserve {date} at {time} for {first_name}",
      "i want to book for {people} {date}",
      "change my booking to {time}",
      "make it {people} instead",
      "at {time} please",
      "for {people} please",
      "it is for {first_name} {last_name} , party of {people}",
      "could we get a table {date} for {people}",
      "do you have anything around {time} {date}",
      "put it under {first_name} please",
      "{first_name} {last_name} , {people} guests , {time}",
      "we would like to arrive by {time}",
      "there will be {people} of us",
      "any availability {date} ?",
      "please book {people} seats for {time}",
  };
  return templates;
}

const std::vector<std::string> kPeople = {"2", "3", "4", "5", "6", "7", "8", "9", "10", "12",
                                          "two", "three", "four", "five", "six", "eight"};
const std::vector<std::string> kTimes = {"7", "8", "6", "9", "5", "7 pm", "8 pm", "6:30", "7:45", "noon",
                                         "half past 7", "8 o'clock", "midday", "1 pm", "12", "seven", "eight"};
const std::vector<std::string> kDates = {"tomorrow", "tonight", "on friday", "next saturday", "on sunday",
                                         "march 3rd", "the 14th", "this weekend", "monday", "on the 2nd"};
const std::vector<std::string> kFirstNames = {"anna", "marco", "li", "sofia", "james", "amira", "ivan", "julia",
                                              "kenji", "maria", "oliver", "priya", "tomas", "elena", "david"};
const std::vector<std::string> kLastNames = {"smith", "rossi", "chen", "garcia", "novak", "okafor", "schmidt",
                                             "kowalski", "silva", "tanaka", "murphy", "haddad", "jensen"};

std::vector<Utterance> restaurant_split(Rng& rng, std::size_t n) {
  std::vector<Utterance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(fill_template(pick(rng, restaurant_templates()), {{"people", pick(rng, kPeople)},
                                                                     {"time", pick(rng, kTimes)},
                                                                     {"date", pick(rng, kDates)},
                                                                     {"first_name", pick(rng, kFirstNames)},
                                                                     {"last_name", pick(rng, kLastNames)}}));
  }
  return out;
}

}  // namespace

SyntheticCorpus make_restaurant_corpus(const RestaurantCorpusOptions& options) {
  Rng rng(derive_seed(options.seed, "restaurant-corpus"));
  SyntheticCorpus corpus;
  corpus.train = restaurant_split(rng, options.train_size);
  corpus.dev = restaurant_split(rng, options.dev_size);
  corpus.test = restaurant_split(rng, options.test_size);
  return corpus;
}

}  // namespace slotlab
