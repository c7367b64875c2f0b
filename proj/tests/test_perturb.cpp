// Copyright 2026 The advmt Authors
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

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "advmt/metrics.hpp"
#include "advmt/perturb.hpp"
#include "advmt/toy_model.hpp"

using namespace advmt;

namespace {

PerturbBudget words_budget(double fraction, std::uint64_t seed) {
  PerturbBudget b;
  b.mode = PerturbBudget::Mode::kFractionOfWords;
  b.value = fraction;
  b.seed = seed;
  return b;
}

PerturbBudget ops_budget(double n, std::uint64_t seed) {
  PerturbBudget b;
  b.mode = PerturbBudget::Mode::kMaxOperations;
  b.value = n;
  b.seed = seed;
  return b;
}

std::multiset<char> multiset_of(const std::string& s) {
  return {s.begin(), s.end()};
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

TEST_CASE("zero budget is the byte-exact identity") {
  const std::string src = "Cars get  many more miles to the gallon.";
  CHECK(synthetic_attack(src, words_budget(0.0, 1)).x_att == src);
  CHECK(char_swap_attack(src, ops_budget(0, 1)).x_att == src);
}

TEST_CASE("synthetic attack rejects empty input and bad mixes") {
  CHECK_THROWS_AS(synthetic_attack("", words_budget(0.5, 1)), Error);
  CHECK_THROWS_AS(synthetic_attack("   ", words_budget(0.5, 1)), Error);
  OpMix zero = {{PerturbKind::kKeyboardTypo, 0.0}};
  CHECK_THROWS_AS(synthetic_attack("a b", words_budget(0.5, 1), zero), Error);
  PerturbBudget bad = words_budget(1.5, 1);
  CHECK_THROWS_AS(synthetic_attack("a b", bad), Error);
}

TEST_CASE("swap_adjacent_chars at a forced site turns cat into act") {
  // mix with only swaps; word "cat" has one eligible op outcome per site
  OpMix mix = {{PerturbKind::kSwapAdjacentChars, 1.0}};
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto pert = synthetic_attack("cat", ops_budget(1, seed), mix);
    REQUIRE(pert.ops.size() >= 1);
    bool applied = false;
    for (const auto& op : pert.ops) applied = applied || !op.skipped;
    if (!applied) continue;
    CHECK((pert.x_att == "act" || pert.x_att == "cta"));
    CHECK(multiset_of(pert.x_att) == multiset_of("cat"));
  }
}

TEST_CASE("keyboard typo draws from the bundled adjacency row") {
  // 'a' in "cat" can only become one of q w s z x (case preserved)
  std::set<char> allowed = {'q', 'w', 's', 'z', 'x'};
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    EditLogEntry entry;
    std::string out = keyboard_typo("cat", 1, qwerty_layout(), seed, &entry);
    REQUIRE_FALSE(entry.skipped);
    CHECK(out.size() == 3);
    CHECK(out[0] == 'c');
    CHECK(out[2] == 't');
    CHECK(allowed.count(out[1]) == 1);
  }
  CHECK_THROWS_AS(keyboard_typo("cat", 9, qwerty_layout(), 1), Error);

  // digits have no neighbors in the bundled table: skip, logged
  EditLogEntry skip;
  std::string unchanged = keyboard_typo("a1b", 1, qwerty_layout(), 1, &skip);
  CHECK(unchanged == "a1b");
  CHECK(skip.skipped);
  CHECK(skip.params.at("reason") == "no keyboard neighbors");
}

TEST_CASE("keyboard typo preserves case") {
  std::set<char> allowed = {'Q', 'W', 'S', 'Z', 'X'};
  std::string out = keyboard_typo("At", 0, qwerty_layout(), 3);
  CHECK(allowed.count(out[0]) == 1);
}

TEST_CASE("the bundled layout file parses and matches the embedded table") {
  KeyboardLayout from_file = load_keyboard_layout(
      std::string(ADVMT_SOURCE_DIR) + "/data/qwerty_neighbors.json");
  const KeyboardLayout& embedded = qwerty_layout();
  REQUIRE(from_file.size() == embedded.size());
  for (const auto& [key, neighbors] : embedded) {
    REQUIRE(from_file.count(key) == 1);
    CHECK(std::multiset<char>(neighbors.begin(), neighbors.end()) ==
          std::multiset<char>(from_file.at(key).begin(),
                              from_file.at(key).end()));
  }
}

TEST_CASE("full per-word shuffle keeps letters per word, pins punctuation") {
  const std::string src = "Cars get many more miles to the gallon.";
  auto pert = full_shuffle_attack(src, 99);
  auto in_words = split_words(src);
  auto out_words = split_words(pert.x_att);
  REQUIRE(in_words.size() == out_words.size());
  bool changed_any = false;
  for (std::size_t i = 0; i < in_words.size(); ++i) {
    CHECK(multiset_of(out_words[i]) == multiset_of(in_words[i]));
    // non-letters pinned to their slots, as in "gallon." -> "gllnoa."
    for (std::size_t c = 0; c < in_words[i].size(); ++c)
      if (!std::isalpha(static_cast<unsigned char>(in_words[i][c])))
        CHECK(out_words[i][c] == in_words[i][c]);
    changed_any = changed_any || out_words[i] != in_words[i];
  }
  CHECK(changed_any);
}

TEST_CASE("op log replay reproduces the perturbed sentence exactly") {
  const std::string src = "The push comes as the country's Trust Fund, is broke.";
  std::mt19937_64 seeds(7);
  OpMix mix = default_op_mix();
  mix[PerturbKind::kFullCharShuffle] = 1.0;
  for (int iter = 0; iter < 100; ++iter) {
    std::uint64_t seed = seeds();
    auto pert = synthetic_attack(src, words_budget(0.5, seed), mix);
    CHECK(replay_ops(src, pert.ops) == pert.x_att);
  }
  // char swaps and the full shuffle too
  auto swaps = char_swap_attack(src, ops_budget(5, 21));
  CHECK(replay_ops(src, swaps.ops) == swaps.x_att);
  auto shuffled = full_shuffle_attack(src, 22);
  CHECK(replay_ops(src, shuffled.ops) == shuffled.x_att);
}

TEST_CASE("applied ops preserve or change length by the documented amount") {
  const std::string src = "keyboard mistakes happen every single day";
  std::mt19937_64 seeds(13);
  for (int iter = 0; iter < 60; ++iter) {
    std::uint64_t seed = seeds();
    OpMix omit = {{PerturbKind::kOmitChar, 1.0}};
    auto p1 = synthetic_attack(src, ops_budget(1, seed), omit);
    int applied1 = 0;
    for (const auto& op : p1.ops) applied1 += op.skipped ? 0 : 1;
    CHECK(p1.x_att.size() == src.size() - applied1);

    OpMix insert = {{PerturbKind::kInsertChar, 1.0}};
    auto p2 = synthetic_attack(src, ops_budget(1, seed), insert);
    int applied2 = 0;
    for (const auto& op : p2.ops) applied2 += op.skipped ? 0 : 1;
    CHECK(p2.x_att.size() == src.size() + applied2);
  }
}

TEST_CASE("char swaps preserve the character multiset per word") {
  const std::string src = "cars accelerate through narrow streets";
  auto in_words = split_words(src);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto pert = char_swap_attack(src, ops_budget(4, seed));
    auto out_words = split_words(pert.x_att);
    REQUIRE(out_words.size() == in_words.size());
    for (std::size_t i = 0; i < in_words.size(); ++i)
      CHECK(multiset_of(out_words[i]) == multiset_of(in_words[i]));
    // each applied op swaps two adjacent, distinct characters
    for (const auto& op : pert.ops) {
      if (op.skipped) continue;
      CHECK(op.old_value.size() == op.new_value.size());
      std::size_t ci = std::stoul(op.params.at("char_index"));
      CHECK(op.old_value[ci] == op.new_value[ci + 1]);
      CHECK(op.old_value[ci + 1] == op.new_value[ci]);
      CHECK(op.old_value[ci] != op.old_value[ci + 1]);
    }
  }
}

TEST_CASE("fraction budget touches distinct words") {
  const std::string src = "one two three four five six seven eight nine ten";
  auto pert = synthetic_attack(src, words_budget(0.5, 77));
  std::set<std::int64_t> words_hit;
  int applied = 0;
  for (const auto& op : pert.ops) {
    if (op.skipped) continue;
    ++applied;
    CHECK(words_hit.insert(op.position).second);
    if (op.params.count("other_word"))
      words_hit.insert(std::stol(op.params.at("other_word")));
  }
  CHECK(applied == 5);
}

TEST_CASE("budget monotonicity: mean chrF falls as the budget grows") {
  std::mt19937_64 rng(31337);
  std::vector<std::string> corpus;
  std::vector<std::string> lexicon = {
      "cars",  "gallon", "fund",  "miles",  "country", "taxes",
      "push",  "broke",  "pump",  "trust",  "highway", "many"};
  for (int s = 0; s < 200; ++s) {
    std::string sent;
    int n = 5 + static_cast<int>(rng() % 6);
    for (int w = 0; w < n; ++w) {
      if (w) sent += ' ';
      sent += lexicon[rng() % lexicon.size()];
    }
    corpus.push_back(sent + ".");
  }
  double prev_mean = 1.0 + 1e-12;
  for (double budget : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    double mean = 0.0;
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      auto pert = synthetic_attack(
          corpus[s], words_budget(budget, 1000 + s));  // fixed seed family
      mean += metrics::chrf(pert.x_att, corpus[s]);
    }
    mean /= corpus.size();
    CHECK(mean <= prev_mean);
    prev_mean = mean;
  }
}

TEST_CASE("prefix attack: identity budget, contract, exhaustive choice") {
  auto adapter = make_default_toy_adapter();
  std::vector<std::string> pool = {"tax", "gas", "fund", "pump"};
  const std::string src = "cars get many miles";

  AttackRecord zero = prefix_attack(src, *adapter, pool, 0);
  CHECK(zero.x_att == src);
  CHECK(zero.y_att == zero.y);

  AttackRecord one = prefix_attack(src, *adapter, pool, 1);
  if (!one.edit_log.empty()) {
    // starts with the chosen prefix token
    CHECK(one.x_att.rfind(one.edit_log[0].new_value + " ", 0) == 0);
    // greedy step equals exhaustive search over the pool
    std::string y = adapter->translate(adapter->tokenize(src)).text;
    double best = 1.0;
    std::string best_tok;
    for (const auto& p : pool) {
      std::string cand = p + " " + src;
      double sim = metrics::chrf(
          adapter->translate(adapter->tokenize(cand)).text, y);
      if (sim < best) {
        best = sim;
        best_tok = p;
      }
    }
    CHECK(one.edit_log[0].new_value == best_tok);
  }
  CHECK_THROWS_AS(prefix_attack(src, *adapter, {}, 1), Error);
}

TEST_CASE("swls on the exact-round-trip cipher keeps the input unchanged") {
  auto fwd = make_default_toy_adapter();
  auto rev = fwd->reverse();
  SwlsConfig cfg;
  cfg.budget = ops_budget(3, 17);
  AttackRecord rec = swls_attack("cars get many miles", *fwd, *rev, cfg);
  // round-trip divergence is 0 for every candidate: hill climb stays put
  CHECK(rec.x_att == rec.x);
  CHECK(rec.stop_reason == "no_improving_candidate");
  REQUIRE_FALSE(rec.trajectory.empty());
  CHECK(rec.trajectory.front() == doctest::Approx(0.0));
  // hill-climb contract: final score never below the initial score
  CHECK(rec.trajectory.back() >= rec.trajectory.front());
}

TEST_CASE("resolve_budget arithmetic") {
  const std::string src = "aa bb cc dd";  // 4 words, 8 chars
  CHECK(resolve_budget(words_budget(0.5, 0), src) == 2);
  CHECK(resolve_budget(words_budget(0.0, 0), src) == 0);
  PerturbBudget chars;
  chars.mode = PerturbBudget::Mode::kFractionOfChars;
  chars.value = 0.25;
  CHECK(resolve_budget(chars, src) == 2);
  CHECK(resolve_budget(ops_budget(7, 0), src) == 7);
}
