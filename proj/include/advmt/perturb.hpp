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

#ifndef ADVMT_PERTURB_HPP_
#define ADVMT_PERTURB_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "advmt/adapter.hpp"
#include "advmt/record.hpp"
#include "advmt/types.hpp"

namespace advmt {

enum class PerturbKind {
  kKeyboardTypo,
  kOmitChar,
  kInsertChar,
  kSwapAdjacentChars,
  kShuffleWordChars,
  kSwapWords,
  kFullCharShuffle,
};

std::string perturb_kind_name(PerturbKind kind);
PerturbKind perturb_kind_from_name(const std::string& name);

struct PerturbBudget {
  enum class Mode { kFractionOfWords, kFractionOfChars, kMaxOperations };
  Mode mode = Mode::kFractionOfWords;
  double value = 0.0;
  std::uint64_t seed = 0;
};

// QWERTY adjacency, lowercase letters only; characters missing from the
// table make the op skip (and log it).
using KeyboardLayout = std::map<char, std::vector<char>>;
const KeyboardLayout& qwerty_layout();
KeyboardLayout load_keyboard_layout(const std::string& path);  // JSON file

// Relative sampling weights per op kind. Defaults to uniform over the
// basic kinds with the full per-word shuffle excluded.
using OpMix = std::map<PerturbKind, double>;
OpMix default_op_mix();

// Input half of an attack record: the perturbed sentence plus a replayable
// op log (word boundaries are whitespace; punctuation stays attached).
struct InputPerturbation {
  std::string x_att;
  std::vector<EditLogEntry> ops;
};

InputPerturbation synthetic_attack(const std::string& src,
                                   const PerturbBudget& budget,
                                   const OpMix& mix = default_op_mix(),
                                   const KeyboardLayout& layout = qwerty_layout());

// Uniform random adjacent-character swaps inside words.
InputPerturbation char_swap_attack(const std::string& src,
                                   const PerturbBudget& budget);

// The paper's most aggressive synthetic preset: every word gets its
// letters shuffled (non-letters keep their slots).
InputPerturbation full_shuffle_attack(const std::string& src,
                                      std::uint64_t seed);

// Re-applies a recorded op log to the original sentence; the result must
// equal the original x_att byte for byte.
std::string replay_ops(const std::string& src,
                       const std::vector<EditLogEntry>& ops);

// Single keyboard-typo primitive. Returns the perturbed word; out_entry
// reports the op (skipped=true when the char has no neighbors).
std::string keyboard_typo(const std::string& word, std::size_t index,
                          const KeyboardLayout& layout, std::uint64_t seed,
                          EditLogEntry* out_entry = nullptr);

// Greedy prefix-insertion baseline: picks up to k pool tokens for the
// front of the sentence that minimize chrF(Y, Y_att), re-translating per
// candidate.
AttackRecord prefix_attack(const std::string& src, const ModelAdapter& model,
                           const std::vector<std::string>& prefix_pool,
                           int k);

// Back-translation-divergence hill climb: single-word synthetic
// perturbations scored by 1 - chrF(X_att, back_translate(translate(X_att))).
struct SwlsConfig {
  PerturbBudget budget;
  int candidates_per_step = 16;
};
AttackRecord swls_attack(const std::string& src, const ModelAdapter& model,
                         const ModelAdapter& reverse_model,
                         const SwlsConfig& config);

// Number of ops a budget allows for the given sentence.
std::size_t resolve_budget(const PerturbBudget& budget, const std::string& src);

}  // namespace advmt

#endif  // ADVMT_PERTURB_HPP_
