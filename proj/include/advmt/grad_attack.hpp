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

#ifndef ADVMT_GRAD_ATTACK_HPP_
#define ADVMT_GRAD_ATTACK_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "advmt/adapter.hpp"
#include "advmt/record.hpp"
#include "advmt/types.hpp"

namespace advmt {

// The wording "cosine distance must not be smaller than the threshold"
// reads as a lower bound, but preserving meaning wants an upper bound;
// both directions are supported and max_distance (keep replacements
// close) is the default. Distance is 1 - cosine similarity.
enum class CosineRule { kMaxDistance, kMinDistance };

enum class LossMode { kVsModelTranslation, kVsReference };
enum class AttackLevel { kToken, kCharacter };

struct AttackConstraints {
  double cosine_threshold = 0.4;
  bool one_flip_per_position = true;
  bool respect_word_initial_partition = true;
  CosineRule cosine_rule = CosineRule::kMaxDistance;
  // Derived per sentence: punctuation/stop-word tokens, first and last
  // token, plus already-flipped positions.
  std::set<std::size_t> protected_positions;
};

struct GradAttackConfig {
  int max_flips = 3;
  LossMode loss_mode = LossMode::kVsModelTranslation;
  AttackLevel level = AttackLevel::kToken;
  AttackConstraints constraints;
};

struct FlipCandidate {
  std::size_t position = 0;
  TokenId new_token = -1;
  // First-order Taylor change of the objective: (e_new - e_old)^T grad.
  double score = 0.0;
};

// Positions no attack may touch: first, last, and tokens whose vocab
// entry is protected (punctuation, stop words).
std::set<std::size_t> derive_protected_positions(const TokenizedText& text,
                                                 const VocabTable& vocab);

// Exhaustive scan over (position, vocab token) pairs under the
// constraints; returns the pair with the lowest Taylor score, or nothing
// when no pair strictly beats keeping the current token. Ties break to
// the lowest position, then the lowest vocab id.
std::optional<FlipCandidate> select_flip(const Mat& grad,
                                         const std::vector<TokenId>& current_ids,
                                         const VocabTable& vocab,
                                         const AttackConstraints& constraints);

// Iterative token replacement driven by the gradient of the adversarial
// loss (the negated anchored-translation NLL); the gradient is recomputed
// after every accepted flip. `reference` feeds LossMode::kVsReference.
AttackRecord gradient_attack(const TokenizedText& src,
                             const ModelAdapter& model,
                             const GradAttackConfig& config,
                             const TokenizedText* reference = nullptr);

// Character view of the adapter vocabulary: one embedding row per
// character, averaged over the subword rows whose surface contains it.
struct CharVocab {
  std::vector<char> chars;
  Mat embeddings;  // chars x dim
  std::map<char, std::size_t> index;
};

CharVocab build_char_vocab(const VocabTable& vocab);

// Gradient attack at the character level: flips single characters scored
// through the containing token's gradient, re-tokenizing after each flip.
AttackRecord char_grad_attack(const TokenizedText& src,
                              const ModelAdapter& model,
                              const GradAttackConfig& config,
                              const TokenizedText* reference = nullptr);

// True when (old -> new) respects the configured cosine rule.
bool cosine_rule_allows(const double* e_old, const double* e_new,
                        std::size_t dim, double threshold, CosineRule rule);

}  // namespace advmt

#endif  // ADVMT_GRAD_ATTACK_HPP_
