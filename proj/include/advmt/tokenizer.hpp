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

#ifndef ADVMT_TOKENIZER_HPP_
#define ADVMT_TOKENIZER_HPP_

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "advmt/types.hpp"

namespace advmt {

// Whitespace + greedy-longest-match subword tokenizer. Continuation
// tokens carry a "##" prefix in the vocabulary; word-initial tokens are
// stored bare. detokenize(tokenize(s)) == s for single-space-separated
// ASCII text whose characters are covered by the vocabulary.
class SubwordTokenizer {
 public:
  static constexpr const char* kContinuationPrefix = "##";

  explicit SubwordTokenizer(std::vector<std::string> vocab_tokens);

  TokenizedText tokenize(const std::string& text) const;
  std::string detokenize(const std::vector<TokenId>& ids) const;

  // Rebuilds text + spans + flags from a token-id sequence.
  TokenizedText from_ids(const std::vector<TokenId>& ids) const;

  std::size_t vocab_size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  bool is_word_initial(TokenId id) const;
  // Surface form with the continuation marker stripped.
  std::string surface(TokenId id) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t max_token_len_ = 0;
};

// All printable ASCII characters as word-initial and continuation tokens,
// optionally followed by extra whole-word entries. Covers any ASCII corpus.
std::vector<std::string> ascii_subword_vocab(
    const std::vector<std::string>& extra_words = {});

// Bundled English stop-word list (~150 entries, lowercase).
const std::unordered_set<std::string>& default_stopwords();

// Loads a replacement stop-word list: one word per line, '#' comments.
std::unordered_set<std::string> load_stopwords(const std::string& path);

bool is_punctuation_token(const std::string& surface);

// Fills word_initial_mask / protected_mask from token surfaces:
// punctuation-only tokens and stop words are protected.
void apply_vocab_masks(VocabTable& vocab,
                       const std::unordered_set<std::string>& stopwords);

}  // namespace advmt

#endif  // ADVMT_TOKENIZER_HPP_
