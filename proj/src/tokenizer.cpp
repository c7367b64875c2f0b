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

#include "advmt/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace advmt {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

SubwordTokenizer::SubwordTokenizer(std::vector<std::string> vocab_tokens)
    : tokens_(std::move(vocab_tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw Error("tokenizer: empty vocab entry");
    auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted)
      throw Error("tokenizer: duplicate vocab entry '" + tokens_[i] + "'");
    max_token_len_ = std::max(max_token_len_, tokens_[i].size());
  }
}

bool SubwordTokenizer::is_word_initial(TokenId id) const {
  return tokens_.at(id).rfind(kContinuationPrefix, 0) != 0;
}

std::string SubwordTokenizer::surface(TokenId id) const {
  const std::string& t = tokens_.at(id);
  if (t.rfind(kContinuationPrefix, 0) == 0) return t.substr(2);
  return t;
}

TokenizedText SubwordTokenizer::tokenize(const std::string& text) const {
  TokenizedText out;
  out.text = text;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t word_end = i;
    while (word_end < text.size() && !is_space(text[word_end])) ++word_end;

    bool at_word_start = true;
    std::size_t pos = i;
    while (pos < word_end) {
      std::size_t longest = 0;
      TokenId match = -1;
      std::size_t budget = std::min(max_token_len_, word_end - pos);
      for (std::size_t len = budget; len >= 1; --len) {
        std::string piece = text.substr(pos, len);
        if (!at_word_start) piece = std::string(kContinuationPrefix) + piece;
        auto it = index_.find(piece);
        if (it != index_.end()) {
          longest = len;
          match = it->second;
          break;
        }
      }
      if (match < 0)
        throw Error("tokenizer: no vocab entry covers '" +
                    text.substr(pos, 1) + "' at byte " + std::to_string(pos));
      out.token_ids.push_back(match);
      out.spans.emplace_back(pos, pos + longest);
      out.is_word_initial.push_back(at_word_start);
      pos += longest;
      at_word_start = false;
    }
    i = word_end;
  }
  return out;
}

std::string SubwordTokenizer::detokenize(const std::vector<TokenId>& ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    TokenId id = ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
      throw Error("detokenize: token id " + std::to_string(id) +
                  " out of range");
    bool initial = is_word_initial(id);
    if (initial && i > 0) out += ' ';
    out += surface(id);
  }
  return out;
}

TokenizedText SubwordTokenizer::from_ids(const std::vector<TokenId>& ids) const {
  TokenizedText out;
  out.text = detokenize(ids);
  out.token_ids = ids;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    bool initial = is_word_initial(ids[i]);
    if (initial && i > 0) ++cursor;  // the joining space
    std::size_t len = surface(ids[i]).size();
    out.spans.emplace_back(cursor, cursor + len);
    out.is_word_initial.push_back(initial);
    cursor += len;
  }
  return out;
}

std::vector<std::string> ascii_subword_vocab(
    const std::vector<std::string>& extra_words) {
  std::vector<std::string> vocab;
  for (char c = '!'; c <= '~'; ++c) {
    vocab.emplace_back(1, c);
    vocab.emplace_back(std::string(SubwordTokenizer::kContinuationPrefix) + c);
  }
  for (const auto& w : extra_words) {
    if (w.size() > 1) vocab.push_back(w);
  }
  return vocab;
}

const std::unordered_set<std::string>& default_stopwords() {
  // Mirrors data/stopwords_en.txt; replaceable via config.
  static const std::unordered_set<std::string> kStopwords = {
      "a",       "about",  "above",  "after",   "again",   "against", "all",
      "am",      "an",     "and",    "any",     "are",     "aren't",  "as",
      "at",      "be",     "because","been",    "before",  "being",   "below",
      "between", "both",   "but",    "by",      "can",     "cannot",  "could",
      "did",     "do",     "does",   "doesn't", "doing",   "don't",   "down",
      "during",  "each",   "few",    "for",     "from",    "further", "had",
      "has",     "have",   "having", "he",      "her",     "here",    "hers",
      "herself", "him",    "himself","his",     "how",     "i",       "if",
      "in",      "into",   "is",     "isn't",   "it",      "its",     "itself",
      "just",    "me",     "more",   "most",    "my",      "myself",  "no",
      "nor",     "not",    "now",    "of",      "off",     "on",      "once",
      "only",    "or",     "other",  "our",     "ours",    "ourselves","out",
      "over",    "own",    "same",   "she",     "should",  "so",      "some",
      "such",    "than",   "that",   "the",     "their",   "theirs",  "them",
      "themselves","then", "there",  "these",   "they",    "this",    "those",
      "through", "to",     "too",    "under",   "until",   "up",      "very",
      "was",     "wasn't", "we",     "were",    "weren't", "what",    "when",
      "where",   "which",  "while",  "who",     "whom",    "why",     "will",
      "with",    "won't",  "would",  "you",     "your",    "yours",   "yourself",
      "yourselves","shall","may",    "might",   "must",    "ought",   "also",
      "been",    "upon",   "onto",   "via",     "per",     "amid",    "among",
      "besides", "despite","except", "inside",  "outside", "toward",  "within",
      "without", "yet",    "nor",    "either",  "neither", "both",
  };
  return kStopwords;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("stopword list not readable: " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string w;
    while (ls >> w) {
      std::transform(w.begin(), w.end(), w.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      words.insert(w);
    }
  }
  return words;
}

bool is_punctuation_token(const std::string& surface) {
  if (surface.empty()) return false;
  for (unsigned char c : surface)
    if (std::isalnum(c)) return false;
  return true;
}

void apply_vocab_masks(VocabTable& vocab,
                       const std::unordered_set<std::string>& stopwords) {
  vocab.word_initial_mask.assign(vocab.size, true);
  vocab.protected_mask.assign(vocab.size, false);
  for (std::size_t i = 0; i < vocab.size; ++i) {
    const std::string& t = vocab.tokens[i];
    bool continuation = t.rfind(SubwordTokenizer::kContinuationPrefix, 0) == 0;
    vocab.word_initial_mask[i] = !continuation;
    std::string s = continuation ? t.substr(2) : t;
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    vocab.protected_mask[i] =
        is_punctuation_token(s) || stopwords.count(lower) > 0;
  }
}

}  // namespace advmt
