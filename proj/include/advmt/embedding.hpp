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

#ifndef ADVMT_EMBEDDING_HPP_
#define ADVMT_EMBEDDING_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "advmt/types.hpp"

namespace advmt {

// Pluggable sentence/token embedding source for the embedding-based
// metrics. Implementations must be deterministic with a fixed width.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual std::size_t width() const = 0;
  virtual std::vector<double> sentence_embed(const std::string& text) const = 0;
  // One row per whitespace token of the normalized text.
  virtual Mat token_embed(const std::string& text) const = 0;
};

// Offline default: signed character-n-gram hashing, L2-normalized.
// No pretrained checkpoints involved; deterministic across platforms.
class HashingEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HashingEmbeddingProvider(std::size_t width = 256, int min_n = 3,
                                    int max_n = 5);
  std::string name() const override;
  std::size_t width() const override { return width_; }
  std::vector<double> sentence_embed(const std::string& text) const override;
  Mat token_embed(const std::string& text) const override;

 private:
  void accumulate(const std::string& piece, std::vector<double>& acc) const;
  std::size_t width_;
  int min_n_;
  int max_n_;
};

// Test fixture: explicit vectors per sentence / per token, orthogonal
// fallback for unknown tokens.
class FixtureEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit FixtureEmbeddingProvider(std::size_t width) : width_(width) {}
  std::string name() const override { return "fixture"; }
  std::size_t width() const override { return width_; }

  void set_sentence(const std::string& text, std::vector<double> v);
  void set_token(const std::string& token, std::vector<double> v);

  std::vector<double> sentence_embed(const std::string& text) const override;
  Mat token_embed(const std::string& text) const override;

 private:
  std::size_t width_;
  std::map<std::string, std::vector<double>> sentences_;
  std::map<std::string, std::vector<double>> tokens_;
};

std::unique_ptr<EmbeddingProvider> make_embedding_provider(
    const std::string& spec);

}  // namespace advmt

#endif  // ADVMT_EMBEDDING_HPP_
