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

#ifndef ADVMT_TOY_MODEL_HPP_
#define ADVMT_TOY_MODEL_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "advmt/adapter.hpp"
#include "advmt/tokenizer.hpp"
#include "advmt/types.hpp"

namespace advmt {

// Position-wise "cipher translation" model: token id v translates to
// (v + shift) mod V. Everything is closed-form differentiable.
//
// Construction: E_in rows are unit-normalized gaussian draws, W has
// orthonormal columns (h <= d), and E_out row j is W^T E_in[(j - shift)
// mod V] rescaled so the correct class always scores exactly 1.0 while
// every competing class scores strictly less. The init verifies that
// argmax property for all V tokens and redraws on the rare failure, so
// decoding is the exact cipher map by construction.
struct ToyCipherModel {
  std::size_t vocab_size = 0;  // V
  std::size_t dim = 0;         // d, input embedding width
  std::size_t hidden = 0;      // h, latent width
  std::int64_t shift = 1;      // cipher key k
  double temperature = 1.0;
  std::uint64_t seed = 0;

  Mat e_in;   // V x d
  Mat w;      // d x h
  Mat e_out;  // V x h

  struct Forward {
    Mat latents;  // n x h
    Mat logits;   // n x V
  };

  Forward forward(const std::vector<TokenId>& ids) const;
  std::vector<TokenId> argmax_decode(const std::vector<TokenId>& ids) const;
  std::vector<TokenId> decode_logits(const Mat& logits) const;

  // Mean softmax cross-entropy vs ref, with the closed-form gradient
  // w.r.t. the input embeddings. Requires equal lengths.
  LossGrad loss_grad(const std::vector<TokenId>& ids,
                     const std::vector<TokenId>& ref_ids) const;

  // Per-position probabilities, for self-consistency checks.
  Mat probabilities(const std::vector<TokenId>& ids) const;
};

ToyCipherModel make_toy_model(std::size_t vocab_size, std::size_t dim,
                              std::size_t hidden, std::int64_t shift,
                              double temperature, std::uint64_t seed);

std::string toy_model_to_json(const ToyCipherModel& model,
                              const std::vector<std::string>& vocab_tokens);
void save_toy_model(const ToyCipherModel& model,
                    const std::vector<std::string>& vocab_tokens,
                    const std::string& path);

struct LoadedToyModel {
  ToyCipherModel model;
  std::vector<std::string> vocab_tokens;
};
LoadedToyModel load_toy_model(const std::string& path);
LoadedToyModel toy_model_from_json(const std::string& json_text);

// Full ModelAdapter over a ToyCipherModel plus the bundled subword
// tokenizer. Immutable after construction.
class ToyModelAdapter : public ModelAdapter {
 public:
  ToyModelAdapter(ToyCipherModel model, std::vector<std::string> vocab_tokens,
                  std::unordered_set<std::string> stopwords =
                      default_stopwords(),
                  std::pair<std::string, std::string> direction = {"src",
                                                                   "cipher"});

  std::string model_id() const override;
  std::pair<std::string, std::string> direction() const override {
    return direction_;
  }
  Capabilities capabilities() const override;
  const VocabTable& vocab() const override { return vocab_; }

  TokenizedText tokenize(const std::string& text) const override;
  std::string detokenize(const std::vector<TokenId>& ids) const override;
  TokenizedText from_ids(const std::vector<TokenId>& ids) const override;

  TokenizedText translate(const TokenizedText& src) const override;
  LossGrad loss_and_grad(const TokenizedText& src,
                         const TokenizedText& ref_target) const override;
  EncoderLatents encode(const TokenizedText& src) const override;
  TokenizedText decode_from_latents(const EncoderLatents& z) const override;
  Mat encoder_input_grad(const TokenizedText& src,
                         const Mat& latent_grad) const override;

  const ToyCipherModel& model() const { return model_; }
  const SubwordTokenizer& tokenizer() const { return tokenizer_; }

  // The mirror adapter (shift -> V - shift), for back-translation.
  std::unique_ptr<ToyModelAdapter> reverse() const;

 private:
  ToyCipherModel model_;
  SubwordTokenizer tokenizer_;
  VocabTable vocab_;
  std::pair<std::string, std::string> direction_;
};

// Default desk-scale adapter: printable-ASCII subword vocabulary plus a
// handful of whole words, even shift so word boundaries survive the cipher.
std::unique_ptr<ToyModelAdapter> make_default_toy_adapter(
    std::uint64_t seed = 7, std::int64_t shift = 2, std::size_t dim = 16,
    double temperature = 0.25);

}  // namespace advmt

#endif  // ADVMT_TOY_MODEL_HPP_
