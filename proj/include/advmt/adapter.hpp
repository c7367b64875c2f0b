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

#ifndef ADVMT_ADAPTER_HPP_
#define ADVMT_ADAPTER_HPP_

#include <string>
#include <utility>

#include "advmt/types.hpp"

namespace advmt {

struct Capabilities {
  bool translate = false;
  bool encode = false;
  bool loss_grad = false;
  bool vocab = false;
  bool decode_latents = false;
  // Vector-Jacobian product through the encoder, needed by the combined
  // surrogate attack. Only in-process adapters provide it.
  bool encoder_backprop = false;
};

struct LossGrad {
  double loss = 0.0;
  Mat grad;  // n x d, gradient of the mean NLL w.r.t. input embeddings
};

// The contract every attack consumes. Instances are single-threaded;
// create one per worker.
class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;

  virtual std::string model_id() const = 0;
  // (src_lang, tgt_lang)
  virtual std::pair<std::string, std::string> direction() const = 0;
  virtual Capabilities capabilities() const = 0;
  virtual const VocabTable& vocab() const = 0;

  virtual TokenizedText tokenize(const std::string& text) const = 0;
  virtual std::string detokenize(const std::vector<TokenId>& ids) const = 0;
  // Rebuilds a TokenizedText (text, spans, flags) from ids without
  // re-running segmentation, so attack edit logs stay id-exact.
  virtual TokenizedText from_ids(const std::vector<TokenId>& ids) const = 0;

  // Greedy decoding by default; deterministic for a fixed configuration.
  virtual TokenizedText translate(const TokenizedText& src) const = 0;

  // Mean NLL of ref_target under the model given src, with its exact
  // gradient w.r.t. the input embeddings.
  virtual LossGrad loss_and_grad(const TokenizedText& src,
                                 const TokenizedText& ref_target) const = 0;

  virtual EncoderLatents encode(const TokenizedText& src) const = 0;
  virtual TokenizedText decode_from_latents(const EncoderLatents& z) const = 0;

  // VJP: given dL/dZ, returns dL/dE (n x d). Throws CapabilityError unless
  // capabilities().encoder_backprop.
  virtual Mat encoder_input_grad(const TokenizedText& src,
                                 const Mat& latent_grad) const;
};

// Translates tgt back to the source language with a mirrored adapter.
// Throws GatewayError when reverse's direction is not the mirror of
// forward's.
TokenizedText back_translate(const TokenizedText& tgt,
                             const ModelAdapter& forward,
                             const ModelAdapter& reverse);

}  // namespace advmt

#endif  // ADVMT_ADAPTER_HPP_
