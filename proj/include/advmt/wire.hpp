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

#ifndef ADVMT_WIRE_HPP_
#define ADVMT_WIRE_HPP_

#include <memory>
#include <string>
#include <thread>

#include "advmt/adapter.hpp"

namespace advmt {

inline constexpr const char* kWireProtocolVersion = "advmt/1";

// JSON-over-HTTP server exposing a ModelAdapter:
//   GET  /capabilities        -> {protocol, translate, encode, loss_grad,
//                                 vocab, ...}
//   POST /translate {text}    -> {text, token_ids}
//   POST /encode {text}       -> {latents: [[f32]], h}
//   POST /loss_grad {src,ref} -> {loss, grad: [[f32]]}
//   GET  /vocab               -> {size, dim, embeddings, word_initial_mask,
//                                 protected_mask, tokens}
//   POST /tokenize {text}     -> {token_ids, spans, is_word_initial}
//   POST /detokenize {token_ids} -> {text}
//   POST /decode_latents {latents} -> {text, token_ids}
// Errors come back as {error} with status 400/501/500. Floats cross the
// wire at float32 precision.
class WireServer {
 public:
  explicit WireServer(std::shared_ptr<const ModelAdapter> adapter);
  ~WireServer();

  WireServer(const WireServer&) = delete;
  WireServer& operator=(const WireServer&) = delete;

  // Binds and serves on a background thread; returns the bound port
  // (useful with port = 0 for an ephemeral port).
  int start(const std::string& host, int port);
  // Blocking serve, for the CLI.
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

// ModelAdapter speaking the wire protocol against a remote server.
// Verifies the protocol version on construction and caches /vocab and
// /capabilities. Calls are independent; safe for concurrent use.
class WireClient : public ModelAdapter {
 public:
  explicit WireClient(const std::string& base_url, double timeout_s = 10.0);
  ~WireClient() override;

  std::string model_id() const override;
  std::pair<std::string, std::string> direction() const override;
  Capabilities capabilities() const override;
  const VocabTable& vocab() const override;

  TokenizedText tokenize(const std::string& text) const override;
  std::string detokenize(const std::vector<TokenId>& ids) const override;
  TokenizedText from_ids(const std::vector<TokenId>& ids) const override;

  TokenizedText translate(const TokenizedText& src) const override;
  LossGrad loss_and_grad(const TokenizedText& src,
                         const TokenizedText& ref_target) const override;
  EncoderLatents encode(const TokenizedText& src) const override;
  TokenizedText decode_from_latents(const EncoderLatents& z) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace advmt

#endif  // ADVMT_WIRE_HPP_
