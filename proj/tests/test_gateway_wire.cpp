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

#include <memory>

#include "advmt/toy_model.hpp"
#include "advmt/wire.hpp"

using namespace advmt;

namespace {

// Adapter that advertises translation only, for capability-error tests.
class TranslateOnlyAdapter : public ModelAdapter {
 public:
  TranslateOnlyAdapter() : inner_(make_default_toy_adapter()) {}
  std::string model_id() const override { return "translate-only"; }
  std::pair<std::string, std::string> direction() const override {
    return inner_->direction();
  }
  Capabilities capabilities() const override {
    Capabilities c;
    c.translate = true;
    return c;
  }
  const VocabTable& vocab() const override { return inner_->vocab(); }
  TokenizedText tokenize(const std::string& text) const override {
    return inner_->tokenize(text);
  }
  std::string detokenize(const std::vector<TokenId>& ids) const override {
    return inner_->detokenize(ids);
  }
  TokenizedText from_ids(const std::vector<TokenId>& ids) const override {
    return inner_->from_ids(ids);
  }
  TokenizedText translate(const TokenizedText& src) const override {
    return inner_->translate(src);
  }
  LossGrad loss_and_grad(const TokenizedText&,
                         const TokenizedText&) const override {
    throw CapabilityError("gradients unsupported");
  }
  EncoderLatents encode(const TokenizedText&) const override {
    throw CapabilityError("encode unsupported");
  }
  TokenizedText decode_from_latents(const EncoderLatents&) const override {
    throw CapabilityError("decode unsupported");
  }

 private:
  std::unique_ptr<ToyModelAdapter> inner_;
};

struct Loopback {
  std::shared_ptr<const ModelAdapter> adapter;
  WireServer server;
  int port;

  explicit Loopback(std::shared_ptr<const ModelAdapter> a)
      : adapter(a), server(a), port(server.start("127.0.0.1", 0)) {}

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST_CASE("wire round-trip equals the direct adapter") {
  auto toy = std::shared_ptr<const ModelAdapter>(make_default_toy_adapter());
  Loopback loop(toy);
  WireClient client(loop.url());

  const std::string sentence = "Cars get many more miles to the gallon.";
  TokenizedText direct_tok = toy->tokenize(sentence);
  TokenizedText remote_tok = client.tokenize(sentence);
  CHECK(remote_tok.token_ids == direct_tok.token_ids);
  CHECK(remote_tok.spans == direct_tok.spans);
  CHECK(remote_tok.is_word_initial == direct_tok.is_word_initial);

  CHECK(client.translate(remote_tok).text == toy->translate(direct_tok).text);
  CHECK(client.detokenize(remote_tok.token_ids) == sentence);

  // loss over the wire agrees up to f32 rounding
  TokenizedText ref = toy->translate(direct_tok);
  LossGrad remote = client.loss_and_grad(remote_tok, ref);
  LossGrad local = toy->loss_and_grad(direct_tok, ref);
  CHECK(remote.loss == doctest::Approx(local.loss).epsilon(1e-6));
  CHECK(remote.grad.rows == local.grad.rows);
  CHECK(remote.grad.cols == local.grad.cols);
  for (std::size_t i = 0; i < local.grad.data.size(); ++i)
    CHECK(remote.grad.data[i] ==
          doctest::Approx(local.grad.data[i]).epsilon(1e-5));

  // latents round-trip through /encode + /decode_latents
  EncoderLatents z = client.encode(remote_tok);
  CHECK(z.values.rows == direct_tok.size());
  CHECK(z.values.cols == toy->encode(direct_tok).values.cols);
  CHECK(client.decode_from_latents(z).text == toy->translate(direct_tok).text);
}

TEST_CASE("wire vocab endpoint ships the full table") {
  auto toy = std::shared_ptr<const ModelAdapter>(make_default_toy_adapter());
  Loopback loop(toy);
  WireClient client(loop.url());
  const VocabTable& remote = client.vocab();
  const VocabTable& local = toy->vocab();
  CHECK(remote.size == local.size);
  CHECK(remote.dim == local.dim);
  CHECK(remote.embeddings.rows == local.size);
  CHECK(remote.word_initial_mask == local.word_initial_mask);
  CHECK(remote.protected_mask == local.protected_mask);
  CHECK(remote.tokens == local.tokens);
}

TEST_CASE("capability errors surface as 'unsupported'") {
  auto limited = std::make_shared<TranslateOnlyAdapter>();
  Loopback loop(limited);
  WireClient client(loop.url());

  Capabilities caps = client.capabilities();
  CHECK(caps.translate);
  CHECK_FALSE(caps.loss_grad);
  CHECK_FALSE(caps.encode);

  TokenizedText src = limited->tokenize("some words");
  CHECK_THROWS_AS(client.loss_and_grad(src, src), CapabilityError);
  CHECK_THROWS_AS(client.encode(src), CapabilityError);
  CHECK_THROWS_AS(client.vocab(), CapabilityError);
  // translate still works
  CHECK_FALSE(client.translate(src).text.empty());
}

TEST_CASE("unreachable server raises a gateway error") {
  CHECK_THROWS_AS(WireClient("http://127.0.0.1:1", 0.2), GatewayError);
}

TEST_CASE("empty input is rejected over the wire") {
  auto toy = std::shared_ptr<const ModelAdapter>(make_default_toy_adapter());
  Loopback loop(toy);
  WireClient client(loop.url());
  TokenizedText empty;
  CHECK_THROWS_AS(client.translate(empty), GatewayError);
  // server-side rejection too: text that tokenizes to nothing
  TokenizedText blank;
  blank.text = "   ";
  blank.token_ids = {0};  // sneak past the client-side check
  CHECK_THROWS_AS(client.translate(blank), GatewayError);
}
