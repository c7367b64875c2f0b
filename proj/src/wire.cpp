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

#include "advmt/wire.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

namespace advmt {

namespace {

using json = nlohmann::json;

// Floats travel at float32 precision.
json mat_to_wire(const Mat& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols; ++c)
      row.push_back(static_cast<float>(m.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_wire(const json& j) {
  Mat m;
  m.rows = j.size();
  m.cols = m.rows ? j[0].size() : 0;
  m.data.reserve(m.rows * m.cols);
  for (const auto& row : j) {
    if (row.size() != m.cols)
      throw GatewayError("wire: ragged matrix in response");
    for (const auto& v : row)
      m.data.push_back(static_cast<double>(v.get<float>()));
  }
  return m;
}

json tokenized_to_wire(const TokenizedText& t) {
  json j;
  j["text"] = t.text;
  j["token_ids"] = t.token_ids;
  json spans = json::array();
  for (const auto& [a, b] : t.spans) spans.push_back(json::array({a, b}));
  j["spans"] = std::move(spans);
  std::vector<bool> flags(t.is_word_initial.begin(), t.is_word_initial.end());
  j["is_word_initial"] = flags;
  return j;
}

TokenizedText tokenized_from_wire(const json& j) {
  TokenizedText t;
  t.text = j.at("text").get<std::string>();
  t.token_ids = j.at("token_ids").get<std::vector<TokenId>>();
  if (j.contains("spans"))
    for (const auto& span : j.at("spans"))
      t.spans.emplace_back(span[0].get<std::size_t>(),
                           span[1].get<std::size_t>());
  if (j.contains("is_word_initial")) {
    auto flags = j.at("is_word_initial").get<std::vector<bool>>();
    t.is_word_initial.assign(flags.begin(), flags.end());
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Server

struct WireServer::Impl {
  std::shared_ptr<const ModelAdapter> adapter;
  httplib::Server server;

  explicit Impl(std::shared_ptr<const ModelAdapter> a) : adapter(std::move(a)) {
    setup();
  }

  static void reply_error(httplib::Response& res, int status,
                          const std::string& message) {
    json j;
    j["error"] = message;
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  template <typename Fn>
  static void guarded(httplib::Response& res, Fn&& fn) {
    try {
      json out = fn();
      res.set_content(out.dump(), "application/json");
    } catch (const CapabilityError& ex) {
      reply_error(res, 501, ex.what());
    } catch (const Error& ex) {
      reply_error(res, 400, ex.what());
    } catch (const std::exception& ex) {
      reply_error(res, 500, ex.what());
    }
  }

  void setup() {
    const ModelAdapter& m = *adapter;

    server.Get("/capabilities", [&m](const httplib::Request&,
                                     httplib::Response& res) {
      guarded(res, [&m] {
        Capabilities c = m.capabilities();
        json j;
        j["protocol"] = kWireProtocolVersion;
        j["translate"] = c.translate;
        j["encode"] = c.encode;
        j["loss_grad"] = c.loss_grad;
        j["vocab"] = c.vocab;
        j["decode_latents"] = c.decode_latents;
        j["tokenize"] = true;
        j["model_id"] = m.model_id();
        auto dir = m.direction();
        j["src_lang"] = dir.first;
        j["tgt_lang"] = dir.second;
        return j;
      });
    });

    server.Get("/vocab", [&m](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&m] {
        if (!m.capabilities().vocab)
          throw CapabilityError("vocab not advertised");
        const VocabTable& v = m.vocab();
        json j;
        j["size"] = v.size;
        j["dim"] = v.dim;
        j["embeddings"] = mat_to_wire(v.embeddings);
        j["word_initial_mask"] = v.word_initial_mask;
        j["protected_mask"] = v.protected_mask;
        j["tokens"] = v.tokens;
        return j;
      });
    });

    server.Post("/translate", [&m](const httplib::Request& req,
                                   httplib::Response& res) {
      guarded(res, [&m, &req] {
        if (!m.capabilities().translate)
          throw CapabilityError("translate not advertised");
        json in = json::parse(req.body);
        TokenizedText src = m.tokenize(in.at("text").get<std::string>());
        if (src.empty()) throw Error("empty input");
        TokenizedText out = m.translate(src);
        json j;
        j["text"] = out.text;
        j["token_ids"] = out.token_ids;
        return j;
      });
    });

    server.Post("/encode", [&m](const httplib::Request& req,
                                httplib::Response& res) {
      guarded(res, [&m, &req] {
        if (!m.capabilities().encode)
          throw CapabilityError("encode not advertised");
        json in = json::parse(req.body);
        TokenizedText src = m.tokenize(in.at("text").get<std::string>());
        if (src.empty()) throw Error("empty input");
        EncoderLatents z = m.encode(src);
        json j;
        j["latents"] = mat_to_wire(z.values);
        j["h"] = z.width();
        return j;
      });
    });

    server.Post("/loss_grad", [&m](const httplib::Request& req,
                                   httplib::Response& res) {
      guarded(res, [&m, &req] {
        if (!m.capabilities().loss_grad)
          throw CapabilityError("gradients unsupported");
        json in = json::parse(req.body);
        TokenizedText src = m.tokenize(in.at("src").get<std::string>());
        TokenizedText ref = m.tokenize(in.at("ref").get<std::string>());
        if (src.empty() || ref.empty()) throw Error("empty input");
        LossGrad lg = m.loss_and_grad(src, ref);
        json j;
        j["loss"] = static_cast<float>(lg.loss);
        j["grad"] = mat_to_wire(lg.grad);
        return j;
      });
    });

    server.Post("/tokenize", [&m](const httplib::Request& req,
                                  httplib::Response& res) {
      guarded(res, [&m, &req] {
        json in = json::parse(req.body);
        TokenizedText t = m.tokenize(in.at("text").get<std::string>());
        return tokenized_to_wire(t);
      });
    });

    server.Post("/detokenize", [&m](const httplib::Request& req,
                                    httplib::Response& res) {
      guarded(res, [&m, &req] {
        json in = json::parse(req.body);
        auto ids = in.at("token_ids").get<std::vector<TokenId>>();
        json j;
        j["text"] = m.detokenize(ids);
        return j;
      });
    });

    server.Post("/decode_latents", [&m](const httplib::Request& req,
                                        httplib::Response& res) {
      guarded(res, [&m, &req] {
        if (!m.capabilities().decode_latents)
          throw CapabilityError("decode_latents not advertised");
        json in = json::parse(req.body);
        EncoderLatents z;
        z.values = mat_from_wire(in.at("latents"));
        if (!z.values.finite()) throw Error("non-finite latents");
        z.source_len = z.values.rows;
        TokenizedText out = m.decode_from_latents(z);
        json j;
        j["text"] = out.text;
        j["token_ids"] = out.token_ids;
        return j;
      });
    });
  }
};

WireServer::WireServer(std::shared_ptr<const ModelAdapter> adapter)
    : impl_(std::make_unique<Impl>(std::move(adapter))) {}

WireServer::~WireServer() { stop(); }

int WireServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw GatewayError("wire server: cannot bind " + host);
  } else {
    if (!impl_->server.bind_to_port(host, port))
      throw GatewayError("wire server: cannot bind " + host + ":" +
                         std::to_string(port));
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void WireServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port))
    throw GatewayError("wire server: cannot listen on " + host + ":" +
                       std::to_string(port));
}

void WireServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

// ---------------------------------------------------------------------------
// Client

struct WireClient::Impl {
  std::string base_url;
  mutable httplib::Client http;
  Capabilities caps;
  std::string model_id;
  std::pair<std::string, std::string> direction;
  VocabTable vocab;
  bool vocab_loaded = false;

  Impl(const std::string& url, double timeout_s) : base_url(url), http(url) {
    http.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int>(timeout_s * 1000)));
    http.set_read_timeout(std::chrono::milliseconds(
        static_cast<int>(timeout_s * 1000)));
  }

  json call_get(const std::string& path) const {
    auto res = http.Get(path);
    return unwrap(path, res);
  }

  json call_post(const std::string& path, const json& body) const {
    auto res = http.Post(path, body.dump(), "application/json");
    return unwrap(path, res);
  }

  json unwrap(const std::string& path, const httplib::Result& res) const {
    if (!res)
      throw GatewayError("wire client: " + base_url + path +
                         " unreachable (" + httplib::to_string(res.error()) +
                         ")");
    json j = json::parse(res->body, nullptr, false);
    if (res->status != 200) {
      std::string message = "status " + std::to_string(res->status);
      if (!j.is_discarded() && j.contains("error"))
        message = j.at("error").get<std::string>();
      if (res->status == 501)
        throw CapabilityError("wire client: " + message);
      throw GatewayError("wire client: " + path + " failed: " + message);
    }
    if (j.is_discarded())
      throw GatewayError("wire client: malformed response from " + path);
    return j;
  }
};

WireClient::WireClient(const std::string& base_url, double timeout_s)
    : impl_(std::make_unique<Impl>(base_url, timeout_s)) {
  json caps = impl_->call_get("/capabilities");
  std::string protocol = caps.value("protocol", "");
  if (protocol != kWireProtocolVersion)
    throw GatewayError("wire client: protocol version mismatch, server "
                       "speaks '" + protocol + "' but client needs '" +
                       std::string(kWireProtocolVersion) + "'");
  impl_->caps.translate = caps.value("translate", false);
  impl_->caps.encode = caps.value("encode", false);
  impl_->caps.loss_grad = caps.value("loss_grad", false);
  impl_->caps.vocab = caps.value("vocab", false);
  impl_->caps.decode_latents = caps.value("decode_latents", false);
  impl_->caps.encoder_backprop = false;  // not expressible over the wire
  impl_->model_id = caps.value("model_id", "remote");
  impl_->direction = {caps.value("src_lang", "src"),
                      caps.value("tgt_lang", "tgt")};
  if (impl_->caps.vocab) {
    json v = impl_->call_get("/vocab");
    impl_->vocab.size = v.at("size").get<std::size_t>();
    impl_->vocab.dim = v.at("dim").get<std::size_t>();
    impl_->vocab.embeddings = mat_from_wire(v.at("embeddings"));
    impl_->vocab.word_initial_mask =
        v.at("word_initial_mask").get<std::vector<bool>>();
    impl_->vocab.protected_mask =
        v.at("protected_mask").get<std::vector<bool>>();
    if (v.contains("tokens"))
      impl_->vocab.tokens = v.at("tokens").get<std::vector<std::string>>();
    if (impl_->vocab.embeddings.rows != impl_->vocab.size ||
        impl_->vocab.embeddings.cols != impl_->vocab.dim)
      throw GatewayError("wire client: vocab shape mismatch");
    impl_->vocab_loaded = true;
  }
}

WireClient::~WireClient() = default;

std::string WireClient::model_id() const {
  return impl_->model_id + "@" + impl_->base_url;
}

std::pair<std::string, std::string> WireClient::direction() const {
  return impl_->direction;
}

Capabilities WireClient::capabilities() const { return impl_->caps; }

const VocabTable& WireClient::vocab() const {
  if (!impl_->vocab_loaded)
    throw CapabilityError("wire client: vocab not advertised by server");
  return impl_->vocab;
}

TokenizedText WireClient::tokenize(const std::string& text) const {
  json body;
  body["text"] = text;
  return tokenized_from_wire(impl_->call_post("/tokenize", body));
}

std::string WireClient::detokenize(const std::vector<TokenId>& ids) const {
  json body;
  body["token_ids"] = ids;
  return impl_->call_post("/detokenize", body).at("text").get<std::string>();
}

TokenizedText WireClient::from_ids(const std::vector<TokenId>& ids) const {
  return tokenize(detokenize(ids));
}

TokenizedText WireClient::translate(const TokenizedText& src) const {
  if (src.empty()) throw GatewayError("translate: empty input");
  if (!impl_->caps.translate)
    throw CapabilityError("translate unsupported by server");
  json body;
  body["text"] = src.text;
  json j = impl_->call_post("/translate", body);
  TokenizedText out;
  out.text = j.at("text").get<std::string>();
  out.token_ids = j.at("token_ids").get<std::vector<TokenId>>();
  return out;
}

LossGrad WireClient::loss_and_grad(const TokenizedText& src,
                                   const TokenizedText& ref) const {
  if (src.empty() || ref.empty())
    throw GatewayError("loss_and_grad: empty input");
  if (!impl_->caps.loss_grad)
    throw CapabilityError("gradients unsupported by server");
  json body;
  body["src"] = src.text;
  body["ref"] = ref.text;
  json j = impl_->call_post("/loss_grad", body);
  LossGrad lg;
  lg.loss = j.at("loss").get<double>();
  lg.grad = mat_from_wire(j.at("grad"));
  return lg;
}

EncoderLatents WireClient::encode(const TokenizedText& src) const {
  if (src.empty()) throw GatewayError("encode: empty input");
  if (!impl_->caps.encode)
    throw CapabilityError("encode unsupported by server");
  json body;
  body["text"] = src.text;
  json j = impl_->call_post("/encode", body);
  EncoderLatents z;
  z.values = mat_from_wire(j.at("latents"));
  z.source_len = src.size();
  if (z.values.cols != j.at("h").get<std::size_t>())
    throw GatewayError("wire client: latent width disagrees with header");
  return z;
}

TokenizedText WireClient::decode_from_latents(const EncoderLatents& z) const {
  if (!impl_->caps.decode_latents)
    throw CapabilityError("decode_from_latents unsupported by server");
  json body;
  body["latents"] = mat_to_wire(z.values);
  json j = impl_->call_post("/decode_latents", body);
  TokenizedText out;
  out.text = j.at("text").get<std::string>();
  out.token_ids = j.at("token_ids").get<std::vector<TokenId>>();
  return out;
}

}  // namespace advmt
