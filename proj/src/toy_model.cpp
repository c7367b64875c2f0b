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

#include "advmt/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace advmt {

namespace {

using json = nlohmann::json;

void softmax_row(const double* logits, std::size_t n, double* out) {
  double mx = logits[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= sum;
}

void check_ids(const std::vector<TokenId>& ids, std::size_t vocab_size,
               const char* who) {
  for (TokenId id : ids)
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size)
      throw Error(std::string(who) + ": token id " + std::to_string(id) +
                  " out of range [0, " + std::to_string(vocab_size) + ")");
}

Mat json_to_mat(const json& j) {
  Mat m;
  m.rows = j.size();
  m.cols = m.rows ? j[0].size() : 0;
  m.data.reserve(m.rows * m.cols);
  for (const auto& row : j) {
    if (row.size() != m.cols) throw Error("toy model: ragged matrix in file");
    for (const auto& v : row) m.data.push_back(v.get<double>());
  }
  if (!m.finite()) throw Error("toy model: non-finite matrix entry in file");
  return m;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ToyCipherModel::Forward ToyCipherModel::forward(
    const std::vector<TokenId>& ids) const {
  check_ids(ids, vocab_size, "toy_forward");
  Forward f;
  std::size_t n = ids.size();
  f.latents = Mat(n, hidden);
  f.logits = Mat(n, vocab_size);
  for (std::size_t i = 0; i < n; ++i) {
    const double* e = e_in.row(static_cast<std::size_t>(ids[i]));
    double* z = f.latents.row(i);
    for (std::size_t c = 0; c < hidden; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < dim; ++r) s += w.at(r, c) * e[r];
      z[c] = s;
    }
    double* lg = f.logits.row(i);
    for (std::size_t v = 0; v < vocab_size; ++v)
      lg[v] = dot(e_out.row(v), z, hidden) / temperature;
  }
  return f;
}

std::vector<TokenId> ToyCipherModel::decode_logits(const Mat& logits) const {
  std::vector<TokenId> out(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const double* row = logits.row(i);
    std::size_t best = 0;
    for (std::size_t v = 1; v < logits.cols; ++v)
      if (row[v] > row[best]) best = v;
    out[i] = static_cast<TokenId>(best);
  }
  return out;
}

std::vector<TokenId> ToyCipherModel::argmax_decode(
    const std::vector<TokenId>& ids) const {
  return decode_logits(forward(ids).logits);
}

Mat ToyCipherModel::probabilities(const std::vector<TokenId>& ids) const {
  Mat logits = forward(ids).logits;
  Mat probs(logits.rows, logits.cols);
  for (std::size_t i = 0; i < logits.rows; ++i)
    softmax_row(logits.row(i), logits.cols, probs.row(i));
  return probs;
}

LossGrad ToyCipherModel::loss_grad(const std::vector<TokenId>& ids,
                                   const std::vector<TokenId>& ref_ids) const {
  if (ids.size() != ref_ids.size())
    throw Error("toy_loss_grad: length mismatch, " +
                std::to_string(ids.size()) + " vs " +
                std::to_string(ref_ids.size()));
  if (ids.empty()) throw Error("toy_loss_grad: empty input");
  check_ids(ids, vocab_size, "toy_loss_grad");
  check_ids(ref_ids, vocab_size, "toy_loss_grad");

  std::size_t n = ids.size();
  Forward f = forward(ids);
  LossGrad out;
  out.grad = Mat(n, dim);
  std::vector<double> p(vocab_size);
  std::vector<double> dz(hidden);
  for (std::size_t i = 0; i < n; ++i) {
    softmax_row(f.logits.row(i), vocab_size, p.data());
    double pt = p[static_cast<std::size_t>(ref_ids[i])];
    out.loss += -std::log(std::max(pt, 1e-300));
    // dCE/dz = E_out^T (p - y) / T, dCE/de = W dCE/dz
    p[static_cast<std::size_t>(ref_ids[i])] -= 1.0;
    std::fill(dz.begin(), dz.end(), 0.0);
    for (std::size_t v = 0; v < vocab_size; ++v) {
      const double* eo = e_out.row(v);
      double pv = p[v];
      if (pv == 0.0) continue;
      for (std::size_t c = 0; c < hidden; ++c) dz[c] += pv * eo[c];
    }
    double* g = out.grad.row(i);
    for (std::size_t r = 0; r < dim; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < hidden; ++c) s += w.at(r, c) * dz[c];
      g[r] = s / (temperature * static_cast<double>(n));
    }
  }
  out.loss /= static_cast<double>(n);
  return out;
}

ToyCipherModel make_toy_model(std::size_t vocab_size, std::size_t dim,
                              std::size_t hidden, std::int64_t shift,
                              double temperature, std::uint64_t seed) {
  if (vocab_size < 2) throw Error("make_toy_model: vocab_size must be >= 2");
  if (hidden > dim) throw Error("make_toy_model: hidden must be <= dim");
  if (temperature <= 0.0)
    throw Error("make_toy_model: temperature must be positive");
  std::int64_t v = static_cast<std::int64_t>(vocab_size);
  std::int64_t k = ((shift % v) + v) % v;

  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    std::mt19937_64 rng(seed + attempt * 0x9E3779B97F4A7C15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ToyCipherModel m;
    m.vocab_size = vocab_size;
    m.dim = dim;
    m.hidden = hidden;
    m.shift = shift;
    m.temperature = temperature;
    m.seed = seed;

    m.e_in = Mat(vocab_size, dim);
    for (std::size_t r = 0; r < vocab_size; ++r) {
      double* row = m.e_in.row(r);
      for (std::size_t c = 0; c < dim; ++c) row[c] = gauss(rng);
      double nrm = norm2(row, dim);
      for (std::size_t c = 0; c < dim; ++c) row[c] /= nrm;
    }

    // W: d x h with orthonormal columns (modified Gram-Schmidt).
    m.w = Mat(dim, hidden);
    std::vector<double> col(dim);
    for (std::size_t c = 0; c < hidden; ++c) {
      for (std::size_t r = 0; r < dim; ++r) col[r] = gauss(rng);
      for (std::size_t prev = 0; prev < c; ++prev) {
        double proj = 0.0;
        for (std::size_t r = 0; r < dim; ++r) proj += col[r] * m.w.at(r, prev);
        for (std::size_t r = 0; r < dim; ++r) col[r] -= proj * m.w.at(r, prev);
      }
      double nrm = norm2(col.data(), dim);
      if (nrm < 1e-8) { goto retry; }
      for (std::size_t r = 0; r < dim; ++r) m.w.at(r, c) = col[r] / nrm;
    }

    {
      // Latent of every token, then E_out rows so that
      // e_out[(v+k)%V] . z_v == 1 exactly.
      Mat z(vocab_size, hidden);
      for (std::size_t t = 0; t < vocab_size; ++t) {
        for (std::size_t c = 0; c < hidden; ++c) {
          double s = 0.0;
          for (std::size_t r = 0; r < dim; ++r)
            s += m.w.at(r, c) * m.e_in.at(t, r);
          z.at(t, c) = s;
        }
      }
      m.e_out = Mat(vocab_size, hidden);
      for (std::size_t j = 0; j < vocab_size; ++j) {
        std::size_t srcrow = static_cast<std::size_t>(
            ((static_cast<std::int64_t>(j) - k) % v + v) % v);
        double nsq = dot(z.row(srcrow), z.row(srcrow), hidden);
        if (nsq < 1e-12) goto retry;
        for (std::size_t c = 0; c < hidden; ++c)
          m.e_out.at(j, c) = z.at(srcrow, c) / nsq;
      }
      // Verify the cipher argmax for every token with a real margin.
      bool ok = true;
      for (std::size_t t = 0; t < vocab_size && ok; ++t) {
        std::size_t want = static_cast<std::size_t>(
            (static_cast<std::int64_t>(t) + k) % v);
        for (std::size_t j = 0; j < vocab_size; ++j) {
          if (j == want) continue;
          if (dot(m.e_out.row(j), z.row(t), hidden) >= 1.0 - 1e-9) {
            ok = false;
            break;
          }
        }
      }
      if (ok) return m;
    }
  retry:;
  }
  throw Error("make_toy_model: could not realize cipher property; "
              "try a larger dim");
}

std::string toy_model_to_json(const ToyCipherModel& model,
                              const std::vector<std::string>& vocab_tokens) {
  if (vocab_tokens.size() != model.vocab_size)
    throw Error("toy model: vocab token count does not match model");
  json j;
  j["version"] = "toy/1";
  j["vocab_size"] = model.vocab_size;
  j["dim"] = model.dim;
  j["hidden"] = model.hidden;
  j["shift"] = model.shift;
  j["temperature"] = model.temperature;
  j["seed"] = model.seed;
  j["vocab_tokens"] = vocab_tokens;
  j["e_in"] = mat_to_json(model.e_in);
  j["w"] = mat_to_json(model.w);
  j["e_out"] = mat_to_json(model.e_out);
  return j.dump();
}

void save_toy_model(const ToyCipherModel& model,
                    const std::vector<std::string>& vocab_tokens,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("toy model: cannot write " + path);
  out << toy_model_to_json(model, vocab_tokens) << "\n";
}

LoadedToyModel toy_model_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  if (j.value("version", "") != std::string("toy/1"))
    throw Error("toy model: unsupported file version");
  LoadedToyModel out;
  ToyCipherModel& m = out.model;
  m.vocab_size = j.at("vocab_size").get<std::size_t>();
  m.dim = j.at("dim").get<std::size_t>();
  m.hidden = j.at("hidden").get<std::size_t>();
  m.shift = j.at("shift").get<std::int64_t>();
  m.temperature = j.at("temperature").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  out.vocab_tokens = j.at("vocab_tokens").get<std::vector<std::string>>();
  m.e_in = json_to_mat(j.at("e_in"));
  m.w = json_to_mat(j.at("w"));
  m.e_out = json_to_mat(j.at("e_out"));
  if (m.e_in.rows != m.vocab_size || m.e_in.cols != m.dim ||
      m.w.rows != m.dim || m.w.cols != m.hidden ||
      m.e_out.rows != m.vocab_size || m.e_out.cols != m.hidden ||
      out.vocab_tokens.size() != m.vocab_size)
    throw Error("toy model: inconsistent shapes in file");
  return out;
}

LoadedToyModel load_toy_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("toy model: cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return toy_model_from_json(text);
}

ToyModelAdapter::ToyModelAdapter(ToyCipherModel model,
                                 std::vector<std::string> vocab_tokens,
                                 std::unordered_set<std::string> stopwords,
                                 std::pair<std::string, std::string> direction)
    : model_(std::move(model)),
      tokenizer_(vocab_tokens),
      direction_(std::move(direction)) {
  if (tokenizer_.vocab_size() != model_.vocab_size)
    throw Error("ToyModelAdapter: tokenizer/model vocab size mismatch");
  vocab_.size = model_.vocab_size;
  vocab_.dim = model_.dim;
  vocab_.embeddings = model_.e_in;
  vocab_.tokens = std::move(vocab_tokens);
  apply_vocab_masks(vocab_, stopwords);
}

std::string ToyModelAdapter::model_id() const {
  return "toy-cipher-v" + std::to_string(model_.vocab_size) + "-k" +
         std::to_string(model_.shift) + "-s" + std::to_string(model_.seed);
}

Capabilities ToyModelAdapter::capabilities() const {
  Capabilities c;
  c.translate = c.encode = c.loss_grad = c.vocab = c.decode_latents = true;
  c.encoder_backprop = true;
  return c;
}

TokenizedText ToyModelAdapter::tokenize(const std::string& text) const {
  return tokenizer_.tokenize(text);
}

std::string ToyModelAdapter::detokenize(const std::vector<TokenId>& ids) const {
  return tokenizer_.detokenize(ids);
}

TokenizedText ToyModelAdapter::from_ids(const std::vector<TokenId>& ids) const {
  return tokenizer_.from_ids(ids);
}

TokenizedText ToyModelAdapter::translate(const TokenizedText& src) const {
  if (src.empty()) throw GatewayError("translate: empty input");
  return tokenizer_.from_ids(model_.argmax_decode(src.token_ids));
}

LossGrad ToyModelAdapter::loss_and_grad(const TokenizedText& src,
                                        const TokenizedText& ref) const {
  if (src.empty() || ref.empty())
    throw GatewayError("loss_and_grad: empty input");
  // The toy model is position-wise; when re-tokenization changed the
  // length, score the overlapping prefix and leave the rest with zero
  // gradient.
  std::size_t m = std::min(src.size(), ref.size());
  std::vector<TokenId> s(src.token_ids.begin(), src.token_ids.begin() + m);
  std::vector<TokenId> r(ref.token_ids.begin(), ref.token_ids.begin() + m);
  LossGrad lg = model_.loss_grad(s, r);
  if (src.size() > m) {
    Mat full(src.size(), model_.dim);
    std::copy(lg.grad.data.begin(), lg.grad.data.end(), full.data.begin());
    lg.grad = std::move(full);
  }
  return lg;
}

EncoderLatents ToyModelAdapter::encode(const TokenizedText& src) const {
  if (src.empty()) throw GatewayError("encode: empty input");
  EncoderLatents z;
  z.values = model_.forward(src.token_ids).latents;
  z.source_len = src.size();
  return z;
}

TokenizedText ToyModelAdapter::decode_from_latents(
    const EncoderLatents& z) const {
  if (z.positions() == 0) throw GatewayError("decode_from_latents: empty z");
  if (!z.values.finite())
    throw GatewayError("decode_from_latents: non-finite latents");
  if (z.width() != model_.hidden)
    throw GatewayError("decode_from_latents: latent width " +
                       std::to_string(z.width()) + " != model hidden " +
                       std::to_string(model_.hidden));
  Mat logits(z.positions(), model_.vocab_size);
  for (std::size_t i = 0; i < z.positions(); ++i)
    for (std::size_t v = 0; v < model_.vocab_size; ++v)
      logits.at(i, v) =
          dot(model_.e_out.row(v), z.values.row(i), model_.hidden) /
          model_.temperature;
  return tokenizer_.from_ids(model_.decode_logits(logits));
}

Mat ToyModelAdapter::encoder_input_grad(const TokenizedText& src,
                                        const Mat& latent_grad) const {
  if (latent_grad.rows != src.size() || latent_grad.cols != model_.hidden)
    throw GatewayError("encoder_input_grad: shape mismatch");
  // z_i = W^T e_i, so dL/de_i = W dL/dz_i.
  Mat out(src.size(), model_.dim);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double* gz = latent_grad.row(i);
    double* ge = out.row(i);
    for (std::size_t r = 0; r < model_.dim; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < model_.hidden; ++c)
        s += model_.w.at(r, c) * gz[c];
      ge[r] = s;
    }
  }
  return out;
}

std::unique_ptr<ToyModelAdapter> ToyModelAdapter::reverse() const {
  ToyCipherModel rev = make_toy_model(
      model_.vocab_size, model_.dim, model_.hidden,
      static_cast<std::int64_t>(model_.vocab_size) - model_.shift,
      model_.temperature, model_.seed);
  return std::make_unique<ToyModelAdapter>(
      std::move(rev), vocab_.tokens, default_stopwords(),
      std::make_pair(direction_.second, direction_.first));
}

std::unique_ptr<ToyModelAdapter> make_default_toy_adapter(std::uint64_t seed,
                                                          std::int64_t shift,
                                                          std::size_t dim,
                                                          double temperature) {
  std::vector<std::string> extras = {
      "the",  "and",  "ing",  "tion", "that", "with", "for",  "was",
      "are",  "this", "have", "from", "they", "more", "many", "cars",
      "gas",  "fund", "tax",  "pay",  "pump", "get",  "miles","gallon",
  };
  auto vocab = ascii_subword_vocab(extras);
  if (vocab.size() % 2 != 0) vocab.push_back("xq");  // keep parity even
  ToyCipherModel m =
      make_toy_model(vocab.size(), dim, dim, shift, temperature, seed);
  return std::make_unique<ToyModelAdapter>(std::move(m), std::move(vocab));
}

}  // namespace advmt
