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

#include "advmt/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace advmt {

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> split_lower(const std::string& text) {
  std::string lowered = text;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::istringstream in(lowered);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

void l2_normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  if (n == 0.0) return;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
}

}  // namespace

HashingEmbeddingProvider::HashingEmbeddingProvider(std::size_t width,
                                                   int min_n, int max_n)
    : width_(width), min_n_(min_n), max_n_(max_n) {
  if (width_ == 0 || min_n_ < 1 || max_n_ < min_n_)
    throw Error("hashing provider: bad parameters");
}

std::string HashingEmbeddingProvider::name() const {
  return "hashing-" + std::to_string(width_);
}

void HashingEmbeddingProvider::accumulate(const std::string& piece,
                                          std::vector<double>& acc) const {
  std::string marked = "^" + piece + "$";
  for (int n = min_n_; n <= max_n_; ++n) {
    if (static_cast<int>(marked.size()) < n) break;
    for (std::size_t i = 0; i + n <= marked.size(); ++i) {
      std::string gram = marked.substr(i, n);
      std::uint64_t h = fnv1a(gram, 0x5bd1e995);
      double sign = (fnv1a(gram, 0xa5a5a5a5) & 1) ? 1.0 : -1.0;
      acc[h % width_] += sign;
    }
  }
}

std::vector<double> HashingEmbeddingProvider::sentence_embed(
    const std::string& text) const {
  std::vector<double> acc(width_, 0.0);
  for (const auto& w : split_lower(text)) accumulate(w, acc);
  l2_normalize(acc);
  return acc;
}

Mat HashingEmbeddingProvider::token_embed(const std::string& text) const {
  auto toks = split_lower(text);
  Mat m(toks.size(), width_);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::vector<double> acc(width_, 0.0);
    accumulate(toks[i], acc);
    l2_normalize(acc);
    std::copy(acc.begin(), acc.end(), m.row(i));
  }
  return m;
}

void FixtureEmbeddingProvider::set_sentence(const std::string& text,
                                            std::vector<double> v) {
  if (v.size() != width_) throw Error("fixture provider: width mismatch");
  sentences_[text] = std::move(v);
}

void FixtureEmbeddingProvider::set_token(const std::string& token,
                                         std::vector<double> v) {
  if (v.size() != width_) throw Error("fixture provider: width mismatch");
  tokens_[token] = std::move(v);
}

std::vector<double> FixtureEmbeddingProvider::sentence_embed(
    const std::string& text) const {
  auto it = sentences_.find(text);
  if (it == sentences_.end())
    throw Error("fixture provider: no sentence vector for '" + text + "'");
  return it->second;
}

Mat FixtureEmbeddingProvider::token_embed(const std::string& text) const {
  auto toks = split_lower(text);
  Mat m(toks.size(), width_);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    auto it = tokens_.find(toks[i]);
    if (it == tokens_.end())
      throw Error("fixture provider: no token vector for '" + toks[i] + "'");
    std::copy(it->second.begin(), it->second.end(), m.row(i));
  }
  return m;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(
    const std::string& spec) {
  // "hashing" or "hashing:<width>"
  if (spec.rfind("hashing", 0) == 0) {
    std::size_t width = 256;
    auto colon = spec.find(':');
    if (colon != std::string::npos)
      width = static_cast<std::size_t>(std::stoul(spec.substr(colon + 1)));
    return std::make_unique<HashingEmbeddingProvider>(width);
  }
  throw ConfigError("unknown embedding provider: " + spec);
}

}  // namespace advmt
