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

#ifndef ADVMT_TYPES_HPP_
#define ADVMT_TYPES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace advmt {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Remote/adapter failures: unreachable endpoint, protocol mismatch,
// malformed model output.
class GatewayError : public Error {
 public:
  explicit GatewayError(const std::string& what) : Error(what) {}
};

// An adapter was asked for an operation it does not advertise.
class CapabilityError : public GatewayError {
 public:
  explicit CapabilityError(const std::string& what) : GatewayError(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Minimal row-major dense matrix. Sizes in this project are tiny
// (vocab x dim at most), so no BLAS behind it.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double* row(std::size_t r) { return data.data() + r * cols; }

  bool finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const double* a, std::size_t n) {
  return std::sqrt(dot(a, a, n));
}

inline double cosine(const double* a, const double* b, std::size_t n) {
  double na = norm2(a, n), nb = norm2(b, n);
  if (na == 0.0 || nb == 0.0) return 0.0;
  // Bitwise-equal vectors score exactly 1; sqrt rounding must not leak
  // into identity comparisons.
  if (a == b || std::equal(a, a + n, b)) return 1.0;
  double c = dot(a, b, n) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

using TokenId = std::int64_t;
using Span = std::pair<std::size_t, std::size_t>;  // [char_start, char_end)

// A sentence plus its subword segmentation. token_ids, spans and
// is_word_initial are index-aligned; spans point into `text`.
struct TokenizedText {
  std::string text;
  std::vector<TokenId> token_ids;
  std::vector<Span> spans;
  std::vector<bool> is_word_initial;

  std::size_t size() const { return token_ids.size(); }
  bool empty() const { return token_ids.empty(); }
};

// Vocabulary with one embedding row per token. word_initial_mask encodes
// the tokenizer's continuation-marker convention; protected_mask marks
// punctuation, stop words and special tokens.
struct VocabTable {
  std::size_t size = 0;  // |V|
  std::size_t dim = 0;   // embedding width d
  Mat embeddings;        // |V| x d
  std::vector<bool> word_initial_mask;
  std::vector<bool> protected_mask;
  std::vector<std::string> tokens;  // surface forms, "##" prefix = continuation

  const double* embedding(TokenId id) const {
    return embeddings.row(static_cast<std::size_t>(id));
  }
};

// Encoder output Z: one row per latent position.
struct EncoderLatents {
  Mat values;                  // k x h
  std::size_t source_len = 0;  // token count of the encoded input

  std::size_t positions() const { return values.rows; }
  std::size_t width() const { return values.cols; }
};

}  // namespace advmt

#endif  // ADVMT_TYPES_HPP_
