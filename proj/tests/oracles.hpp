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
//
// Test-only oracles, written independently of the library code paths
// they check: brute-force metric scorers, a finite-difference gradient
// checker, an exhaustive flip search and an O(n^2) dominance scan.

#ifndef ADVMT_TESTS_ORACLES_HPP_
#define ADVMT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advmt/grad_attack.hpp"
#include "advmt/harness.hpp"
#include "advmt/types.hpp"

namespace oracles {

// Collects n-grams as joined strings, counting by linear scan over a
// sorted copy rather than a hash map.
inline std::vector<std::string> grams(const std::vector<std::string>& toks,
                                      int n) {
  std::vector<std::string> out;
  for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i) {
    std::string g;
    for (int j = 0; j < n; ++j) g += toks[i + j] + "\x01";
    out.push_back(g);
  }
  return out;
}

inline long long count_of(const std::vector<std::string>& grams,
                          const std::string& g) {
  return std::count(grams.begin(), grams.end(), g);
}

// Clipped n-gram matches of candidate vs the best reference count.
inline long long clipped_matches(const std::vector<std::string>& cand,
                                 const std::vector<std::vector<std::string>>& refs,
                                 int n) {
  auto cg = grams(cand, n);
  std::vector<std::string> uniq = cg;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  long long total = 0;
  for (const auto& g : uniq) {
    long long best_ref = 0;
    for (const auto& ref : refs)
      best_ref = std::max(best_ref, count_of(grams(ref, n), g));
    total += std::min(count_of(cg, g), best_ref);
  }
  return total;
}

// Sentence BLEU recomputed from first principles with the same smoothing
// convention (epsilon on zero matches, short orders skipped).
inline double bleu(const std::vector<std::string>& cand,
                   const std::vector<std::vector<std::string>>& refs,
                   int max_n = 4, double eps = 1e-9) {
  if (cand.empty()) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    long long total = static_cast<long long>(grams(cand, n).size());
    if (total == 0) continue;
    long long m = clipped_matches(cand, refs, n);
    double p = m > 0 ? static_cast<double>(m) / total : eps / total;
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  long long c = static_cast<long long>(cand.size());
  long long r = -1;
  for (const auto& ref : refs) {
    long long len = static_cast<long long>(ref.size());
    if (r < 0 || std::llabs(len - c) < std::llabs(r - c) ||
        (std::llabs(len - c) == std::llabs(r - c) && len < r))
      r = len;
  }
  double bp = c >= r ? 1.0 : std::exp(1.0 - double(r) / double(c));
  return bp * std::exp(log_sum / orders);
}

inline std::vector<std::string> char_grams(const std::string& s, int n) {
  std::vector<std::string> out;
  for (int i = 0; i + n <= static_cast<int>(s.size()); ++i)
    out.push_back(s.substr(i, n));
  return out;
}

// chrF over explicit gram lists (multiset overlap by erase-on-match).
inline double chrf(std::string cand, std::string ref, int max_n = 6,
                   double beta = 2.0) {
  auto strip = [](std::string s) {
    std::string out;
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
  };
  cand = strip(cand);
  ref = strip(ref);
  if (cand.empty() || ref.empty()) return 0.0;
  double psum = 0, rsum = 0;
  int porders = 0, rorders = 0;
  for (int n = 1; n <= max_n; ++n) {
    auto cg = char_grams(cand, n);
    auto rg = char_grams(ref, n);
    long long overlap = 0;
    std::vector<std::string> pool = rg;
    for (const auto& g : cg) {
      auto it = std::find(pool.begin(), pool.end(), g);
      if (it != pool.end()) {
        ++overlap;
        pool.erase(it);
      }
    }
    if (!cg.empty()) {
      psum += double(overlap) / cg.size();
      ++porders;
    }
    if (!rg.empty()) {
      rsum += double(overlap) / rg.size();
      ++rorders;
    }
  }
  if (porders == 0 || rorders == 0) return 0.0;
  double p = psum / porders, r = rsum / rorders;
  double denom = beta * beta * p + r;
  return denom == 0 ? 0.0 : (1 + beta * beta) * p * r / denom;
}

inline double meteor(const std::vector<std::string>& cand,
                     const std::vector<std::string>& ref, double alpha) {
  if (cand.empty() || ref.empty()) return 0.0;
  std::vector<std::string> pool = ref;
  long long m = 0;
  for (const auto& w : cand) {
    auto it = std::find(pool.begin(), pool.end(), w);
    if (it != pool.end()) {
      ++m;
      pool.erase(it);
    }
  }
  if (m == 0) return 0.0;
  double p = double(m) / cand.size(), r = double(m) / ref.size();
  return p * r / (alpha * p + (1 - alpha) * r);
}

// Full-matrix DP (the library uses two rolling rows).
inline double wer(const std::vector<std::string>& cand,
                  const std::vector<std::string>& ref) {
  std::size_t n = cand.size(), m = ref.size();
  std::vector<std::vector<std::size_t>> d(n + 1,
                                          std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (cand[i - 1] == ref[j - 1] ? 0 : 1)});
  return double(d[n][m]) / double(m);
}

// Central finite differences of a scalar function of a vector.
inline std::vector<double> finite_difference(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double step = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double keep = x[i];
    x[i] = keep + step;
    double hi = f(x);
    x[i] = keep - step;
    double lo = f(x);
    x[i] = keep;
    g[i] = (hi - lo) / (2 * step);
  }
  return g;
}

inline double max_rel_err(const std::vector<double>& a,
                          const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-8});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

// Exhaustive argmin over all allowed (position, token) pairs, restating
// the constraint set from scratch.
inline std::optional<advmt::FlipCandidate> exhaustive_flip(
    const advmt::Mat& grad, const std::vector<advmt::TokenId>& ids,
    const advmt::VocabTable& vocab, const advmt::AttackConstraints& cons) {
  std::optional<advmt::FlipCandidate> best;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (cons.protected_positions.count(i)) continue;
    std::size_t cur = static_cast<std::size_t>(ids[i]);
    for (std::size_t v = 0; v < vocab.size; ++v) {
      if (v == cur) continue;
      if (cons.respect_word_initial_partition &&
          vocab.word_initial_mask[v] != vocab.word_initial_mask[cur])
        continue;
      double cos_sim = advmt::cosine(vocab.embeddings.row(cur),
                                     vocab.embeddings.row(v), vocab.dim);
      double distance = 1.0 - cos_sim;
      bool ok = cons.cosine_rule == advmt::CosineRule::kMaxDistance
                    ? distance <= cons.cosine_threshold
                    : distance >= cons.cosine_threshold;
      if (!ok) continue;
      double score = advmt::dot(vocab.embeddings.row(v), grad.row(i),
                                vocab.dim) -
                     advmt::dot(vocab.embeddings.row(cur), grad.row(i),
                                vocab.dim);
      if (score >= 0.0) continue;
      bool better = !best || score < best->score ||
                    (score == best->score && i < best->position) ||
                    (score == best->score && i == best->position &&
                     static_cast<advmt::TokenId>(v) < best->new_token);
      if (better)
        best = advmt::FlipCandidate{i, static_cast<advmt::TokenId>(v), score};
    }
  }
  return best;
}

// O(n^2) dominance scan.
inline std::vector<advmt::ParetoPoint> pareto(
    const std::vector<advmt::ParetoPoint>& pts) {
  std::vector<advmt::ParetoPoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j) continue;
      bool geq = pts[j].sim_input >= pts[i].sim_input &&
                 pts[j].sim_output <= pts[i].sim_output;
      bool strict = pts[j].sim_input > pts[i].sim_input ||
                    pts[j].sim_output < pts[i].sim_output;
      if (geq && strict) dominated = true;
    }
    if (!dominated) out.push_back(pts[i]);
  }
  std::sort(out.begin(), out.end(),
            [](const advmt::ParetoPoint& a, const advmt::ParetoPoint& b) {
              if (a.sim_input != b.sim_input) return a.sim_input > b.sim_input;
              if (a.sim_output != b.sim_output)
                return a.sim_output < b.sim_output;
              return a.label < b.label;
            });
  return out;
}

}  // namespace oracles

#endif  // ADVMT_TESTS_ORACLES_HPP_
