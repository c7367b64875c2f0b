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

#include "advmt/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace advmt {
namespace metrics {

namespace {

// Multiset of n-grams keyed by the joined gram.
template <typename Seq>
std::map<std::string, long long> ngram_counts(const Seq& items, int n) {
  std::map<std::string, long long> counts;
  if (static_cast<int>(items.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= items.size(); ++i) {
    std::string key;
    for (int j = 0; j < n; ++j) {
      if (j) key += '\x1f';
      key += items[i + j];
    }
    ++counts[key];
  }
  return counts;
}

std::map<std::string, long long> char_ngram_counts(const std::string& s,
                                                   int n) {
  std::map<std::string, long long> counts;
  if (static_cast<int>(s.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

long long total_count(const std::map<std::string, long long>& m) {
  long long t = 0;
  for (const auto& [k, v] : m) t += v;
  return t;
}

long long overlap_count(const std::map<std::string, long long>& a,
                        const std::map<std::string, long long>& b) {
  long long t = 0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it != b.end()) t += std::min(v, it->second);
  }
  return t;
}

std::string strip_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

}  // namespace

std::string normalize_text(const std::string& text) {
  // ASCII case fold; NFC is the identity on the ASCII corpora this
  // toolkit bundles, non-ASCII bytes pass through untouched.
  std::string out = text;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string> words(const std::string& text) {
  std::istringstream in(normalize_text(text));
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

BleuStats sentence_bleu_stats(
    const std::vector<std::string>& candidate,
    const std::vector<std::vector<std::string>>& references, int max_n,
    double epsilon) {
  if (max_n < 1) throw Error("bleu: max_n must be >= 1");
  if (references.empty()) throw Error("bleu: empty references");
  bool any_ref = false;
  for (const auto& r : references) any_ref = any_ref || !r.empty();
  if (!any_ref) throw Error("bleu: empty references");

  BleuStats stats;
  stats.precisions.assign(max_n, 0.0);
  stats.matched.assign(max_n, 0);
  stats.total.assign(max_n, 0);
  if (candidate.empty()) return stats;

  double log_sum = 0.0;
  int used_orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    auto cand_counts = ngram_counts(candidate, n);
    long long total = total_count(cand_counts);
    stats.total[n - 1] = total;
    if (total == 0) continue;  // candidate shorter than n: order skipped
    std::vector<std::map<std::string, long long>> ref_counts;
    ref_counts.reserve(references.size());
    for (const auto& ref : references) ref_counts.push_back(ngram_counts(ref, n));
    long long clipped = 0;
    for (const auto& [gram, c] : cand_counts) {
      long long best = 0;
      for (const auto& rc : ref_counts) {
        auto it = rc.find(gram);
        if (it != rc.end()) best = std::max(best, it->second);
      }
      clipped += std::min(c, best);
    }
    stats.matched[n - 1] = clipped;
    stats.precisions[n - 1] =
        static_cast<double>(clipped) / static_cast<double>(total);
    double p = clipped > 0 ? stats.precisions[n - 1]
                           : epsilon / static_cast<double>(total);
    log_sum += std::log(p);
    ++used_orders;
  }

  // Brevity penalty against the closest reference length (ties toward
  // the shorter reference).
  long long c = static_cast<long long>(candidate.size());
  long long r = -1;
  for (const auto& ref : references) {
    long long len = static_cast<long long>(ref.size());
    if (r < 0 || std::llabs(len - c) < std::llabs(r - c) ||
        (std::llabs(len - c) == std::llabs(r - c) && len < r))
      r = len;
  }
  stats.brevity_penalty =
      c >= r ? 1.0
             : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  stats.score =
      used_orders == 0
          ? 0.0
          : stats.brevity_penalty * std::exp(log_sum / used_orders);
  return stats;
}

double sentence_bleu(const std::vector<std::string>& candidate,
                     const std::vector<std::vector<std::string>>& references,
                     int max_n, double epsilon) {
  return sentence_bleu_stats(candidate, references, max_n, epsilon).score;
}

double corpus_bleu(
    const std::vector<std::vector<std::string>>& candidates,
    const std::vector<std::vector<std::vector<std::string>>>& references,
    int max_n) {
  if (candidates.size() != references.size())
    throw Error("corpus_bleu: candidate/reference count mismatch");
  if (candidates.empty()) throw Error("corpus_bleu: empty corpus");
  std::vector<long long> matched(max_n, 0), total(max_n, 0);
  long long cand_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    BleuStats s = sentence_bleu_stats(candidates[i], references[i], max_n);
    for (int n = 0; n < max_n; ++n) {
      matched[n] += s.matched[n];
      total[n] += s.total[n];
    }
    long long c = static_cast<long long>(candidates[i].size());
    long long best = -1;
    for (const auto& ref : references[i]) {
      long long len = static_cast<long long>(ref.size());
      if (best < 0 || std::llabs(len - c) < std::llabs(best - c) ||
          (std::llabs(len - c) == std::llabs(best - c) && len < best))
        best = len;
    }
    cand_len += c;
    ref_len += best;
  }
  double log_sum = 0.0;
  int used_orders = 0;
  for (int n = 0; n < max_n; ++n) {
    if (total[n] == 0) continue;  // corpus shorter than n everywhere
    if (matched[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched[n]) /
                        static_cast<double>(total[n]));
    ++used_orders;
  }
  if (used_orders == 0) return 0.0;
  double bp = cand_len >= ref_len
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(ref_len) /
                                       static_cast<double>(cand_len));
  return bp * std::exp(log_sum / used_orders);
}

double chrf(const std::string& candidate, const std::string& reference,
            int max_n, double beta, bool remove_whitespace) {
  if (max_n < 1) throw Error("chrf: max_n must be >= 1");
  std::string cand = remove_whitespace ? strip_whitespace(candidate) : candidate;
  std::string ref = remove_whitespace ? strip_whitespace(reference) : reference;
  if (cand.empty() && ref.empty()) throw Error("chrf: both strings empty");
  if (cand.empty() || ref.empty()) return 0.0;

  double precision_sum = 0.0, recall_sum = 0.0;
  int p_orders = 0, r_orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    auto cc = char_ngram_counts(cand, n);
    auto rc = char_ngram_counts(ref, n);
    long long ct = total_count(cc), rt = total_count(rc);
    long long ov = overlap_count(cc, rc);
    if (ct > 0) {
      precision_sum += static_cast<double>(ov) / static_cast<double>(ct);
      ++p_orders;
    }
    if (rt > 0) {
      recall_sum += static_cast<double>(ov) / static_cast<double>(rt);
      ++r_orders;
    }
  }
  if (p_orders == 0 || r_orders == 0) return 0.0;
  double p = precision_sum / p_orders;
  double r = recall_sum / r_orders;
  double denom = beta * beta * p + r;
  if (denom == 0.0) return 0.0;
  return (1.0 + beta * beta) * p * r / denom;
}

double meteor_unigram(const std::string& candidate,
                      const std::string& reference, double alpha) {
  auto cand = words(candidate);
  auto ref = words(reference);
  if (cand.empty() || ref.empty()) return 0.0;
  auto cc = ngram_counts(cand, 1);
  auto rc = ngram_counts(ref, 1);
  long long m = overlap_count(cc, rc);
  if (m == 0) return 0.0;
  double p = static_cast<double>(m) / cand.size();
  double r = static_cast<double>(m) / ref.size();
  return p * r / (alpha * p + (1.0 - alpha) * r);
}

std::size_t levenshtein(const std::vector<std::string>& a,
                        const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double wer(const std::vector<std::string>& candidate,
           const std::vector<std::string>& reference) {
  if (reference.empty()) throw Error("wer: empty reference");
  return static_cast<double>(levenshtein(candidate, reference)) /
         static_cast<double>(reference.size());
}

double wer_text(const std::string& candidate, const std::string& reference) {
  return wer(words(candidate), words(reference));
}

double cer_text(const std::string& candidate, const std::string& reference) {
  std::vector<std::string> c, r;
  for (char ch : candidate) c.emplace_back(1, ch);
  for (char ch : reference) r.emplace_back(1, ch);
  if (r.empty()) throw Error("cer: empty reference");
  return static_cast<double>(levenshtein(c, r)) / static_cast<double>(r.size());
}

double paraphrase_similarity(const std::string& a, const std::string& b,
                             const EmbeddingProvider& provider) {
  auto va = provider.sentence_embed(a);
  auto vb = provider.sentence_embed(b);
  if (va.size() != vb.size())
    throw Error("paraphrase_similarity: provider width mismatch");
  if (va.empty()) throw Error("paraphrase_similarity: empty embedding");
  return cosine(va.data(), vb.data(), va.size());
}

BertScore bert_score(const std::string& a, const std::string& b,
                     const EmbeddingProvider& provider) {
  Mat ea = provider.token_embed(a);
  Mat eb = provider.token_embed(b);
  if (ea.rows == 0 || eb.rows == 0) throw Error("bert_score: empty token set");
  auto side = [](const Mat& x, const Mat& y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      double best = -1.0;
      for (std::size_t j = 0; j < y.rows; ++j)
        best = std::max(best, cosine(x.row(i), y.row(j), x.cols));
      sum += best;
    }
    return sum / static_cast<double>(x.rows);
  };
  BertScore s;
  s.precision = side(ea, eb);
  s.recall = side(eb, ea);
  double denom = s.precision + s.recall;
  s.f1 = denom == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / denom;
  return s;
}

MetricReport full_report(const std::string& reference,
                         const std::string& candidate,
                         const EmbeddingProvider& provider) {
  MetricReport r;
  auto ref_words = words(reference);
  auto cand_words = words(candidate);
  r.bleu = sentence_bleu(cand_words, {ref_words});
  r.chrf = chrf(candidate, reference);
  r.meteor = meteor_unigram(candidate, reference);
  r.wer = wer(cand_words, ref_words);
  r.paraphrase_sim = paraphrase_similarity(reference, candidate, provider);
  BertScore bs = bert_score(candidate, reference, provider);
  r.bert_score_precision = bs.precision;
  r.bert_score_recall = bs.recall;
  r.bert_score_f1 = bs.f1;
  return r;
}

}  // namespace metrics
}  // namespace advmt
