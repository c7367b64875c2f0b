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

#ifndef ADVMT_METRICS_HPP_
#define ADVMT_METRICS_HPP_

#include <string>
#include <vector>

#include "advmt/embedding.hpp"
#include "advmt/types.hpp"

namespace advmt {
namespace metrics {

// Word-level metrics run on NFC + lowercased text (ASCII fold here);
// character metrics keep case.
std::string normalize_text(const std::string& text);
std::vector<std::string> words(const std::string& text);

struct BleuStats {
  std::vector<double> precisions;  // clipped p_n, unsmoothed (0 when no match)
  std::vector<long long> matched;  // clipped match count per order
  std::vector<long long> total;    // candidate n-gram count per order
  double brevity_penalty = 1.0;
  double score = 0.0;              // smoothed sentence BLEU
};

// Sentence BLEU: geometric mean of clipped n-gram precisions times the
// brevity penalty. Orders longer than the candidate are skipped; a zero
// match count is replaced by `epsilon` so sentence scores stay finite
// (the surrogate-head training targets need that).
BleuStats sentence_bleu_stats(const std::vector<std::string>& candidate,
                              const std::vector<std::vector<std::string>>& references,
                              int max_n = 4, double epsilon = 1e-9);
double sentence_bleu(const std::vector<std::string>& candidate,
                     const std::vector<std::vector<std::string>>& references,
                     int max_n = 4, double epsilon = 1e-9);

// Corpus BLEU over aggregated counts, unsmoothed.
double corpus_bleu(const std::vector<std::vector<std::string>>& candidates,
                   const std::vector<std::vector<std::vector<std::string>>>& references,
                   int max_n = 4);

// Character n-gram F-beta. Whitespace is removed before extraction when
// remove_whitespace is set (the default).
double chrf(const std::string& candidate, const std::string& reference,
            int max_n = 6, double beta = 2.0, bool remove_whitespace = true);

// Unigram F-score, alpha weighting precision in the harmonic mean
// (alpha = 0.9 leans toward recall). No stemming or synonym stages.
double meteor_unigram(const std::string& candidate,
                      const std::string& reference, double alpha = 0.9);

// Word-level edit distance over reference length. Throws on an empty
// reference.
double wer(const std::vector<std::string>& candidate,
           const std::vector<std::string>& reference);
double wer_text(const std::string& candidate, const std::string& reference);
// Character-granularity variant (see the word/char ambiguity note in the
// README); not used by the harness default.
double cer_text(const std::string& candidate, const std::string& reference);

std::size_t levenshtein(const std::vector<std::string>& a,
                        const std::vector<std::string>& b);

double paraphrase_similarity(const std::string& a, const std::string& b,
                             const EmbeddingProvider& provider);

struct BertScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Greedy max-cosine token matching; precision averages over a's tokens.
BertScore bert_score(const std::string& a, const std::string& b,
                     const EmbeddingProvider& provider);

struct MetricReport {
  double bleu = 0.0;
  double chrf = 0.0;
  double meteor = 0.0;
  double wer = 0.0;
  double paraphrase_sim = 0.0;
  double bert_score_precision = 0.0;
  double bert_score_recall = 0.0;
  double bert_score_f1 = 0.0;
};

// All six metrics of one (reference, candidate) pair; candidate plays
// the hypothesis side everywhere.
MetricReport full_report(const std::string& reference,
                         const std::string& candidate,
                         const EmbeddingProvider& provider);

}  // namespace metrics
}  // namespace advmt

#endif  // ADVMT_METRICS_HPP_
