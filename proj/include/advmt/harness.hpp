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

#ifndef ADVMT_HARNESS_HPP_
#define ADVMT_HARNESS_HPP_

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advmt/adapter.hpp"
#include "advmt/embedding.hpp"
#include "advmt/record.hpp"
#include "advmt/surrogate.hpp"

namespace advmt {

struct SentencePair {
  std::string src;
  std::string ref;
};

// Corpus format: UTF-8 JSONL, one {"src": ..., "ref": ...} per line.
std::vector<SentencePair> load_corpus_jsonl(const std::string& path);
void save_corpus_jsonl(const std::vector<SentencePair>& corpus,
                       const std::string& path);

std::string record_to_json(const AttackRecord& rec);
AttackRecord record_from_json(const std::string& line);

// Append-only JSONL store with monotonically increasing record ids.
// Resumability keys on (attack, grid_label, sentence_index).
class RecordStore {
 public:
  explicit RecordStore(const std::string& path);

  bool contains(const std::string& attack, const std::string& grid_label,
                std::int64_t sentence_index) const;
  // Assigns the record id and persists the record immediately.
  void append(AttackRecord rec);

  const std::vector<AttackRecord>& records() const { return records_; }
  const std::string& path() const { return path_; }

  static std::vector<AttackRecord> read_all(const std::string& path);

 private:
  std::string path_;
  std::ofstream out_;
  std::vector<AttackRecord> records_;
  std::map<std::string, bool> keys_;
  std::int64_t next_id_ = 0;
};

// One grid point of a hyperparameter sweep; label is carried into every
// record verbatim.
struct GridPoint {
  std::string label;
  std::map<std::string, std::string> params;
};

// "label:k=v,k=v | label2:..." or just "k=v,k=v|..." (label defaults to
// the param string).
std::vector<GridPoint> parse_grid(const std::string& spec);

// Everything an attack dispatch might need beyond the model itself.
struct AttackContext {
  const ModelAdapter* model = nullptr;
  const ModelAdapter* reverse_model = nullptr;  // swls
  const BleuHead* head = nullptr;               // bleuer / mbart
};

// Runs one named attack on one sentence. Attacks: identity, synthetic,
// char_swap, full_shuffle, gradient, char_grad, bleuer, mbart, prefix,
// swls.
AttackRecord run_single_attack(const std::string& attack_name,
                               const std::map<std::string, std::string>& params,
                               const SentencePair& sentence,
                               const AttackContext& ctx, std::uint64_t seed);

struct SweepOptions {
  std::uint64_t base_seed = 0;
  bool resume = true;
};

struct SweepResult {
  std::size_t written = 0;
  std::size_t skipped = 0;  // already present (resume)
  std::size_t failed = 0;   // per-sentence failures, logged not fatal
  std::vector<std::string> failures;
};

// One record per (grid point, sentence). Per-sentence errors are logged
// and counted; model unavailability (GatewayError) aborts.
SweepResult run_sweep(const std::vector<SentencePair>& corpus,
                      const AttackContext& ctx, const std::string& attack_name,
                      const std::vector<GridPoint>& grid, RecordStore& store,
                      const SweepOptions& options);

// Deterministic per-record seed derivation.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t grid_index,
                          std::uint64_t sentence_index);

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> kNames = {
      "bleu", "chrf", "meteor", "wer", "paraphrase", "bertscore"};
  return kNames;
}

// WER is a distance; its coordinates are negated before dominance
// analysis and reported raw everywhere else.
bool metric_is_distance(const std::string& metric);

std::vector<SimilarityPair> similarity_pairs(const AttackRecord& rec,
                                             const EmbeddingProvider& provider);

struct ParetoPoint {
  double sim_input = 0.0;
  double sim_output = 0.0;
  std::string label;
  std::size_t count = 0;  // records aggregated into the point
};

enum class AggregateStat { kMean, kMedian };

// One point per grid label: mean (or median) sim_input / sim_output over
// the label's records for the given metric. All records must share one
// attack name.
std::vector<ParetoPoint> aggregate(const std::vector<AttackRecord>& records,
                                   const std::string& metric,
                                   const EmbeddingProvider& provider,
                                   AggregateStat stat = AggregateStat::kMean);

// Non-dominated subset, sorted by sim_input descending. A dominates B iff
// A.sim_input >= B.sim_input and A.sim_output <= B.sim_output with one
// strict.
std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points);

// Frontier with the dominance direction oriented per metric (WER
// coordinates negated first, reported raw).
std::vector<ParetoPoint> oriented_frontier(
    const std::vector<ParetoPoint>& points, const std::string& metric);

struct DeltaRow {
  std::string metric_name;
  std::string attack_name;
  std::string best_label;
  double delta = 0.0;  // mean sim_input - mean sim_output at best setting
  double mean_sim_input = 0.0;
  double mean_sim_output = 0.0;
};

// Best setting per (attack, metric): the grid point with the largest
// oriented delta (similarities maximize input-minus-output, WER the
// opposite).
std::vector<DeltaRow> delta_table(
    const std::map<std::string, std::vector<AttackRecord>>& stores_by_attack,
    const std::vector<std::string>& metrics,
    const EmbeddingProvider& provider);

struct FrontierBundle {
  std::string metric;
  // attack name -> all aggregated points (frontier flag resolved on render)
  std::map<std::string, std::vector<ParetoPoint>> points_by_attack;
};

// Frontier CSVs, SVG charts and a markdown report with the delta table
// and appendix-style sample records.
void render_report(const std::vector<FrontierBundle>& frontiers,
                   const std::vector<DeltaRow>& deltas,
                   const std::vector<AttackRecord>& samples,
                   const std::string& out_dir);

}  // namespace advmt

#endif  // ADVMT_HARNESS_HPP_
