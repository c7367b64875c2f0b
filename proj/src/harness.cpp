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

#include "advmt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "advmt/grad_attack.hpp"
#include "advmt/metrics.hpp"
#include "advmt/perturb.hpp"

namespace advmt {

namespace {

using json = nlohmann::json;

json edit_to_json(const EditLogEntry& e) {
  json j;
  j["kind"] = e.kind;
  j["position"] = e.position;
  j["old_value"] = e.old_value;
  j["new_value"] = e.new_value;
  if (e.old_id >= 0) j["old_id"] = e.old_id;
  if (e.new_id >= 0) j["new_id"] = e.new_id;
  j["score"] = e.score;
  if (e.skipped) j["skipped"] = true;
  if (!e.params.empty()) j["params"] = e.params;
  return j;
}

EditLogEntry edit_from_json(const json& j) {
  EditLogEntry e;
  e.kind = j.value("kind", "");
  e.position = j.value("position", std::int64_t{-1});
  e.old_value = j.value("old_value", "");
  e.new_value = j.value("new_value", "");
  e.old_id = j.value("old_id", std::int64_t{-1});
  e.new_id = j.value("new_id", std::int64_t{-1});
  e.score = j.value("score", 0.0);
  e.skipped = j.value("skipped", false);
  if (j.contains("params"))
    e.params = j.at("params").get<std::map<std::string, std::string>>();
  return e;
}

std::string store_key(const std::string& attack, const std::string& label,
                      std::int64_t sentence_index) {
  return attack + "\x1f" + label + "\x1f" + std::to_string(sentence_index);
}

double parse_double(const std::map<std::string, std::string>& params,
                    const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("attack param " + key + " is not a number: " +
                      it->second);
  }
}

long parse_long(const std::map<std::string, std::string>& params,
                const std::string& key, long fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw ConfigError("attack param " + key + " is not an integer: " +
                      it->second);
  }
}

std::string parse_string(const std::map<std::string, std::string>& params,
                         const std::string& key, const std::string& fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

PerturbBudget budget_from_params(
    const std::map<std::string, std::string>& params, std::uint64_t seed) {
  PerturbBudget b;
  std::string mode = parse_string(params, "budget_mode", "fraction_of_words");
  if (mode == "fraction_of_words")
    b.mode = PerturbBudget::Mode::kFractionOfWords;
  else if (mode == "fraction_of_chars")
    b.mode = PerturbBudget::Mode::kFractionOfChars;
  else if (mode == "max_operations")
    b.mode = PerturbBudget::Mode::kMaxOperations;
  else
    throw ConfigError("unknown budget_mode: " + mode);
  b.value = parse_double(params, "budget", 0.0);
  b.seed = seed;
  return b;
}

GradAttackConfig grad_config_from_params(
    const std::map<std::string, std::string>& params) {
  GradAttackConfig cfg;
  cfg.max_flips = static_cast<int>(parse_long(params, "max_flips", 3));
  cfg.constraints.cosine_threshold =
      parse_double(params, "cosine_threshold", 0.4);
  std::string rule = parse_string(params, "cosine_rule", "max_distance");
  if (rule == "max_distance")
    cfg.constraints.cosine_rule = CosineRule::kMaxDistance;
  else if (rule == "min_distance")
    cfg.constraints.cosine_rule = CosineRule::kMinDistance;
  else
    throw ConfigError("unknown cosine_rule: " + rule);
  cfg.constraints.one_flip_per_position =
      parse_long(params, "one_flip_per_position", 1) != 0;
  cfg.constraints.respect_word_initial_partition =
      parse_long(params, "respect_word_initial_partition", 1) != 0;
  std::string mode = parse_string(params, "loss_mode", "vs_model_translation");
  if (mode == "vs_model_translation")
    cfg.loss_mode = LossMode::kVsModelTranslation;
  else if (mode == "vs_reference")
    cfg.loss_mode = LossMode::kVsReference;
  else
    throw ConfigError("unknown loss_mode: " + mode);
  return cfg;
}

std::vector<std::string> split_list(const std::string& spec, char sep) {
  std::vector<std::string> out;
  std::istringstream in(spec);
  std::string part;
  while (std::getline(in, part, sep)) {
    // trim
    std::size_t a = part.find_first_not_of(" \t");
    std::size_t b = part.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(part.substr(a, b - a + 1));
  }
  return out;
}

double mean_or_median(std::vector<double> values, AggregateStat stat) {
  if (values.empty()) throw Error("aggregate: empty value set");
  if (stat == AggregateStat::kMean) {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::vector<SentencePair> load_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("corpus not readable: " + path);
  std::vector<SentencePair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("src"))
      throw ConfigError("corpus line " + std::to_string(lineno) +
                        " is not a {\"src\", \"ref\"} object");
    out.push_back({j.at("src").get<std::string>(), j.value("ref", "")});
  }
  return out;
}

void save_corpus_jsonl(const std::vector<SentencePair>& corpus,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("corpus not writable: " + path);
  for (const auto& p : corpus) {
    json j;
    j["src"] = p.src;
    j["ref"] = p.ref;
    out << j.dump() << "\n";
  }
}

std::string record_to_json(const AttackRecord& rec) {
  json j;
  j["attack_name"] = rec.attack_name;
  j["hyperparams"] = rec.hyperparams;
  j["x"] = rec.x;
  j["x_att"] = rec.x_att;
  j["y"] = rec.y;
  j["y_att"] = rec.y_att;
  json edits = json::array();
  for (const auto& e : rec.edit_log) edits.push_back(edit_to_json(e));
  j["edit_log"] = std::move(edits);
  j["seed"] = rec.seed;
  j["model_id"] = rec.model_id;
  j["timing_ms"] = rec.timing_ms;
  j["latent_space"] = rec.latent_space;
  j["stop_reason"] = rec.stop_reason;
  if (!rec.trajectory.empty()) j["trajectory"] = rec.trajectory;
  j["record_id"] = rec.record_id;
  j["grid_label"] = rec.grid_label;
  j["sentence_index"] = rec.sentence_index;
  return j.dump();
}

AttackRecord record_from_json(const std::string& line) {
  json j = json::parse(line);
  AttackRecord rec;
  rec.attack_name = j.value("attack_name", "");
  if (j.contains("hyperparams"))
    rec.hyperparams =
        j.at("hyperparams").get<std::map<std::string, std::string>>();
  rec.x = j.value("x", "");
  rec.x_att = j.value("x_att", "");
  rec.y = j.value("y", "");
  rec.y_att = j.value("y_att", "");
  if (j.contains("edit_log"))
    for (const auto& e : j.at("edit_log")) rec.edit_log.push_back(edit_from_json(e));
  rec.seed = j.value("seed", std::uint64_t{0});
  rec.model_id = j.value("model_id", "");
  rec.timing_ms = j.value("timing_ms", 0.0);
  rec.latent_space = j.value("latent_space", false);
  rec.stop_reason = j.value("stop_reason", "");
  if (j.contains("trajectory"))
    rec.trajectory = j.at("trajectory").get<std::vector<double>>();
  rec.record_id = j.value("record_id", std::int64_t{-1});
  rec.grid_label = j.value("grid_label", "");
  rec.sentence_index = j.value("sentence_index", std::int64_t{-1});
  return rec;
}

RecordStore::RecordStore(const std::string& path) : path_(path) {
  std::ifstream in(path);
  if (in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      AttackRecord rec = record_from_json(line);
      next_id_ = std::max(next_id_, rec.record_id + 1);
      keys_[store_key(rec.attack_name, rec.grid_label, rec.sentence_index)] =
          true;
      records_.push_back(std::move(rec));
    }
  }
  out_.open(path, std::ios::app);
  if (!out_) throw Error("record store not writable: " + path);
}

bool RecordStore::contains(const std::string& attack,
                           const std::string& grid_label,
                           std::int64_t sentence_index) const {
  return keys_.count(store_key(attack, grid_label, sentence_index)) > 0;
}

void RecordStore::append(AttackRecord rec) {
  rec.record_id = next_id_++;
  out_ << record_to_json(rec) << "\n";
  out_.flush();
  keys_[store_key(rec.attack_name, rec.grid_label, rec.sentence_index)] = true;
  records_.push_back(std::move(rec));
}

std::vector<AttackRecord> RecordStore::read_all(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("record store not readable: " + path);
  std::vector<AttackRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(record_from_json(line));
  }
  return out;
}

std::vector<GridPoint> parse_grid(const std::string& spec) {
  std::vector<GridPoint> grid;
  for (const auto& point : split_list(spec, '|')) {
    GridPoint gp;
    std::string body = point;
    // optional "label:" prefix (a label may not contain '=')
    auto colon = point.find(':');
    auto eq = point.find('=');
    if (colon != std::string::npos &&
        (eq == std::string::npos || colon < eq)) {
      gp.label = point.substr(0, colon);
      body = point.substr(colon + 1);
    } else {
      gp.label = point;
    }
    for (const auto& kv : split_list(body, ',')) {
      auto e = kv.find('=');
      if (e == std::string::npos)
        throw ConfigError("grid point entry is not key=value: " + kv);
      gp.params[kv.substr(0, e)] = kv.substr(e + 1);
    }
    grid.push_back(std::move(gp));
  }
  if (grid.empty()) throw ConfigError("attack grid is empty");
  return grid;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t grid_index,
                          std::uint64_t sentence_index) {
  // splitmix64 over the packed key
  std::uint64_t x = base ^ (grid_index * 0x9E3779B97F4A7C15ULL) ^
                    (sentence_index * 0xBF58476D1CE4E5B9ULL);
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

AttackRecord run_single_attack(const std::string& attack_name,
                               const std::map<std::string, std::string>& params,
                               const SentencePair& sentence,
                               const AttackContext& ctx, std::uint64_t seed) {
  if (ctx.model == nullptr) throw Error("run_single_attack: no model");
  const ModelAdapter& model = *ctx.model;

  auto translate_text = [&](const std::string& text) {
    return model.translate(model.tokenize(text)).text;
  };

  auto perturbation_record = [&](InputPerturbation pert,
                                 const char* name) {
    AttackRecord rec;
    rec.attack_name = name;
    rec.model_id = model.model_id();
    rec.x = sentence.src;
    rec.x_att = pert.x_att;
    rec.edit_log = std::move(pert.ops);
    rec.y = translate_text(sentence.src);
    rec.y_att = pert.x_att == sentence.src ? rec.y : translate_text(pert.x_att);
    rec.stop_reason = "budget_exhausted";
    for (const auto& [k, v] : params) rec.hyperparams[k] = v;
    return rec;
  };

  AttackRecord rec;
  if (attack_name == "identity") {
    rec.attack_name = "identity";
    rec.model_id = model.model_id();
    rec.x = rec.x_att = sentence.src;
    rec.y = rec.y_att = translate_text(sentence.src);
    rec.stop_reason = "identity";
  } else if (attack_name == "synthetic") {
    PerturbBudget budget = budget_from_params(params, seed);
    OpMix mix = default_op_mix();
    if (parse_long(params, "include_full_shuffle", 0) != 0)
      mix[PerturbKind::kFullCharShuffle] = 1.0;
    rec = perturbation_record(synthetic_attack(sentence.src, budget, mix),
                              "synthetic");
  } else if (attack_name == "char_swap") {
    PerturbBudget budget = budget_from_params(params, seed);
    rec = perturbation_record(char_swap_attack(sentence.src, budget),
                              "char_swap");
  } else if (attack_name == "full_shuffle") {
    rec = perturbation_record(full_shuffle_attack(sentence.src, seed),
                              "full_shuffle");
  } else if (attack_name == "gradient" || attack_name == "char_grad") {
    GradAttackConfig cfg = grad_config_from_params(params);
    TokenizedText src = model.tokenize(sentence.src);
    TokenizedText ref;
    const TokenizedText* ref_ptr = nullptr;
    if (cfg.loss_mode == LossMode::kVsReference) {
      ref = model.tokenize(sentence.ref);
      ref_ptr = &ref;
    }
    rec = attack_name == "gradient"
              ? gradient_attack(src, model, cfg, ref_ptr)
              : char_grad_attack(src, model, cfg, ref_ptr);
    for (const auto& [k, v] : params) rec.hyperparams[k] = v;
  } else if (attack_name == "bleuer") {
    if (ctx.head == nullptr) throw Error("bleuer attack needs a trained head");
    LatentAttackConfig cfg;
    cfg.epsilon = parse_double(params, "epsilon", 1e-2);
    cfg.steps = static_cast<int>(parse_long(params, "steps", 10));
    cfg.target = parse_double(params, "target", 1.0);
    rec = bleuer_attack(model.tokenize(sentence.src), model, *ctx.head, cfg);
    for (const auto& [k, v] : params) rec.hyperparams[k] = v;
  } else if (attack_name == "mbart") {
    if (ctx.head == nullptr) throw Error("mbart attack needs a trained head");
    GradAttackConfig cfg = grad_config_from_params(params);
    rec = mbart_attack(model.tokenize(sentence.src), model, *ctx.head, cfg);
    for (const auto& [k, v] : params) rec.hyperparams[k] = v;
  } else if (attack_name == "prefix") {
    std::string pool_spec = parse_string(params, "pool", "");
    if (pool_spec.empty())
      throw ConfigError("prefix attack needs a 'pool' param (comma words)");
    std::vector<std::string> pool = split_list(pool_spec, ';');
    if (pool.size() == 1) pool = split_list(pool_spec, ',');
    int k = static_cast<int>(parse_long(params, "k", 1));
    rec = prefix_attack(sentence.src, model, pool, k);
    for (const auto& [kk, v] : params) rec.hyperparams[kk] = v;
  } else if (attack_name == "swls") {
    if (ctx.reverse_model == nullptr)
      throw Error("swls attack needs a reverse model");
    SwlsConfig cfg;
    cfg.budget = budget_from_params(params, seed);
    cfg.candidates_per_step =
        static_cast<int>(parse_long(params, "candidates_per_step", 16));
    rec = swls_attack(sentence.src, model, *ctx.reverse_model, cfg);
    for (const auto& [k, v] : params) rec.hyperparams[k] = v;
  } else {
    throw ConfigError("unknown attack: " + attack_name);
  }
  rec.seed = seed;
  return rec;
}

SweepResult run_sweep(const std::vector<SentencePair>& corpus,
                      const AttackContext& ctx, const std::string& attack_name,
                      const std::vector<GridPoint>& grid, RecordStore& store,
                      const SweepOptions& options) {
  if (grid.empty()) throw ConfigError("run_sweep: empty grid");
  if (corpus.empty()) throw ConfigError("run_sweep: empty corpus");
  SweepResult result;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      auto sentence_index = static_cast<std::int64_t>(s);
      if (options.resume &&
          store.contains(attack_name, grid[g].label, sentence_index)) {
        ++result.skipped;
        continue;
      }
      std::uint64_t seed = derive_seed(options.base_seed, g, s);
      try {
        AttackRecord rec =
            run_single_attack(attack_name, grid[g].params, corpus[s], ctx, seed);
        rec.grid_label = grid[g].label;
        rec.sentence_index = sentence_index;
        store.append(std::move(rec));
        ++result.written;
      } catch (const GatewayError&) {
        throw;  // model unavailable: abort the sweep
      } catch (const std::exception& ex) {
        ++result.failed;
        std::ostringstream msg;
        msg << attack_name << "[" << grid[g].label << "] sentence " << s
            << ": " << ex.what();
        result.failures.push_back(msg.str());
        std::cerr << "warning: " << msg.str() << "\n";
      }
    }
  }
  return result;
}

bool metric_is_distance(const std::string& metric) { return metric == "wer"; }

std::vector<SimilarityPair> similarity_pairs(const AttackRecord& rec,
                                             const EmbeddingProvider& provider) {
  metrics::MetricReport in = metrics::full_report(rec.x, rec.x_att, provider);
  metrics::MetricReport out = metrics::full_report(rec.y, rec.y_att, provider);
  auto pick = [](const metrics::MetricReport& r, const std::string& name) {
    if (name == "bleu") return r.bleu;
    if (name == "chrf") return r.chrf;
    if (name == "meteor") return r.meteor;
    if (name == "wer") return r.wer;
    if (name == "paraphrase") return r.paraphrase_sim;
    if (name == "bertscore") return r.bert_score_f1;
    throw Error("unknown metric: " + name);
  };
  std::vector<SimilarityPair> pairs;
  for (const auto& name : metric_names())
    pairs.push_back({name, pick(in, name), pick(out, name)});
  return pairs;
}

std::vector<ParetoPoint> aggregate(const std::vector<AttackRecord>& records,
                                   const std::string& metric,
                                   const EmbeddingProvider& provider,
                                   AggregateStat stat) {
  if (records.empty()) throw Error("aggregate: empty record set");
  const std::string& attack = records.front().attack_name;
  for (const auto& r : records)
    if (r.attack_name != attack)
      throw Error("aggregate: records mix attacks " + attack + " and " +
                  r.attack_name);

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
      by_label;
  for (const auto& rec : records) {
    for (const auto& pair : similarity_pairs(rec, provider)) {
      if (pair.metric_name != metric) continue;
      by_label[rec.grid_label].first.push_back(pair.sim_input);
      by_label[rec.grid_label].second.push_back(pair.sim_output);
    }
  }
  std::vector<ParetoPoint> out;
  for (auto& [label, values] : by_label) {
    ParetoPoint p;
    p.label = label;
    p.count = values.first.size();
    p.sim_input = mean_or_median(values.first, stat);
    p.sim_output = mean_or_median(values.second, stat);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ParetoPoint> pareto_frontier(
    const std::vector<ParetoPoint>& points) {
  for (const auto& p : points)
    if (!std::isfinite(p.sim_input) || !std::isfinite(p.sim_output))
      throw Error("pareto_frontier: non-finite coordinate");
  std::vector<ParetoPoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) {
                     if (a.sim_input != b.sim_input)
                       return a.sim_input > b.sim_input;
                     return a.sim_output < b.sim_output;
                   });
  std::vector<ParetoPoint> frontier;
  // Sweep groups of equal sim_input in descending order; a point survives
  // iff it has the minimum sim_output within its group and beats the
  // strictly-better-input minimum (ties there are dominated via the
  // strict input coordinate).
  double best_prev = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].sim_input == sorted[i].sim_input) ++j;
    double group_min = sorted[i].sim_output;  // sorted ascending inside group
    if (group_min < best_prev) {
      for (std::size_t k = i; k < j; ++k)
        if (sorted[k].sim_output == group_min) frontier.push_back(sorted[k]);
      best_prev = group_min;
    }
    i = j;
  }
  return frontier;
}

std::vector<ParetoPoint> oriented_frontier(
    const std::vector<ParetoPoint>& points, const std::string& metric) {
  if (!metric_is_distance(metric)) return pareto_frontier(points);
  std::vector<ParetoPoint> flipped = points;
  for (auto& p : flipped) {
    p.sim_input = -p.sim_input;
    p.sim_output = -p.sim_output;
  }
  std::vector<ParetoPoint> front = pareto_frontier(flipped);
  for (auto& p : front) {
    p.sim_input = -p.sim_input;
    p.sim_output = -p.sim_output;
  }
  return front;
}

std::vector<DeltaRow> delta_table(
    const std::map<std::string, std::vector<AttackRecord>>& stores_by_attack,
    const std::vector<std::string>& metric_list,
    const EmbeddingProvider& provider) {
  std::vector<DeltaRow> rows;
  for (const auto& metric : metric_list) {
    for (const auto& [attack, records] : stores_by_attack) {
      if (records.empty()) continue;
      auto points = aggregate(records, metric, provider);
      if (points.empty()) continue;
      bool distance = metric_is_distance(metric);
      const ParetoPoint* best = nullptr;
      double best_oriented = 0.0;
      for (const auto& p : points) {
        double delta = p.sim_input - p.sim_output;
        double oriented = distance ? -delta : delta;
        if (!best || oriented > best_oriented) {
          best = &p;
          best_oriented = oriented;
        }
      }
      DeltaRow row;
      row.metric_name = metric;
      row.attack_name = attack;
      row.best_label = best->label;
      row.delta = best->sim_input - best->sim_output;
      row.mean_sim_input = best->sim_input;
      row.mean_sim_output = best->sim_output;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace advmt
