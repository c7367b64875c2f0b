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

#include "advmt/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "advmt/embedding.hpp"
#include "advmt/harness.hpp"
#include "advmt/surrogate.hpp"
#include "advmt/toy_model.hpp"
#include "advmt/wire.hpp"

namespace advmt {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::unique_ptr<ToyModelAdapter> build_toy(const Config& config) {
  if (config.has("model.path")) {
    std::string path = config.get("model.path");
    if (!fs::exists(path))
      throw ConfigError("model.path does not exist: " + path);
    LoadedToyModel loaded = load_toy_model(path);
    std::unordered_set<std::string> stopwords =
        config.has("model.stopwords")
            ? load_stopwords(config.get("model.stopwords"))
            : default_stopwords();
    return std::make_unique<ToyModelAdapter>(std::move(loaded.model),
                                             std::move(loaded.vocab_tokens),
                                             std::move(stopwords));
  }
  return make_default_toy_adapter(
      static_cast<std::uint64_t>(config.get_int("model.seed", 7)),
      config.get_int("model.shift", 2),
      static_cast<std::size_t>(config.get_int("model.dim", 16)),
      config.get_double("model.temperature", 0.25));
}

void write_manifest(const Config& config, const fs::path& out_dir,
                    const std::string& model_id) {
  json m;
  m["config_hash"] = config.hash();
  m["tool_version"] = kToolVersion;
  m["seed"] = config.get_or("seed", "0");
  m["model_id"] = model_id;
  m["attack"] = config.get_or("attack.name", "");
  m["corpus"] = config.get_or("corpus.path", "");
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw Error("cannot write manifest in " + out_dir.string());
  out << m.dump(2) << "\n";
}

std::map<std::string, std::vector<AttackRecord>> records_by_attack(
    const std::vector<std::string>& store_paths) {
  std::map<std::string, std::vector<AttackRecord>> by_attack;
  for (const auto& path : store_paths) {
    if (!fs::exists(path))
      throw ConfigError("record store does not exist: " + path);
    for (auto& rec : RecordStore::read_all(path))
      by_attack[rec.attack_name].push_back(std::move(rec));
  }
  return by_attack;
}

std::vector<FrontierBundle> build_bundles(
    const std::map<std::string, std::vector<AttackRecord>>& by_attack,
    const EmbeddingProvider& provider) {
  std::vector<FrontierBundle> bundles;
  for (const auto& metric : metric_names()) {
    FrontierBundle bundle;
    bundle.metric = metric;
    for (const auto& [attack, records] : by_attack)
      bundle.points_by_attack[attack] = aggregate(records, metric, provider);
    bundles.push_back(std::move(bundle));
  }
  return bundles;
}

}  // namespace

std::unique_ptr<ModelAdapter> build_model(const Config& config) {
  const char* env_url = std::getenv(kModelUrlEnvVar);
  if (env_url != nullptr && *env_url != '\0')
    return std::make_unique<WireClient>(env_url);
  std::string kind = config.get_or("model.kind", "toy");
  if (kind == "toy") return build_toy(config);
  if (kind == "remote")
    return std::make_unique<WireClient>(config.get("model.endpoint"));
  throw ConfigError("model.kind must be 'toy' or 'remote', got: " + kind);
}

int cmd_attack(Config config, std::uint64_t seed, bool resume) {
  config.set("seed", std::to_string(seed));

  std::string corpus_path = config.get("corpus.path");
  if (!fs::exists(corpus_path))
    throw ConfigError("corpus.path does not exist: " + corpus_path);
  std::string attack_name = config.get("attack.name");
  std::vector<GridPoint> grid = parse_grid(config.get("attack.grid"));
  // Static attack.param.* keys apply to every grid point unless the
  // point overrides them.
  for (const auto& [key, value] : config.values()) {
    const std::string prefix = "attack.param.";
    if (key.rfind(prefix, 0) == 0) {
      std::string name = key.substr(prefix.size());
      for (auto& gp : grid)
        if (!gp.params.count(name)) gp.params[name] = value;
    }
  }

  fs::path out_dir(config.get("output.dir"));
  fs::create_directories(out_dir);

  std::unique_ptr<ModelAdapter> model = build_model(config);
  AttackContext ctx;
  ctx.model = model.get();

  std::unique_ptr<ModelAdapter> reverse;
  if (attack_name == "swls") {
    if (auto* toy = dynamic_cast<ToyModelAdapter*>(model.get())) {
      reverse = toy->reverse();
    } else if (config.has("model.reverse_endpoint")) {
      reverse = std::make_unique<WireClient>(config.get("model.reverse_endpoint"));
    } else {
      throw ConfigError(
          "swls needs model.reverse_endpoint for remote models");
    }
    ctx.reverse_model = reverse.get();
  }

  BleuHead head;
  if (attack_name == "bleuer" || attack_name == "mbart") {
    std::string head_path = config.get("head.path");
    if (!fs::exists(head_path))
      throw ConfigError("head.path does not exist: " + head_path);
    head = BleuHead::load(head_path);
    ctx.head = &head;
  }

  auto corpus = load_corpus_jsonl(corpus_path);
  RecordStore store((out_dir / "records.jsonl").string());
  write_manifest(config, out_dir, model->model_id());

  SweepOptions options;
  options.base_seed = seed;
  options.resume = resume;
  SweepResult result = run_sweep(corpus, ctx, attack_name, grid, store, options);

  std::cout << "attack " << attack_name << ": " << result.written
            << " records written, " << result.skipped << " skipped, "
            << result.failed << " failed -> " << store.path() << "\n";
  return result.failed == 0 ? kExitOk : kExitPartial;
}

int cmd_train_head(const Config& config) {
  std::string corpus_path = config.get("corpus.path");
  if (!fs::exists(corpus_path))
    throw ConfigError("corpus.path does not exist: " + corpus_path);
  fs::path out_dir(config.get("output.dir"));
  fs::create_directories(out_dir);

  std::unique_ptr<ModelAdapter> model = build_model(config);
  auto corpus = load_corpus_jsonl(corpus_path);
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(corpus.size());
  for (const auto& p : corpus) pairs.emplace_back(p.src, p.ref);

  HeadTargetMetric target = HeadTargetMetric::kBleu;
  std::string target_name = config.get_or("head.target", "bleu");
  std::unique_ptr<EmbeddingProvider> provider;
  if (target_name == "bleu") {
    target = HeadTargetMetric::kBleu;
  } else if (target_name == "bertscore") {
    target = HeadTargetMetric::kBertScore;
    provider = make_embedding_provider(
        config.get_or("embedding.provider", "hashing:256"));
  } else if (target_name == "chrf") {
    target = HeadTargetMetric::kChrf;
  } else {
    throw ConfigError("head.target must be bleu, bertscore or chrf, got: " +
                      target_name);
  }

  auto dataset = build_head_dataset(pairs, *model, target, provider.get());

  HeadTrainConfig train_cfg;
  train_cfg.learning_rate = config.get_double("train.learning_rate", 5e-3);
  train_cfg.epochs = static_cast<int>(config.get_int("train.epochs", 150));
  train_cfg.batch_size =
      static_cast<int>(config.get_int("train.batch_size", 32));
  train_cfg.validation_fraction =
      config.get_double("train.validation_fraction", 0.2);
  train_cfg.seed = static_cast<std::uint64_t>(config.get_int("seed", 1));
  if (config.has("train.hidden_widths")) {
    train_cfg.hidden_widths.clear();
    std::istringstream in(config.get("train.hidden_widths"));
    std::string part;
    while (std::getline(in, part, ','))
      train_cfg.hidden_widths.push_back(std::stoul(part));
  }

  TrainedHead trained = train_head(dataset, train_cfg);
  trained.head.save((out_dir / "head.json").string());

  json report;
  report["config_hash"] = config.hash();
  report["tool_version"] = kToolVersion;
  report["n_examples"] = dataset.size();
  report["n_train"] = trained.report.n_train;
  report["n_val"] = trained.report.n_val;
  report["train_mse"] = trained.report.train_mse;
  report["val_mse"] = trained.report.val_mse;
  report["degenerate_dataset"] = trained.report.degenerate_dataset;
  report["trained"] = trained.report.trained;
  std::ofstream rep(out_dir / "head_report.json");
  rep << report.dump(2) << "\n";

  double final_val = trained.report.val_mse.empty()
                         ? -1.0
                         : trained.report.val_mse.back();
  std::cout << "trained head on " << dataset.size() << " examples; final "
            << "validation MSE "
            << (final_val < 0 ? "n/a (zero epochs)" : std::to_string(final_val))
            << " -> " << (out_dir / "head.json").string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& store_path, const std::string& out_dir,
                 const std::string& provider_spec) {
  if (!fs::exists(store_path))
    throw ConfigError("record store does not exist: " + store_path);
  fs::path dir(out_dir);
  fs::create_directories(dir);
  auto provider = make_embedding_provider(provider_spec);
  auto records = RecordStore::read_all(store_path);

  std::ofstream out(dir / "pairs.jsonl");
  if (!out) throw Error("cannot write pairs.jsonl in " + out_dir);
  for (const auto& rec : records) {
    json j;
    j["record_id"] = rec.record_id;
    j["attack_name"] = rec.attack_name;
    j["grid_label"] = rec.grid_label;
    j["sentence_index"] = rec.sentence_index;
    json pairs = json::object();
    for (const auto& pair : similarity_pairs(rec, *provider)) {
      pairs[pair.metric_name] =
          json{{"sim_input", pair.sim_input}, {"sim_output", pair.sim_output}};
    }
    j["pairs"] = std::move(pairs);
    out << j.dump() << "\n";
  }
  std::cout << "evaluated " << records.size() << " records -> "
            << (dir / "pairs.jsonl").string() << "\n";
  return kExitOk;
}

int cmd_frontier(const std::vector<std::string>& store_paths,
                 const std::string& out_dir,
                 const std::string& provider_spec) {
  auto by_attack = records_by_attack(store_paths);
  auto provider = make_embedding_provider(provider_spec);
  fs::path dir(out_dir);
  fs::create_directories(dir);
  for (const auto& metric : metric_names()) {
    std::ofstream csv(dir / ("frontier_" + metric + ".csv"));
    csv << "metric,attack,hyperparam_label,sim_input,sim_output,on_frontier\n";
    for (const auto& [attack, records] : by_attack) {
      auto points = aggregate(records, metric, *provider);
      std::set<std::string> on;
      for (const auto& p : oriented_frontier(points, metric)) on.insert(p.label);
      for (const auto& p : points) {
        csv << metric << "," << attack << "," << p.label << "," << p.sim_input
            << "," << p.sim_output << ","
            << (on.count(p.label) ? "true" : "false") << "\n";
      }
    }
  }
  std::cout << "frontier CSVs written to " << out_dir << "\n";
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& store_paths,
               const std::string& out_dir, const std::string& provider_spec) {
  auto by_attack = records_by_attack(store_paths);
  auto provider = make_embedding_provider(provider_spec);
  auto bundles = build_bundles(by_attack, *provider);
  auto deltas = delta_table(by_attack, metric_names(), *provider);

  // Up to three representative samples per attack, favoring records that
  // actually edited something.
  std::vector<AttackRecord> samples;
  for (const auto& [attack, records] : by_attack) {
    std::size_t taken = 0;
    for (const auto& rec : records) {
      if (taken >= 3) break;
      if (rec.x != rec.x_att || rec.y != rec.y_att || records.size() <= 3) {
        samples.push_back(rec);
        ++taken;
      }
    }
    if (taken == 0 && !records.empty()) samples.push_back(records.front());
  }

  render_report(bundles, deltas, samples, out_dir);
  std::cout << "report bundle written to " << out_dir << "\n";
  return kExitOk;
}

int cmd_serve_toy(const std::string& model_path, const std::string& host,
                  int port) {
  std::shared_ptr<ToyModelAdapter> adapter;
  if (!model_path.empty()) {
    if (!fs::exists(model_path))
      throw ConfigError("model path does not exist: " + model_path);
    LoadedToyModel loaded = load_toy_model(model_path);
    adapter = std::make_shared<ToyModelAdapter>(std::move(loaded.model),
                                                std::move(loaded.vocab_tokens));
  } else {
    adapter = std::shared_ptr<ToyModelAdapter>(make_default_toy_adapter());
  }
  WireServer server(adapter);
  std::cout << "serving " << adapter->model_id() << " on http://" << host
            << ":" << port << " (" << kWireProtocolVersion << ")\n"
            << std::flush;
  server.run(host, port);
  return kExitOk;
}

int cmd_make_toy(const std::string& out_path, std::uint64_t seed,
                 std::int64_t shift, std::size_t dim, double temperature) {
  auto adapter = make_default_toy_adapter(seed, shift, dim, temperature);
  save_toy_model(adapter->model(), adapter->vocab().tokens, out_path);
  std::cout << "wrote " << adapter->model_id() << " (V="
            << adapter->vocab().size << ", d=" << adapter->vocab().dim
            << ") to " << out_path << "\n";
  return kExitOk;
}

}  // namespace advmt
