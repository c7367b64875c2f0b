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

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "advmt/cli.hpp"
#include "advmt/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"adversarial attacks on translation models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", advmt::kToolVersion);

  std::string config_path, store_path, out_dir, model_path, host = "127.0.0.1";
  std::string provider_spec = "hashing:256";
  std::vector<std::string> store_paths;
  std::uint64_t seed = 0;
  bool resume = false;
  int port = 8787;
  std::int64_t shift = 2;
  std::size_t dim = 16;
  double temperature = 0.25;

  auto* attack = app.add_subcommand("attack", "run an attack sweep");
  attack->add_option("-c,--config", config_path, "run config file")
      ->required()
      ->check(CLI::ExistingFile);
  attack->add_option("--seed", seed, "base seed for the sweep")->required();
  attack->add_flag("--resume", resume, "skip records already in the store");

  auto* train = app.add_subcommand("train-head", "train a metric head");
  train->add_option("-c,--config", config_path, "run config file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate",
                                      "per-record similarity pairs");
  evaluate->add_option("--store", store_path, "record store (JSONL)")
      ->required();
  evaluate->add_option("-o,--out", out_dir, "output directory")->required();
  evaluate->add_option("--provider", provider_spec, "embedding provider");

  auto* frontier = app.add_subcommand("frontier", "per-metric frontier CSVs");
  frontier->add_option("--store", store_paths, "record store(s)")->required();
  frontier->add_option("-o,--out", out_dir, "output directory")->required();
  frontier->add_option("--provider", provider_spec, "embedding provider");

  auto* report = app.add_subcommand("report", "full report bundle");
  report->add_option("--store", store_paths, "record store(s)")->required();
  report->add_option("-o,--out", out_dir, "output directory")->required();
  report->add_option("--provider", provider_spec, "embedding provider");

  auto* serve = app.add_subcommand("serve-toy",
                                   "serve the toy model over the wire protocol");
  serve->add_option("--model", model_path, "toy model JSON (default: built-in)");
  serve->add_option("--host", host, "bind host");
  serve->add_option("--port", port, "bind port")->required();

  auto* make_toy = app.add_subcommand("make-toy", "write a toy model file");
  make_toy->add_option("-o,--out", out_dir, "output path")->required();
  make_toy->add_option("--seed", seed, "init seed");
  make_toy->add_option("--shift", shift, "cipher shift");
  make_toy->add_option("--dim", dim, "embedding width");
  make_toy->add_option("--temperature", temperature, "softmax temperature");

  CLI11_PARSE(app, argc, argv);

  try {
    if (attack->parsed())
      return advmt::cmd_attack(advmt::Config::load(config_path), seed, resume);
    if (train->parsed())
      return advmt::cmd_train_head(advmt::Config::load(config_path));
    if (evaluate->parsed())
      return advmt::cmd_evaluate(store_path, out_dir, provider_spec);
    if (frontier->parsed())
      return advmt::cmd_frontier(store_paths, out_dir, provider_spec);
    if (report->parsed())
      return advmt::cmd_report(store_paths, out_dir, provider_spec);
    if (serve->parsed()) return advmt::cmd_serve_toy(model_path, host, port);
    if (make_toy->parsed())
      return advmt::cmd_make_toy(out_dir, seed, shift, dim, temperature);
  } catch (const advmt::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return advmt::kExitFatal;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return advmt::kExitFatal;
  }
  return advmt::kExitFatal;
}
