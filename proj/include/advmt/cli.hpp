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

#ifndef ADVMT_CLI_HPP_
#define ADVMT_CLI_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "advmt/adapter.hpp"
#include "advmt/config.hpp"

namespace advmt {

// Exit codes: 0 success, 1 fatal, 2 partial per-sentence failures.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

// Builds the model adapter a config names. ADVMT_MODEL_URL overrides the
// endpoint (and forces the remote kind) when set.
std::unique_ptr<ModelAdapter> build_model(const Config& config);

int cmd_attack(Config config, std::uint64_t seed, bool resume);
int cmd_train_head(const Config& config);
int cmd_evaluate(const std::string& store_path, const std::string& out_dir,
                 const std::string& provider_spec);
int cmd_frontier(const std::vector<std::string>& store_paths,
                 const std::string& out_dir, const std::string& provider_spec);
int cmd_report(const std::vector<std::string>& store_paths,
               const std::string& out_dir, const std::string& provider_spec);
int cmd_serve_toy(const std::string& model_path, const std::string& host,
                  int port);
int cmd_make_toy(const std::string& out_path, std::uint64_t seed,
                 std::int64_t shift, std::size_t dim, double temperature);

}  // namespace advmt

#endif  // ADVMT_CLI_HPP_
