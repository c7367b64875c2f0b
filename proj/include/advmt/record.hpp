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

#ifndef ADVMT_RECORD_HPP_
#define ADVMT_RECORD_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace advmt {

// One edit of an attack's edit log. `params` carries op-specific replay
// payload (permutations, inserted characters, ...).
struct EditLogEntry {
  std::string kind;
  std::int64_t position = -1;  // token or character index, -1 = n/a
  std::string old_value;
  std::string new_value;
  std::int64_t old_id = -1;
  std::int64_t new_id = -1;
  double score = 0.0;  // Taylor score for gradient flips
  bool skipped = false;
  std::map<std::string, std::string> params;
};

// One attacked sentence. Y == translate(X) and Y_att == translate(X_att)
// for input-space attacks; latent-space attacks set latent_space and
// leave x_att == x.
struct AttackRecord {
  std::string attack_name;
  std::map<std::string, std::string> hyperparams;
  std::string x;
  std::string x_att;
  std::string y;
  std::string y_att;
  std::vector<EditLogEntry> edit_log;
  std::uint64_t seed = 0;
  std::string model_id;
  double timing_ms = 0.0;
  bool latent_space = false;
  std::string stop_reason;
  std::vector<double> trajectory;  // predicted-metric path (latent attacks)

  // Store bookkeeping, filled by the harness.
  std::int64_t record_id = -1;
  std::string grid_label;
  std::int64_t sentence_index = -1;
};

// Per-metric similarity of input pair vs output pair; the unit of
// Pareto analysis.
struct SimilarityPair {
  std::string metric_name;
  double sim_input = 0.0;   // sim(X, X_att)
  double sim_output = 0.0;  // sim(Y, Y_att)
};

}  // namespace advmt

#endif  // ADVMT_RECORD_HPP_
