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

#ifndef ADVMT_CONFIG_HPP_
#define ADVMT_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace advmt {

// Flat-key configuration file: one `a.b.c = value` per line, '#' comments.
// Serialization sorts keys, so parse -> serialize -> parse is a fixed
// point.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config load(const std::string& path);
  std::string serialize() const;

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value);

  std::string get(const std::string& key) const;  // throws naming the key
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // FNV-1a over the canonical serialization, hex.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kModelUrlEnvVar = "ADVMT_MODEL_URL";

}  // namespace advmt

#endif  // ADVMT_CONFIG_HPP_
