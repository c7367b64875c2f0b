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

#include "advmt/perturb.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "advmt/metrics.hpp"

namespace advmt {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// text = lead + words[0] + seps[0] + words[1] + ... + trail, so a zero-op
// run reproduces the input byte for byte.
struct SplitText {
  std::string lead;
  std::vector<std::string> words;
  std::vector<std::string> seps;  // between consecutive words
  std::string trail;

  static SplitText split(const std::string& text) {
    SplitText s;
    std::size_t i = 0;
    while (i < text.size() && is_space(text[i])) s.lead += text[i++];
    while (i < text.size()) {
      std::string w;
      while (i < text.size() && !is_space(text[i])) w += text[i++];
      s.words.push_back(std::move(w));
      std::string sep;
      while (i < text.size() && is_space(text[i])) sep += text[i++];
      if (i < text.size())
        s.seps.push_back(std::move(sep));
      else
        s.trail = std::move(sep);
    }
    return s;
  }

  std::string join() const {
    std::string out = lead;
    for (std::size_t i = 0; i < words.size(); ++i) {
      out += words[i];
      if (i + 1 < words.size()) out += seps[i];
    }
    out += trail;
    return out;
  }
};

std::vector<std::size_t> letter_positions(const std::string& w) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (std::isalpha(static_cast<unsigned char>(w[i]))) pos.push_back(i);
  return pos;
}

std::string join_perm(const std::vector<std::size_t>& perm) {
  std::string out;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(perm[i]);
  }
  return out;
}

std::vector<std::size_t> parse_perm(const std::string& s) {
  std::vector<std::size_t> perm;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) perm.push_back(std::stoul(part));
  return perm;
}

// Applies a letter-position permutation: letters move, everything else
// keeps its slot ("gallon." shuffles to "gllnoa.", the dot stays).
std::string apply_letter_perm(const std::string& w,
                              const std::vector<std::size_t>& perm) {
  auto pos = letter_positions(w);
  if (perm.size() != pos.size()) throw Error("perturb: bad permutation size");
  std::string out = w;
  for (std::size_t i = 0; i < pos.size(); ++i) out[pos[i]] = w[pos[perm[i]]];
  return out;
}

char match_case(char templ, char c) {
  if (std::isupper(static_cast<unsigned char>(templ)))
    return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return c;
}

struct OpResult {
  bool applied = false;
  EditLogEntry entry;
};

// Applies one sampled op in place. Unapplicable draws come back with
// applied=false and a skip entry.
OpResult apply_op(PerturbKind kind, SplitText& s, std::size_t wi,
                  std::mt19937_64& rng, const KeyboardLayout& layout) {
  OpResult res;
  EditLogEntry& e = res.entry;
  e.kind = perturb_kind_name(kind);
  e.position = static_cast<std::int64_t>(wi);
  std::string& w = s.words[wi];
  e.old_value = w;

  auto skip = [&](const std::string& reason) {
    e.skipped = true;
    e.params["reason"] = reason;
    return res;
  };

  switch (kind) {
    case PerturbKind::kKeyboardTypo: {
      if (w.empty()) return skip("empty word");
      std::size_t ci = std::uniform_int_distribution<std::size_t>(
          0, w.size() - 1)(rng);
      char lower = static_cast<char>(
          std::tolower(static_cast<unsigned char>(w[ci])));
      auto it = layout.find(lower);
      if (it == layout.end() || it->second.empty())
        return skip("no keyboard neighbors");
      char repl = it->second[std::uniform_int_distribution<std::size_t>(
          0, it->second.size() - 1)(rng)];
      repl = match_case(w[ci], repl);
      if (repl == w[ci]) return skip("neighbor equals original");
      e.params["char_index"] = std::to_string(ci);
      e.params["new_char"] = std::string(1, repl);
      w[ci] = repl;
      break;
    }
    case PerturbKind::kOmitChar: {
      if (w.size() < 2) return skip("word too short");
      std::size_t ci = std::uniform_int_distribution<std::size_t>(
          0, w.size() - 1)(rng);
      e.params["char_index"] = std::to_string(ci);
      e.params["removed_char"] = std::string(1, w[ci]);
      w.erase(ci, 1);
      break;
    }
    case PerturbKind::kInsertChar: {
      if (w.empty()) return skip("empty word");
      std::size_t ci = std::uniform_int_distribution<std::size_t>(
          0, w.size())(rng);
      // Candidate characters: the word's own letters plus neighbors of
      // the key before the insertion point.
      std::string pool;
      for (char c : w)
        if (std::isalpha(static_cast<unsigned char>(c)))
          pool += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      char anchor = static_cast<char>(
          std::tolower(static_cast<unsigned char>(w[ci == 0 ? 0 : ci - 1])));
      auto it = layout.find(anchor);
      if (it != layout.end())
        pool.append(it->second.begin(), it->second.end());
      if (pool.empty()) return skip("no insertion candidates");
      char ins = pool[std::uniform_int_distribution<std::size_t>(
          0, pool.size() - 1)(rng)];
      e.params["char_index"] = std::to_string(ci);
      e.params["new_char"] = std::string(1, ins);
      w.insert(w.begin() + ci, ins);
      break;
    }
    case PerturbKind::kSwapAdjacentChars: {
      if (w.size() < 2) return skip("word too short");
      std::size_t ci = std::uniform_int_distribution<std::size_t>(
          0, w.size() - 2)(rng);
      if (w[ci] == w[ci + 1]) return skip("equal adjacent characters");
      e.params["char_index"] = std::to_string(ci);
      std::swap(w[ci], w[ci + 1]);
      break;
    }
    case PerturbKind::kShuffleWordChars: {
      auto pos = letter_positions(w);
      if (pos.size() < 2) return skip("not enough letters");
      std::vector<std::size_t> perm(pos.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      bool identity = true;
      for (int tries = 0; tries < 8 && identity; ++tries) {
        std::shuffle(perm.begin(), perm.end(), rng);
        identity = std::is_sorted(perm.begin(), perm.end());
      }
      if (identity) return skip("identity permutation");
      e.params["perm"] = join_perm(perm);
      w = apply_letter_perm(w, perm);
      break;
    }
    case PerturbKind::kFullCharShuffle: {
      auto pos = letter_positions(w);
      if (pos.size() < 2) return skip("not enough letters");
      std::vector<std::size_t> perm(pos.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      e.params["perm"] = join_perm(perm);
      w = apply_letter_perm(w, perm);
      break;
    }
    case PerturbKind::kSwapWords: {
      if (s.words.size() < 2) return skip("single-word sentence");
      std::size_t other = std::uniform_int_distribution<std::size_t>(
          0, s.words.size() - 2)(rng);
      if (other >= wi) ++other;  // distinct from wi
      if (s.words[wi] == s.words[other]) return skip("identical words");
      e.params["other_word"] = std::to_string(other);
      e.params["other_value"] = s.words[other];
      std::swap(s.words[wi], s.words[other]);
      e.new_value = s.words[wi];
      res.applied = true;
      return res;
    }
  }
  e.new_value = w;
  res.applied = true;
  return res;
}

PerturbKind sample_kind(const OpMix& mix, std::mt19937_64& rng) {
  double total = 0.0;
  for (const auto& [k, v] : mix) {
    if (v < 0) throw Error("perturb: negative op weight");
    total += v;
  }
  if (total <= 0) throw Error("perturb: op mix weights sum to zero");
  double r = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (const auto& [k, v] : mix) {
    acc += v;
    if (r < acc) return k;
  }
  return mix.rbegin()->first;
}

}  // namespace

std::string perturb_kind_name(PerturbKind kind) {
  switch (kind) {
    case PerturbKind::kKeyboardTypo: return "keyboard_typo";
    case PerturbKind::kOmitChar: return "omit_char";
    case PerturbKind::kInsertChar: return "insert_char";
    case PerturbKind::kSwapAdjacentChars: return "swap_adjacent_chars";
    case PerturbKind::kShuffleWordChars: return "shuffle_word_chars";
    case PerturbKind::kSwapWords: return "swap_words";
    case PerturbKind::kFullCharShuffle: return "full_char_shuffle";
  }
  throw Error("perturb: unknown kind");
}

PerturbKind perturb_kind_from_name(const std::string& name) {
  static const std::map<std::string, PerturbKind> kNames = {
      {"keyboard_typo", PerturbKind::kKeyboardTypo},
      {"omit_char", PerturbKind::kOmitChar},
      {"insert_char", PerturbKind::kInsertChar},
      {"swap_adjacent_chars", PerturbKind::kSwapAdjacentChars},
      {"shuffle_word_chars", PerturbKind::kShuffleWordChars},
      {"swap_words", PerturbKind::kSwapWords},
      {"full_char_shuffle", PerturbKind::kFullCharShuffle},
  };
  auto it = kNames.find(name);
  if (it == kNames.end()) throw Error("perturb: unknown op kind " + name);
  return it->second;
}

const KeyboardLayout& qwerty_layout() {
  // Mirrors data/qwerty_neighbors.json.
  static const KeyboardLayout kLayout = {
      {'q', {'w', 'a', 's'}},
      {'w', {'q', 'e', 'a', 's', 'd'}},
      {'e', {'w', 'r', 's', 'd', 'f'}},
      {'r', {'e', 't', 'd', 'f', 'g'}},
      {'t', {'r', 'y', 'f', 'g', 'h'}},
      {'y', {'t', 'u', 'g', 'h', 'j'}},
      {'u', {'y', 'i', 'h', 'j', 'k'}},
      {'i', {'u', 'o', 'j', 'k', 'l'}},
      {'o', {'i', 'p', 'k', 'l'}},
      {'p', {'o', 'l'}},
      {'a', {'q', 'w', 's', 'z', 'x'}},
      {'s', {'a', 'd', 'q', 'w', 'e', 'z', 'x', 'c'}},
      {'d', {'s', 'f', 'w', 'e', 'r', 'x', 'c', 'v'}},
      {'f', {'d', 'g', 'e', 'r', 't', 'c', 'v', 'b'}},
      {'g', {'f', 'h', 'r', 't', 'y', 'v', 'b', 'n'}},
      {'h', {'g', 'j', 't', 'y', 'u', 'b', 'n', 'm'}},
      {'j', {'h', 'k', 'y', 'u', 'i', 'n', 'm'}},
      {'k', {'j', 'l', 'u', 'i', 'o', 'm'}},
      {'l', {'k', 'i', 'o', 'p'}},
      {'z', {'a', 's', 'x'}},
      {'x', {'z', 's', 'd', 'a', 'c'}},
      {'c', {'x', 'd', 'f', 's', 'v'}},
      {'v', {'c', 'f', 'g', 'b'}},
      {'b', {'v', 'g', 'h', 'n'}},
      {'n', {'b', 'h', 'j', 'm'}},
      {'m', {'n', 'j', 'k'}},
  };
  return kLayout;
}

KeyboardLayout load_keyboard_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("keyboard layout not readable: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  KeyboardLayout layout;
  for (const auto& [key, neighbors] : j.items()) {
    if (key.size() != 1)
      throw ConfigError("keyboard layout: key '" + key + "' is not one char");
    std::vector<char> ns;
    for (const auto& n : neighbors) {
      std::string v = n.get<std::string>();
      if (v.size() != 1)
        throw ConfigError("keyboard layout: neighbor '" + v +
                          "' is not one char");
      ns.push_back(v[0]);
    }
    layout[key[0]] = std::move(ns);
  }
  return layout;
}

OpMix default_op_mix() {
  return {
      {PerturbKind::kKeyboardTypo, 1.0},
      {PerturbKind::kOmitChar, 1.0},
      {PerturbKind::kInsertChar, 1.0},
      {PerturbKind::kSwapAdjacentChars, 1.0},
      {PerturbKind::kShuffleWordChars, 1.0},
      {PerturbKind::kSwapWords, 1.0},
  };
}

std::size_t resolve_budget(const PerturbBudget& budget,
                           const std::string& src) {
  if (budget.value < 0) throw Error("perturb: negative budget");
  SplitText s = SplitText::split(src);
  switch (budget.mode) {
    case PerturbBudget::Mode::kFractionOfWords: {
      if (budget.value > 1.0)
        throw Error("perturb: word fraction must be in [0, 1]");
      return static_cast<std::size_t>(
          std::llround(budget.value * static_cast<double>(s.words.size())));
    }
    case PerturbBudget::Mode::kFractionOfChars: {
      if (budget.value > 1.0)
        throw Error("perturb: char fraction must be in [0, 1]");
      std::size_t chars = 0;
      for (const auto& w : s.words) chars += w.size();
      return static_cast<std::size_t>(
          std::llround(budget.value * static_cast<double>(chars)));
    }
    case PerturbBudget::Mode::kMaxOperations:
      return static_cast<std::size_t>(budget.value);
  }
  return 0;
}

InputPerturbation synthetic_attack(const std::string& src,
                                   const PerturbBudget& budget,
                                   const OpMix& mix,
                                   const KeyboardLayout& layout) {
  SplitText s = SplitText::split(src);
  if (s.words.empty()) throw Error("synthetic_attack: empty input");

  InputPerturbation out;
  std::size_t n_ops = resolve_budget(budget, src);
  std::mt19937_64 rng(budget.seed);
  bool distinct_words =
      budget.mode == PerturbBudget::Mode::kFractionOfWords;
  std::set<std::size_t> touched;

  std::size_t applied = 0;
  std::size_t attempts = 0;
  std::size_t max_attempts = n_ops * 20 + 50;
  while (applied < n_ops && attempts < max_attempts) {
    ++attempts;
    PerturbKind kind = sample_kind(mix, rng);
    std::size_t wi;
    if (distinct_words) {
      std::vector<std::size_t> free_words;
      for (std::size_t i = 0; i < s.words.size(); ++i)
        if (!touched.count(i)) free_words.push_back(i);
      if (free_words.empty()) break;
      wi = free_words[std::uniform_int_distribution<std::size_t>(
          0, free_words.size() - 1)(rng)];
    } else {
      wi = std::uniform_int_distribution<std::size_t>(0, s.words.size() - 1)(
          rng);
    }
    OpResult res = apply_op(kind, s, wi, rng, layout);
    out.ops.push_back(res.entry);
    if (!res.applied) continue;
    ++applied;
    if (distinct_words) {
      touched.insert(wi);
      if (kind == PerturbKind::kSwapWords)
        touched.insert(std::stoul(res.entry.params.at("other_word")));
    }
  }
  out.x_att = s.join();
  return out;
}

InputPerturbation char_swap_attack(const std::string& src,
                                   const PerturbBudget& budget) {
  OpMix mix = {{PerturbKind::kSwapAdjacentChars, 1.0}};
  return synthetic_attack(src, budget, mix);
}

InputPerturbation full_shuffle_attack(const std::string& src,
                                      std::uint64_t seed) {
  SplitText s = SplitText::split(src);
  if (s.words.empty()) throw Error("full_shuffle_attack: empty input");
  InputPerturbation out;
  std::mt19937_64 rng(seed);
  for (std::size_t wi = 0; wi < s.words.size(); ++wi) {
    auto pos = letter_positions(s.words[wi]);
    if (pos.size() < 2) continue;
    std::vector<std::size_t> perm(pos.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    EditLogEntry e;
    e.kind = perturb_kind_name(PerturbKind::kFullCharShuffle);
    e.position = static_cast<std::int64_t>(wi);
    e.old_value = s.words[wi];
    e.params["perm"] = join_perm(perm);
    s.words[wi] = apply_letter_perm(s.words[wi], perm);
    e.new_value = s.words[wi];
    out.ops.push_back(std::move(e));
  }
  out.x_att = s.join();
  return out;
}

std::string replay_ops(const std::string& src,
                       const std::vector<EditLogEntry>& ops) {
  SplitText s = SplitText::split(src);
  for (const auto& e : ops) {
    if (e.skipped) continue;
    if (e.kind == "prefix") {
      // Prefix tokens accumulate in front of the sentence.
      s.words.insert(s.words.begin() + e.position, e.new_value);
      s.seps.insert(s.seps.begin() + std::min<std::size_t>(e.position,
                                                           s.seps.size()),
                    " ");
      continue;
    }
    std::size_t wi = static_cast<std::size_t>(e.position);
    if (wi >= s.words.size()) throw Error("replay: word index out of range");
    std::string& w = s.words[wi];
    PerturbKind kind = perturb_kind_from_name(e.kind);
    switch (kind) {
      case PerturbKind::kKeyboardTypo: {
        std::size_t ci = std::stoul(e.params.at("char_index"));
        w.at(ci) = e.params.at("new_char")[0];
        break;
      }
      case PerturbKind::kOmitChar: {
        std::size_t ci = std::stoul(e.params.at("char_index"));
        w.erase(ci, 1);
        break;
      }
      case PerturbKind::kInsertChar: {
        std::size_t ci = std::stoul(e.params.at("char_index"));
        w.insert(w.begin() + ci, e.params.at("new_char")[0]);
        break;
      }
      case PerturbKind::kSwapAdjacentChars: {
        std::size_t ci = std::stoul(e.params.at("char_index"));
        std::swap(w.at(ci), w.at(ci + 1));
        break;
      }
      case PerturbKind::kShuffleWordChars:
      case PerturbKind::kFullCharShuffle: {
        w = apply_letter_perm(w, parse_perm(e.params.at("perm")));
        break;
      }
      case PerturbKind::kSwapWords: {
        std::size_t other = std::stoul(e.params.at("other_word"));
        std::swap(s.words[wi], s.words.at(other));
        break;
      }
    }
  }
  return s.join();
}

std::string keyboard_typo(const std::string& word, std::size_t index,
                          const KeyboardLayout& layout, std::uint64_t seed,
                          EditLogEntry* out_entry) {
  if (index >= word.size())
    throw Error("keyboard_typo: index " + std::to_string(index) +
                " out of range for word of length " +
                std::to_string(word.size()));
  EditLogEntry e;
  e.kind = perturb_kind_name(PerturbKind::kKeyboardTypo);
  e.position = 0;
  e.old_value = word;
  e.params["char_index"] = std::to_string(index);
  char lower =
      static_cast<char>(std::tolower(static_cast<unsigned char>(word[index])));
  auto it = layout.find(lower);
  if (it == layout.end() || it->second.empty()) {
    e.skipped = true;
    e.params["reason"] = "no keyboard neighbors";
    e.new_value = word;
    if (out_entry) *out_entry = e;
    return word;
  }
  std::mt19937_64 rng(seed);
  char repl = it->second[std::uniform_int_distribution<std::size_t>(
      0, it->second.size() - 1)(rng)];
  std::string out = word;
  out[index] = match_case(word[index], repl);
  e.params["new_char"] = std::string(1, out[index]);
  e.new_value = out;
  if (out_entry) *out_entry = e;
  return out;
}

AttackRecord prefix_attack(const std::string& src, const ModelAdapter& model,
                           const std::vector<std::string>& prefix_pool,
                           int k) {
  if (prefix_pool.empty()) throw Error("prefix_attack: empty pool");
  if (k < 0) throw Error("prefix_attack: negative budget");
  auto started = std::chrono::steady_clock::now();

  AttackRecord rec;
  rec.attack_name = "prefix";
  rec.model_id = model.model_id();
  rec.hyperparams["k"] = std::to_string(k);
  rec.x = src;

  TokenizedText src_tok = model.tokenize(src);
  if (src_tok.empty()) throw Error("prefix_attack: empty input");
  std::string y = model.translate(src_tok).text;
  rec.y = y;

  std::vector<std::string> chosen;
  double best_sim = 1.0;  // chrF(Y, Y) of the unattacked sentence
  std::string cur = src;
  std::string cur_y = y;
  rec.stop_reason = "budget_exhausted";
  for (int step = 0; step < k; ++step) {
    double step_best = best_sim;
    std::size_t step_pick = prefix_pool.size();
    std::string step_y;
    for (std::size_t p = 0; p < prefix_pool.size(); ++p) {
      std::string prefixed;
      for (const auto& c : chosen) prefixed += c + " ";
      prefixed += prefix_pool[p] + " " + src;
      std::string cand_y = model.translate(model.tokenize(prefixed)).text;
      double sim = metrics::chrf(cand_y, y);
      if (sim < step_best) {
        step_best = sim;
        step_pick = p;
        step_y = cand_y;
      }
    }
    if (step_pick == prefix_pool.size()) {
      rec.stop_reason = "no_improving_candidate";
      break;
    }
    chosen.push_back(prefix_pool[step_pick]);
    best_sim = step_best;
    cur_y = step_y;
    EditLogEntry e;
    e.kind = "prefix";
    e.position = static_cast<std::int64_t>(chosen.size() - 1);
    e.new_value = prefix_pool[step_pick];
    e.score = step_best;
    rec.edit_log.push_back(std::move(e));
  }
  std::string prefixed;
  for (const auto& c : chosen) prefixed += c + " ";
  rec.x_att = prefixed + src;
  rec.y_att = chosen.empty() ? y : cur_y;
  rec.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  return rec;
}

AttackRecord swls_attack(const std::string& src, const ModelAdapter& model,
                         const ModelAdapter& reverse_model,
                         const SwlsConfig& config) {
  auto started = std::chrono::steady_clock::now();
  AttackRecord rec;
  rec.attack_name = "swls";
  rec.model_id = model.model_id();
  rec.hyperparams["budget_value"] = std::to_string(config.budget.value);
  rec.hyperparams["candidates_per_step"] =
      std::to_string(config.candidates_per_step);
  rec.x = src;
  rec.seed = config.budget.seed;

  auto divergence = [&](const std::string& text) {
    TokenizedText tok = model.tokenize(text);
    if (tok.empty()) return 0.0;
    TokenizedText fwd = model.translate(tok);
    TokenizedText back = back_translate(fwd, model, reverse_model);
    return 1.0 - metrics::chrf(text, back.text);
  };

  rec.y = model.translate(model.tokenize(src)).text;

  std::string cur = src;
  double cur_score = divergence(src);
  rec.trajectory.push_back(cur_score);
  std::size_t budget_ops = resolve_budget(config.budget, src);
  std::mt19937_64 rng(config.budget.seed);
  OpMix mix = default_op_mix();

  rec.stop_reason = "budget_exhausted";
  for (std::size_t accepted = 0; accepted < budget_ops;) {
    double best_score = cur_score;
    std::string best_text;
    EditLogEntry best_entry;
    for (int c = 0; c < config.candidates_per_step; ++c) {
      SplitText s = SplitText::split(cur);
      if (s.words.empty()) break;
      PerturbKind kind = sample_kind(mix, rng);
      std::size_t wi = std::uniform_int_distribution<std::size_t>(
          0, s.words.size() - 1)(rng);
      OpResult res = apply_op(kind, s, wi, rng, qwerty_layout());
      if (!res.applied) continue;
      std::string cand = s.join();
      double score = divergence(cand);
      if (score > best_score) {
        best_score = score;
        best_text = cand;
        best_entry = res.entry;
      }
    }
    if (best_text.empty()) {
      rec.stop_reason = "no_improving_candidate";
      break;
    }
    cur = best_text;
    cur_score = best_score;
    best_entry.score = best_score;
    rec.edit_log.push_back(best_entry);
    rec.trajectory.push_back(best_score);
    ++accepted;
  }

  rec.x_att = cur;
  rec.y_att = cur == src ? rec.y : model.translate(model.tokenize(cur)).text;
  rec.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  return rec;
}

}  // namespace advmt
