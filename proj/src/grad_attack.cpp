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

#include "advmt/grad_attack.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

namespace advmt {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void fill_common_hyperparams(AttackRecord& rec, const GradAttackConfig& cfg) {
  rec.hyperparams["max_flips"] = std::to_string(cfg.max_flips);
  rec.hyperparams["cosine_threshold"] =
      format_double(cfg.constraints.cosine_threshold);
  rec.hyperparams["cosine_rule"] =
      cfg.constraints.cosine_rule == CosineRule::kMaxDistance ? "max_distance"
                                                              : "min_distance";
  rec.hyperparams["loss_mode"] = cfg.loss_mode == LossMode::kVsReference
                                     ? "vs_reference"
                                     : "vs_model_translation";
}

}  // namespace

bool cosine_rule_allows(const double* e_old, const double* e_new,
                        std::size_t dim, double threshold, CosineRule rule) {
  double distance = 1.0 - cosine(e_old, e_new, dim);
  return rule == CosineRule::kMaxDistance ? distance <= threshold
                                          : distance >= threshold;
}

std::set<std::size_t> derive_protected_positions(const TokenizedText& text,
                                                 const VocabTable& vocab) {
  std::set<std::size_t> out;
  if (text.empty()) return out;
  out.insert(0);
  out.insert(text.size() - 1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto id = static_cast<std::size_t>(text.token_ids[i]);
    if (id < vocab.protected_mask.size() && vocab.protected_mask[id])
      out.insert(i);
  }
  return out;
}

std::optional<FlipCandidate> select_flip(
    const Mat& grad, const std::vector<TokenId>& current_ids,
    const VocabTable& vocab, const AttackConstraints& constraints) {
  if (grad.rows != current_ids.size() || grad.cols != vocab.dim)
    throw Error("select_flip: gradient shape mismatch");
  if (!grad.finite()) throw Error("select_flip: non-finite gradient");

  std::optional<FlipCandidate> best;
  for (std::size_t i = 0; i < current_ids.size(); ++i) {
    if (constraints.protected_positions.count(i)) continue;
    auto cur = static_cast<std::size_t>(current_ids[i]);
    const double* g = grad.row(i);
    const double* e_cur = vocab.embeddings.row(cur);
    double base = dot(e_cur, g, vocab.dim);
    bool cur_initial = vocab.word_initial_mask[cur];
    for (std::size_t v = 0; v < vocab.size; ++v) {
      if (v == cur) continue;
      if (constraints.respect_word_initial_partition &&
          vocab.word_initial_mask[v] != cur_initial)
        continue;
      const double* e_new = vocab.embeddings.row(v);
      if (!cosine_rule_allows(e_cur, e_new, vocab.dim,
                              constraints.cosine_threshold,
                              constraints.cosine_rule))
        continue;
      double score = dot(e_new, g, vocab.dim) - base;
      if (score >= 0.0) continue;  // must strictly beat keeping the token
      if (!best || score < best->score ||
          (score == best->score &&
           (i < best->position ||
            (i == best->position &&
             static_cast<TokenId>(v) < best->new_token)))) {
        best = FlipCandidate{i, static_cast<TokenId>(v), score};
      }
    }
  }
  return best;
}

AttackRecord gradient_attack(const TokenizedText& src,
                             const ModelAdapter& model,
                             const GradAttackConfig& config,
                             const TokenizedText* reference) {
  if (src.empty()) throw Error("gradient_attack: empty sentence");
  if (!model.capabilities().loss_grad)
    throw CapabilityError("gradient_attack: gradients unsupported by " +
                          model.model_id());
  if (config.loss_mode == LossMode::kVsReference &&
      (reference == nullptr || reference->empty()))
    throw Error("gradient_attack: loss_mode vs_reference needs a reference");

  auto started = std::chrono::steady_clock::now();
  const VocabTable& vocab = model.vocab();
  TokenizedText original_translation = model.translate(src);
  const TokenizedText& anchor = config.loss_mode == LossMode::kVsReference
                                    ? *reference
                                    : original_translation;

  AttackRecord rec;
  rec.attack_name = "gradient";
  fill_common_hyperparams(rec, config);
  rec.model_id = model.model_id();
  rec.x = src.text;
  rec.y = original_translation.text;

  TokenizedText cur = src;
  std::set<std::size_t> flipped;
  int flips = 0;
  rec.stop_reason = "budget_exhausted";
  while (flips < config.max_flips) {
    LossGrad lg = model.loss_and_grad(cur, anchor);
    // L_adv = -J, so the descent direction for L_adv is the ascent
    // direction for the anchored-translation NLL.
    for (double& g : lg.grad.data) g = -g;

    AttackConstraints c = config.constraints;
    c.protected_positions = derive_protected_positions(cur, vocab);
    if (c.one_flip_per_position)
      c.protected_positions.insert(flipped.begin(), flipped.end());

    auto cand = select_flip(lg.grad, cur.token_ids, vocab, c);
    if (!cand) {
      rec.stop_reason = "no_improving_candidate";
      break;
    }
    EditLogEntry e;
    e.kind = "token_flip";
    e.position = static_cast<std::int64_t>(cand->position);
    e.old_id = cur.token_ids[cand->position];
    e.new_id = cand->new_token;
    e.old_value = vocab.tokens[static_cast<std::size_t>(e.old_id)];
    e.new_value = vocab.tokens[static_cast<std::size_t>(e.new_id)];
    e.score = cand->score;
    rec.edit_log.push_back(std::move(e));

    std::vector<TokenId> ids = cur.token_ids;
    ids[cand->position] = cand->new_token;
    cur = model.from_ids(ids);
    flipped.insert(cand->position);
    ++flips;
  }

  rec.x_att = cur.text;
  rec.y_att = flips == 0 ? rec.y : model.translate(cur).text;
  rec.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  return rec;
}

CharVocab build_char_vocab(const VocabTable& vocab) {
  CharVocab cv;
  std::map<char, std::vector<std::size_t>> members;
  for (std::size_t v = 0; v < vocab.size; ++v) {
    std::string s = vocab.tokens[v];
    if (s.rfind("##", 0) == 0) s = s.substr(2);
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) members[c].push_back(v);
  }
  if (members.empty()) throw Error("char vocab: no characters in vocabulary");
  cv.chars.reserve(members.size());
  cv.embeddings = Mat(members.size(), vocab.dim);
  std::size_t row = 0;
  for (const auto& [c, rows] : members) {
    cv.chars.push_back(c);
    cv.index[c] = row;
    double* dst = cv.embeddings.row(row);
    for (std::size_t r : rows) {
      const double* src = vocab.embeddings.row(r);
      for (std::size_t k = 0; k < vocab.dim; ++k) dst[k] += src[k];
    }
    for (std::size_t k = 0; k < vocab.dim; ++k)
      dst[k] /= static_cast<double>(rows.size());
    ++row;
  }
  return cv;
}

namespace {

// Maps every character index of `text` to its covering token, or npos.
std::vector<std::size_t> char_to_token(const TokenizedText& text) {
  std::vector<std::size_t> map(text.text.size(), std::string::npos);
  for (std::size_t t = 0; t < text.spans.size(); ++t)
    for (std::size_t p = text.spans[t].first; p < text.spans[t].second; ++p)
      map[p] = t;
  return map;
}

struct CharFlip {
  std::size_t position;
  char new_char;
  double score;
};

std::optional<CharFlip> select_char_flip(
    const TokenizedText& cur, const Mat& grad, const CharVocab& cv,
    const std::set<std::size_t>& protected_tokens,
    const std::set<std::size_t>& flipped_chars,
    const AttackConstraints& constraints) {
  auto owner = char_to_token(cur);
  std::optional<CharFlip> best;
  for (std::size_t p = 0; p < cur.text.size(); ++p) {
    std::size_t tok = owner[p];
    if (tok == std::string::npos) continue;  // whitespace
    if (protected_tokens.count(tok)) continue;
    if (constraints.one_flip_per_position && flipped_chars.count(p)) continue;
    char old_c = cur.text[p];
    auto old_it = cv.index.find(old_c);
    if (old_it == cv.index.end()) continue;
    const double* g = grad.row(tok);
    const double* e_old = cv.embeddings.row(old_it->second);
    double base = dot(e_old, g, cv.embeddings.cols);
    for (std::size_t ci = 0; ci < cv.chars.size(); ++ci) {
      char cand = cv.chars[ci];
      if (cand == old_c) continue;
      const double* e_new = cv.embeddings.row(ci);
      if (!cosine_rule_allows(e_old, e_new, cv.embeddings.cols,
                              constraints.cosine_threshold,
                              constraints.cosine_rule))
        continue;
      double score = dot(e_new, g, cv.embeddings.cols) - base;
      if (score >= 0.0) continue;
      if (!best || score < best->score ||
          (score == best->score &&
           (p < best->position ||
            (p == best->position && cand < best->new_char)))) {
        best = CharFlip{p, cand, score};
      }
    }
  }
  return best;
}

}  // namespace

AttackRecord char_grad_attack(const TokenizedText& src,
                              const ModelAdapter& model,
                              const GradAttackConfig& config,
                              const TokenizedText* reference) {
  if (src.empty()) throw Error("char_grad_attack: empty sentence");
  if (!model.capabilities().loss_grad)
    throw CapabilityError("char_grad_attack: gradients unsupported by " +
                          model.model_id());
  if (config.loss_mode == LossMode::kVsReference &&
      (reference == nullptr || reference->empty()))
    throw Error("char_grad_attack: loss_mode vs_reference needs a reference");

  auto started = std::chrono::steady_clock::now();
  CharVocab cv = build_char_vocab(model.vocab());
  TokenizedText original_translation = model.translate(src);
  const TokenizedText& anchor = config.loss_mode == LossMode::kVsReference
                                    ? *reference
                                    : original_translation;

  AttackRecord rec;
  rec.attack_name = "char_grad";
  fill_common_hyperparams(rec, config);
  rec.model_id = model.model_id();
  rec.x = src.text;
  rec.y = original_translation.text;

  TokenizedText cur = src;
  std::set<std::size_t> flipped_chars;
  int flips = 0;
  rec.stop_reason = "budget_exhausted";
  while (flips < config.max_flips) {
    LossGrad lg = model.loss_and_grad(cur, anchor);
    for (double& g : lg.grad.data) g = -g;
    auto protected_tokens = derive_protected_positions(cur, model.vocab());

    auto cand = select_char_flip(cur, lg.grad, cv, protected_tokens,
                                 flipped_chars, config.constraints);
    if (!cand) {
      rec.stop_reason = "no_improving_candidate";
      break;
    }
    EditLogEntry e;
    e.kind = "char_flip";
    e.position = static_cast<std::int64_t>(cand->position);
    e.old_value = std::string(1, cur.text[cand->position]);
    e.new_value = std::string(1, cand->new_char);
    e.score = cand->score;
    rec.edit_log.push_back(std::move(e));

    std::string text = cur.text;
    text[cand->position] = cand->new_char;
    cur = model.tokenize(text);  // re-tokenize after every character flip
    flipped_chars.insert(cand->position);
    ++flips;
  }

  rec.x_att = cur.text;
  rec.y_att = flips == 0 ? rec.y : model.translate(cur).text;
  rec.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  return rec;
}

}  // namespace advmt
