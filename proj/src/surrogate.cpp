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

#include "advmt/surrogate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "advmt/metrics.hpp"

namespace advmt {

namespace {

using json = nlohmann::json;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> mean_pool(const EncoderLatents& z) {
  if (z.positions() == 0) throw Error("head: empty latents");
  std::vector<double> pooled(z.width(), 0.0);
  for (std::size_t i = 0; i < z.positions(); ++i) {
    const double* row = z.values.row(i);
    for (std::size_t c = 0; c < z.width(); ++c) pooled[c] += row[c];
  }
  for (double& v : pooled) v /= static_cast<double>(z.positions());
  return pooled;
}

struct ForwardTrace {
  // activations[0] = input, activations[l+1] = post-nonlinearity output
  // of layer l; pre[l] = pre-nonlinearity of layer l.
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<double>> pre;
  double output = 0.0;
};

}  // namespace

BleuHead::BleuHead(std::vector<std::size_t> widths, std::uint64_t seed)
    : widths_(std::move(widths)) {
  if (widths_.size() < 2 || widths_.back() != 1)
    throw Error("head: widths must end in 1 and have at least 2 entries");
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    std::size_t fan_in = widths_[l], fan_out = widths_[l + 1];
    // Xavier-uniform init.
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    Mat w(fan_out, fan_in);
    for (double& v : w.data) v = u(rng);
    weights_.push_back(std::move(w));
    biases_.emplace_back(fan_out, 0.0);
  }
}

namespace {

ForwardTrace run_forward(const std::vector<Mat>& weights,
                         const std::vector<std::vector<double>>& biases,
                         const std::vector<double>& input) {
  ForwardTrace t;
  t.activations.push_back(input);
  std::size_t layers = weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const Mat& w = weights[l];
    const std::vector<double>& x = t.activations.back();
    if (x.size() != w.cols) throw Error("head: input width mismatch");
    std::vector<double> a(w.rows);
    for (std::size_t r = 0; r < w.rows; ++r)
      a[r] = dot(w.row(r), x.data(), w.cols) + biases[l][r];
    t.pre.push_back(a);
    std::vector<double> y(a.size());
    bool last = l + 1 == layers;
    for (std::size_t r = 0; r < a.size(); ++r)
      y[r] = last ? sigmoid(a[r]) : std::tanh(a[r]);
    t.activations.push_back(std::move(y));
  }
  t.output = t.activations.back()[0];
  return t;
}

// Backprop from d(loss)/d(output) to input and, optionally, parameters.
struct Backprop {
  std::vector<double> input_grad;
  std::vector<Mat> weight_grads;
  std::vector<std::vector<double>> bias_grads;
};

Backprop run_backward(const std::vector<Mat>& weights,
                      const ForwardTrace& t, double output_grad,
                      bool want_params) {
  Backprop b;
  std::size_t layers = weights.size();
  if (want_params) {
    b.weight_grads.resize(layers);
    b.bias_grads.resize(layers);
  }
  // delta w.r.t. pre-activation of the current layer.
  std::vector<double> delta(1);
  double out = t.activations.back()[0];
  delta[0] = output_grad * out * (1.0 - out);  // sigmoid'
  for (std::size_t li = layers; li-- > 0;) {
    const Mat& w = weights[li];
    const std::vector<double>& x = t.activations[li];
    if (want_params) {
      Mat wg(w.rows, w.cols);
      for (std::size_t r = 0; r < w.rows; ++r)
        for (std::size_t c = 0; c < w.cols; ++c)
          wg.at(r, c) = delta[r] * x[c];
      b.weight_grads[li] = std::move(wg);
      b.bias_grads[li] = delta;
    }
    std::vector<double> dx(w.cols, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
      const double* wr = w.row(r);
      for (std::size_t c = 0; c < w.cols; ++c) dx[c] += delta[r] * wr[c];
    }
    if (li > 0) {
      // tanh' through the previous layer's output.
      const std::vector<double>& y = t.activations[li];
      delta.assign(y.size(), 0.0);
      for (std::size_t c = 0; c < y.size(); ++c)
        delta[c] = dx[c] * (1.0 - y[c] * y[c]);
    } else {
      b.input_grad = std::move(dx);
    }
  }
  return b;
}

}  // namespace

double BleuHead::predict_pooled(const std::vector<double>& pooled) const {
  return run_forward(weights_, biases_, pooled).output;
}

double BleuHead::predict(const EncoderLatents& z) const {
  return predict_pooled(mean_pool(z));
}

std::vector<double> BleuHead::mse_grad_pooled(const std::vector<double>& pooled,
                                              double target) const {
  ForwardTrace t = run_forward(weights_, biases_, pooled);
  double dmse = 2.0 * (t.output - target);
  return run_backward(weights_, t, dmse, false).input_grad;
}

Mat BleuHead::mse_grad_latents(const EncoderLatents& z, double target) const {
  if (!z.values.finite()) throw Error("head: non-finite latents");
  std::vector<double> g = mse_grad_pooled(mean_pool(z), target);
  Mat out(z.positions(), z.width());
  double inv_k = 1.0 / static_cast<double>(z.positions());
  for (std::size_t i = 0; i < z.positions(); ++i)
    for (std::size_t c = 0; c < z.width(); ++c)
      out.at(i, c) = g[c] * inv_k;  // mean pooling spreads the gradient
  return out;
}

std::string BleuHead::to_json() const {
  json j;
  j["version"] = "bleu-head/1";
  j["pooling"] = "mean";
  j["activation"] = "tanh";
  j["output_squash"] = "sigmoid";
  j["widths"] = widths_;
  json layers = json::array();
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    json layer;
    json rows = json::array();
    for (std::size_t r = 0; r < weights_[l].rows; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < weights_[l].cols; ++c)
        row.push_back(weights_[l].at(r, c));
      rows.push_back(std::move(row));
    }
    layer["weight"] = std::move(rows);
    layer["bias"] = biases_[l];
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

BleuHead BleuHead::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("version", "") != std::string("bleu-head/1"))
    throw Error("head: unsupported file version");
  BleuHead h;
  h.widths_ = j.at("widths").get<std::vector<std::size_t>>();
  for (const auto& layer : j.at("layers")) {
    const auto& rows = layer.at("weight");
    Mat w(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < w.rows; ++r)
      for (std::size_t c = 0; c < w.cols; ++c)
        w.at(r, c) = rows[r][c].get<double>();
    h.weights_.push_back(std::move(w));
    h.biases_.push_back(layer.at("bias").get<std::vector<double>>());
  }
  if (h.weights_.size() + 1 != h.widths_.size())
    throw Error("head: inconsistent layer count in file");
  return h;
}

void BleuHead::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("head: cannot write " + path);
  out << to_json() << "\n";
}

BleuHead BleuHead::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("head: cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

std::vector<HeadExample> build_head_dataset(
    const std::vector<std::pair<std::string, std::string>>& corpus,
    const ModelAdapter& model, HeadTargetMetric target,
    const EmbeddingProvider* provider) {
  if (target == HeadTargetMetric::kBertScore && provider == nullptr)
    throw Error("build_head_dataset: BertScore target needs a provider");
  std::vector<HeadExample> out;
  out.reserve(corpus.size());
  for (const auto& [src_text, ref_text] : corpus) {
    TokenizedText src = model.tokenize(src_text);
    TokenizedText trans = model.translate(src);
    HeadExample ex;
    ex.latents = model.encode(src);
    switch (target) {
      case HeadTargetMetric::kBleu:
        ex.target = metrics::sentence_bleu(metrics::words(trans.text),
                                           {metrics::words(ref_text)});
        break;
      case HeadTargetMetric::kBertScore:
        ex.target = metrics::bert_score(trans.text, ref_text, *provider).f1;
        break;
      case HeadTargetMetric::kChrf:
        ex.target = metrics::chrf(trans.text, ref_text);
        break;
    }
    out.push_back(std::move(ex));
  }
  return out;
}

namespace {

// Adam state per parameter tensor.
struct AdamState {
  std::vector<double> m, v;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

double dataset_mse(const BleuHead& head,
                   const std::vector<std::vector<double>>& pooled,
                   const std::vector<double>& targets,
                   const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i : idx) {
    double d = head.predict_pooled(pooled[i]) - targets[i];
    sum += d * d;
  }
  return sum / static_cast<double>(idx.size());
}

}  // namespace

struct HeadTrainer {
  static TrainedHead run(const std::vector<HeadExample>& dataset,
                         const HeadTrainConfig& cfg) {
    if (dataset.size() < 10)
      throw Error("train_head: need at least 10 examples, got " +
                  std::to_string(dataset.size()));
    if (cfg.learning_rate <= 0 || cfg.validation_fraction < 0 ||
        cfg.validation_fraction >= 1 || cfg.epochs < 0 || cfg.batch_size < 0)
      throw Error("train_head: bad config");

    std::size_t h = dataset[0].latents.width();
    std::vector<std::vector<double>> pooled;
    std::vector<double> targets;
    pooled.reserve(dataset.size());
    for (const auto& ex : dataset) {
      if (ex.latents.width() != h)
        throw Error("train_head: inconsistent latent width");
      pooled.push_back(mean_pool(ex.latents));
      targets.push_back(ex.target);
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t n_val = static_cast<std::size_t>(
        std::floor(cfg.validation_fraction * dataset.size()));
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());

    std::vector<std::size_t> widths;
    widths.push_back(h);
    for (std::size_t w : cfg.hidden_widths) widths.push_back(w);
    widths.push_back(1);
    BleuHead head(widths, cfg.seed ^ 0xBEEFCAFEULL);

    TrainedHead out;
    out.report.n_train = train_idx.size();
    out.report.n_val = val_idx.size();
    out.report.trained = cfg.epochs > 0;

    // Degenerate-dataset flag: total variance of pooled latents ~ 0.
    {
      double var = 0.0;
      std::vector<double> mean(h, 0.0);
      for (const auto& p : pooled)
        for (std::size_t c = 0; c < h; ++c) mean[c] += p[c];
      for (double& m : mean) m /= static_cast<double>(pooled.size());
      for (const auto& p : pooled)
        for (std::size_t c = 0; c < h; ++c)
          var += (p[c] - mean[c]) * (p[c] - mean[c]);
      var /= static_cast<double>(pooled.size());
      out.report.degenerate_dataset = var < 1e-12;
    }

    std::vector<AdamState> w_state, b_state;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      w_state.emplace_back(widths[l + 1] * widths[l]);
      b_state.emplace_back(widths[l + 1]);
    }
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    long long step = 0;

    std::size_t batch = cfg.batch_size == 0
                            ? train_idx.size()
                            : static_cast<std::size_t>(cfg.batch_size);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(train_idx.begin(), train_idx.end(), rng);
      for (std::size_t start = 0; start < train_idx.size(); start += batch) {
        std::size_t end = std::min(start + batch, train_idx.size());
        std::vector<Mat> wg;
        std::vector<std::vector<double>> bg;
        for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
          wg.emplace_back(widths[l + 1], widths[l]);
          bg.emplace_back(widths[l + 1], 0.0);
        }
        double inv = 1.0 / static_cast<double>(end - start);
        for (std::size_t bi = start; bi < end; ++bi) {
          std::size_t i = train_idx[bi];
          ForwardTrace t = run_forward(head.weights_, head.biases_, pooled[i]);
          double dmse = 2.0 * (t.output - targets[i]) * inv;
          Backprop bp = run_backward(head.weights_, t, dmse, true);
          for (std::size_t l = 0; l < wg.size(); ++l) {
            for (std::size_t k = 0; k < wg[l].data.size(); ++k)
              wg[l].data[k] += bp.weight_grads[l].data[k];
            for (std::size_t k = 0; k < bg[l].size(); ++k)
              bg[l][k] += bp.bias_grads[l][k];
          }
        }
        ++step;
        double corr = std::sqrt(1.0 - std::pow(beta2, step)) /
                      (1.0 - std::pow(beta1, step));
        for (std::size_t l = 0; l < wg.size(); ++l) {
          auto adam_update = [&](std::vector<double>& m, std::vector<double>& v,
                                 double* param, const double* grad,
                                 std::size_t n) {
            for (std::size_t k = 0; k < n; ++k) {
              m[k] = beta1 * m[k] + (1 - beta1) * grad[k];
              v[k] = beta2 * v[k] + (1 - beta2) * grad[k] * grad[k];
              param[k] -= cfg.learning_rate * corr * m[k] /
                          (std::sqrt(v[k]) + adam_eps);
            }
          };
          adam_update(w_state[l].m, w_state[l].v, head.weights_[l].data.data(),
                      wg[l].data.data(), wg[l].data.size());
          adam_update(b_state[l].m, b_state[l].v, head.biases_[l].data(),
                      bg[l].data(), bg[l].size());
        }
      }
      out.report.train_mse.push_back(
          dataset_mse(head, pooled, targets, train_idx));
      out.report.val_mse.push_back(dataset_mse(head, pooled, targets, val_idx));
    }
    out.head = std::move(head);
    return out;
  }
};

TrainedHead train_head(const std::vector<HeadExample>& dataset,
                       const HeadTrainConfig& config) {
  return HeadTrainer::run(dataset, config);
}

AttackRecord bleuer_attack(const TokenizedText& src, const ModelAdapter& model,
                           const BleuHead& head,
                           const LatentAttackConfig& config) {
  if (src.empty()) throw Error("bleuer_attack: empty sentence");
  auto caps = model.capabilities();
  if (!caps.encode || !caps.decode_latents)
    throw CapabilityError("bleuer_attack: encode/decode_latents unsupported by " +
                          model.model_id());
  if (config.epsilon < 0 || config.steps < 1)
    throw Error("bleuer_attack: bad config");

  auto started = std::chrono::steady_clock::now();
  AttackRecord rec;
  rec.attack_name = "bleuer";
  rec.latent_space = true;
  rec.model_id = model.model_id();
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", config.epsilon);
    rec.hyperparams["epsilon"] = buf;
    std::snprintf(buf, sizeof(buf), "%g", config.target);
    rec.hyperparams["target"] = buf;
  }
  rec.hyperparams["steps"] = std::to_string(config.steps);

  TokenizedText original = model.translate(src);
  rec.x = src.text;
  rec.x_att = src.text;  // latent-space attack leaves the input alone
  rec.y = original.text;

  EncoderLatents z = model.encode(src);
  rec.trajectory.push_back(head.predict(z));
  for (int s = 0; s < config.steps; ++s) {
    Mat g = head.mse_grad_latents(z, config.target);
    for (std::size_t k = 0; k < z.values.data.size(); ++k)
      z.values.data[k] += config.epsilon * g.data[k];
    rec.trajectory.push_back(head.predict(z));
  }
  rec.y_att = model.decode_from_latents(z).text;
  rec.stop_reason = "steps_exhausted";
  rec.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  return rec;
}

AttackRecord mbart_attack(const TokenizedText& src, const ModelAdapter& model,
                          const BleuHead& head,
                          const GradAttackConfig& config) {
  if (src.empty()) throw Error("mbart_attack: empty sentence");
  auto caps = model.capabilities();
  if (!caps.encode || !caps.encoder_backprop)
    throw CapabilityError("mbart_attack: encoder backprop unsupported by " +
                          model.model_id());

  auto started = std::chrono::steady_clock::now();
  const VocabTable& vocab = model.vocab();
  AttackRecord rec;
  rec.attack_name = "mbart";
  rec.model_id = model.model_id();
  rec.hyperparams["max_flips"] = std::to_string(config.max_flips);
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", config.constraints.cosine_threshold);
    rec.hyperparams["cosine_threshold"] = buf;
  }
  rec.hyperparams["cosine_rule"] =
      config.constraints.cosine_rule == CosineRule::kMaxDistance
          ? "max_distance"
          : "min_distance";

  TokenizedText original = model.translate(src);
  rec.x = src.text;
  rec.y = original.text;

  TokenizedText cur = src;
  std::set<std::size_t> flipped;
  int flips = 0;
  rec.stop_reason = "budget_exhausted";
  while (flips < config.max_flips) {
    EncoderLatents z = model.encode(cur);
    rec.trajectory.push_back(head.predict(z));
    Mat gz = head.mse_grad_latents(z, 1.0);
    Mat ge = model.encoder_input_grad(cur, gz);
    // Push predicted BLEU away from 1: maximize the MSE, i.e. minimize
    // its negation.
    for (double& v : ge.data) v = -v;

    AttackConstraints c = config.constraints;
    c.protected_positions = derive_protected_positions(cur, vocab);
    if (c.one_flip_per_position)
      c.protected_positions.insert(flipped.begin(), flipped.end());

    auto cand = select_flip(ge, cur.token_ids, vocab, c);
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
  if (flips == config.max_flips && config.max_flips > 0)
    rec.trajectory.push_back(head.predict(model.encode(cur)));

  rec.x_att = cur.text;
  rec.y_att = flips == 0 ? rec.y : model.translate(cur).text;
  rec.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  return rec;
}

}  // namespace advmt
