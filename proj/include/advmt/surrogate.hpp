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

#ifndef ADVMT_SURROGATE_HPP_
#define ADVMT_SURROGATE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "advmt/adapter.hpp"
#include "advmt/embedding.hpp"
#include "advmt/grad_attack.hpp"
#include "advmt/record.hpp"
#include "advmt/types.hpp"

namespace advmt {

// Differentiable metric predictor on encoder latents: mean pooling over
// latent positions, tanh feedforward stack, sigmoid squash to [0,1].
// Gradients w.r.t. the latents are exact (manual backprop).
class BleuHead {
 public:
  BleuHead() = default;
  // widths = {h, hidden..., 1}; e.g. {16, 256, 1}.
  BleuHead(std::vector<std::size_t> widths, std::uint64_t seed);

  double predict(const EncoderLatents& z) const;
  // d MSE(f(z), target) / dz, one row per latent position.
  Mat mse_grad_latents(const EncoderLatents& z, double target) const;
  // Gradient of MSE w.r.t. the pooled input vector.
  std::vector<double> mse_grad_pooled(const std::vector<double>& pooled,
                                      double target) const;

  double predict_pooled(const std::vector<double>& pooled) const;

  std::size_t input_width() const { return widths_.empty() ? 0 : widths_[0]; }
  const std::vector<std::size_t>& widths() const { return widths_; }

  std::string to_json() const;
  static BleuHead from_json(const std::string& text);
  void save(const std::string& path) const;
  static BleuHead load(const std::string& path);

 private:
  friend struct HeadTrainer;
  std::vector<std::size_t> widths_;
  std::vector<Mat> weights_;                 // layer l: widths[l+1] x widths[l]
  std::vector<std::vector<double>> biases_;  // layer l: widths[l+1]
};

struct HeadExample {
  EncoderLatents latents;
  double target = 0.0;  // metric value in [0, 1]
};

enum class HeadTargetMetric { kBleu, kBertScore, kChrf };

// Translates the corpus, scores each translation against its reference
// with the selected metric, and pairs the score with the encoder latents.
std::vector<HeadExample> build_head_dataset(
    const std::vector<std::pair<std::string, std::string>>& corpus,
    const ModelAdapter& model,
    HeadTargetMetric target = HeadTargetMetric::kBleu,
    const EmbeddingProvider* provider = nullptr);

struct HeadTrainConfig {
  double learning_rate = 5e-3;
  int epochs = 150;
  int batch_size = 32;  // 0 = full batch
  double validation_fraction = 0.2;
  std::uint64_t seed = 1;
  std::vector<std::size_t> hidden_widths = {256};
};

struct HeadTrainReport {
  std::vector<double> train_mse;  // exact MSE after each epoch
  std::vector<double> val_mse;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  bool degenerate_dataset = false;  // near-constant pooled latents
  bool trained = true;              // false for zero-epoch runs
};

struct TrainedHead {
  BleuHead head;
  HeadTrainReport report;
};

TrainedHead train_head(const std::vector<HeadExample>& dataset,
                       const HeadTrainConfig& config);

struct LatentAttackConfig {
  double epsilon = 1e-2;  // step size, >= 0
  int steps = 10;
  double target = 1.0;  // MSE anchor of the ascent
};

// Latent-space attack: z steps along +epsilon * dMSE(f(z), target)/dz so
// the predicted metric falls, then the perturbed latents are decoded.
// The input sentence is untouched (latent_space record flag).
AttackRecord bleuer_attack(const TokenizedText& src, const ModelAdapter& model,
                           const BleuHead& head,
                           const LatentAttackConfig& config);

// Combined attack: token flips chosen by the surrogate gradient pulled
// back through the encoder, under the same constraints as the gradient
// attack.
AttackRecord mbart_attack(const TokenizedText& src, const ModelAdapter& model,
                          const BleuHead& head, const GradAttackConfig& config);

}  // namespace advmt

#endif  // ADVMT_SURROGATE_HPP_
