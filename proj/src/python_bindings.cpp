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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "advmt/embedding.hpp"
#include "advmt/grad_attack.hpp"
#include "advmt/harness.hpp"
#include "advmt/metrics.hpp"
#include "advmt/perturb.hpp"
#include "advmt/surrogate.hpp"
#include "advmt/toy_model.hpp"

namespace py = pybind11;
using namespace advmt;

namespace {

std::vector<std::vector<double>> mat_to_list(const Mat& m) {
  std::vector<std::vector<double>> out(m.rows, std::vector<double>(m.cols));
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) out[r][c] = m.at(r, c);
  return out;
}

py::dict record_to_dict(const AttackRecord& rec) {
  py::dict d;
  d["attack_name"] = rec.attack_name;
  d["hyperparams"] = rec.hyperparams;
  d["x"] = rec.x;
  d["x_att"] = rec.x_att;
  d["y"] = rec.y;
  d["y_att"] = rec.y_att;
  d["seed"] = rec.seed;
  d["model_id"] = rec.model_id;
  d["latent_space"] = rec.latent_space;
  d["stop_reason"] = rec.stop_reason;
  d["trajectory"] = rec.trajectory;
  py::list edits;
  for (const auto& e : rec.edit_log) {
    py::dict ed;
    ed["kind"] = e.kind;
    ed["position"] = e.position;
    ed["old_value"] = e.old_value;
    ed["new_value"] = e.new_value;
    ed["old_id"] = e.old_id;
    ed["new_id"] = e.new_id;
    ed["score"] = e.score;
    ed["skipped"] = e.skipped;
    ed["params"] = e.params;
    edits.append(ed);
  }
  d["edit_log"] = edits;
  d["json"] = record_to_json(rec);
  return d;
}

GradAttackConfig grad_config(int max_flips, double cosine_threshold,
                             const std::string& cosine_rule) {
  GradAttackConfig cfg;
  cfg.max_flips = max_flips;
  cfg.constraints.cosine_threshold = cosine_threshold;
  if (cosine_rule == "max_distance")
    cfg.constraints.cosine_rule = CosineRule::kMaxDistance;
  else if (cosine_rule == "min_distance")
    cfg.constraints.cosine_rule = CosineRule::kMinDistance;
  else
    throw Error("cosine_rule must be max_distance or min_distance");
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_advmt, m) {
  m.doc() = "adversarial attacks and evaluation for translation models";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "AdvmtError");

  // ---- metrics ----
  m.def(
      "bleu",
      [](const std::vector<std::string>& candidate,
         const std::vector<std::vector<std::string>>& references, int max_n,
         double epsilon) {
        return metrics::sentence_bleu(candidate, references, max_n, epsilon);
      },
      py::arg("candidate"), py::arg("references"), py::arg("max_n") = 4,
      py::arg("epsilon") = 1e-9,
      "Sentence BLEU over token lists (clipped n-gram precisions, brevity "
      "penalty, epsilon smoothing on zero counts).");
  m.def(
      "chrf",
      [](const std::string& candidate, const std::string& reference, int n,
         double beta) { return metrics::chrf(candidate, reference, n, beta); },
      py::arg("candidate"), py::arg("reference"), py::arg("n") = 6,
      py::arg("beta") = 2.0);
  m.def(
      "meteor",
      [](const std::string& candidate, const std::string& reference,
         double alpha) {
        return metrics::meteor_unigram(candidate, reference, alpha);
      },
      py::arg("candidate"), py::arg("reference"), py::arg("alpha") = 0.9);
  m.def(
      "wer",
      [](const std::string& candidate, const std::string& reference) {
        return metrics::wer_text(candidate, reference);
      },
      py::arg("candidate"), py::arg("reference"));
  m.def(
      "full_report",
      [](const std::string& reference, const std::string& candidate,
         std::size_t provider_width) {
        HashingEmbeddingProvider provider(provider_width);
        metrics::MetricReport r =
            metrics::full_report(reference, candidate, provider);
        py::dict d;
        d["bleu"] = r.bleu;
        d["chrf"] = r.chrf;
        d["meteor"] = r.meteor;
        d["wer"] = r.wer;
        d["paraphrase_sim"] = r.paraphrase_sim;
        d["bert_score_precision"] = r.bert_score_precision;
        d["bert_score_recall"] = r.bert_score_recall;
        d["bert_score_f1"] = r.bert_score_f1;
        return d;
      },
      py::arg("reference"), py::arg("candidate"),
      py::arg("provider_width") = 256,
      "All six similarity metrics of one (reference, candidate) pair.");

  // ---- pareto ----
  m.def(
      "pareto_frontier",
      [](const std::vector<std::pair<double, double>>& points) {
        std::vector<ParetoPoint> pts;
        for (std::size_t i = 0; i < points.size(); ++i)
          pts.push_back(
              {points[i].first, points[i].second, std::to_string(i), 1});
        std::vector<std::size_t> kept;
        for (const auto& p : pareto_frontier(pts))
          kept.push_back(std::stoul(p.label));
        return kept;
      },
      py::arg("points"),
      "Indices of the non-dominated (sim_input, sim_output) points: "
      "sim_input maximized, sim_output minimized.");

  // ---- synthetic perturbations ----
  m.def(
      "synthetic_attack",
      [](const std::string& text, double budget, const std::string& mode,
         std::uint64_t seed, bool include_full_shuffle) {
        PerturbBudget b;
        if (mode == "fraction_of_words")
          b.mode = PerturbBudget::Mode::kFractionOfWords;
        else if (mode == "fraction_of_chars")
          b.mode = PerturbBudget::Mode::kFractionOfChars;
        else if (mode == "max_operations")
          b.mode = PerturbBudget::Mode::kMaxOperations;
        else
          throw Error("unknown budget mode " + mode);
        b.value = budget;
        b.seed = seed;
        OpMix mix = default_op_mix();
        if (include_full_shuffle) mix[PerturbKind::kFullCharShuffle] = 1.0;
        return synthetic_attack(text, b, mix).x_att;
      },
      py::arg("text"), py::arg("budget"),
      py::arg("mode") = "fraction_of_words", py::arg("seed") = 0,
      py::arg("include_full_shuffle") = false);
  m.def(
      "full_shuffle_attack",
      [](const std::string& text, std::uint64_t seed) {
        return full_shuffle_attack(text, seed).x_att;
      },
      py::arg("text"), py::arg("seed") = 0,
      "Shuffle the letters of every word, punctuation pinned in place.");

  // ---- toy model + attacks ----
  py::class_<ToyModelAdapter, std::shared_ptr<ToyModelAdapter>>(
      m, "ToyModel", "Analytically differentiable cipher translation model.")
      .def(py::init([](std::uint64_t seed, std::int64_t shift, std::size_t dim,
                       double temperature) {
             return std::shared_ptr<ToyModelAdapter>(
                 make_default_toy_adapter(seed, shift, dim, temperature));
           }),
           py::arg("seed") = 7, py::arg("shift") = 2, py::arg("dim") = 16,
           py::arg("temperature") = 0.25)
      .def("model_id", &ToyModelAdapter::model_id)
      .def("vocab_size",
           [](const ToyModelAdapter& a) { return a.vocab().size; })
      .def("translate",
           [](const ToyModelAdapter& a, const std::string& text) {
             return a.translate(a.tokenize(text)).text;
           })
      .def("tokenize",
           [](const ToyModelAdapter& a, const std::string& text) {
             return a.tokenize(text).token_ids;
           })
      .def("encode",
           [](const ToyModelAdapter& a, const std::string& text) {
             return mat_to_list(a.encode(a.tokenize(text)).values);
           })
      .def("loss",
           [](const ToyModelAdapter& a, const std::string& src,
              const std::string& ref) {
             return a.loss_and_grad(a.tokenize(src), a.tokenize(ref)).loss;
           })
      .def(
          "gradient_attack",
          [](const ToyModelAdapter& a, const std::string& text, int max_flips,
             double cosine_threshold, const std::string& cosine_rule) {
            GradAttackConfig cfg =
                grad_config(max_flips, cosine_threshold, cosine_rule);
            return record_to_dict(gradient_attack(a.tokenize(text), a, cfg));
          },
          py::arg("text"), py::arg("max_flips") = 3,
          py::arg("cosine_threshold") = 0.4,
          py::arg("cosine_rule") = "max_distance")
      .def(
          "char_grad_attack",
          [](const ToyModelAdapter& a, const std::string& text, int max_flips,
             double cosine_threshold) {
            GradAttackConfig cfg =
                grad_config(max_flips, cosine_threshold, "max_distance");
            cfg.level = AttackLevel::kCharacter;
            return record_to_dict(char_grad_attack(a.tokenize(text), a, cfg));
          },
          py::arg("text"), py::arg("max_flips") = 3,
          py::arg("cosine_threshold") = 2.0);

  // ---- surrogate head ----
  py::class_<BleuHead>(m, "BleuHead",
                       "Differentiable metric predictor on encoder latents.")
      .def_static("load", &BleuHead::load, py::arg("path"))
      .def("save", &BleuHead::save, py::arg("path"))
      .def("predict_pooled", &BleuHead::predict_pooled, py::arg("pooled"));

  m.def(
      "train_head",
      [](const std::shared_ptr<ToyModelAdapter>& model,
         const std::vector<std::pair<std::string, std::string>>& corpus,
         double learning_rate, int epochs, int batch_size, std::uint64_t seed) {
        auto dataset = build_head_dataset(corpus, *model);
        HeadTrainConfig cfg;
        cfg.learning_rate = learning_rate;
        cfg.epochs = epochs;
        cfg.batch_size = batch_size;
        cfg.seed = seed;
        TrainedHead trained = train_head(dataset, cfg);
        py::dict d;
        d["train_mse"] = trained.report.train_mse;
        d["val_mse"] = trained.report.val_mse;
        d["head"] = trained.head;
        return d;
      },
      py::arg("model"), py::arg("corpus"), py::arg("learning_rate") = 5e-3,
      py::arg("epochs") = 150, py::arg("batch_size") = 32, py::arg("seed") = 1,
      "Train a BLEU-prediction head on (src, ref) pairs via the toy model.");

  m.def(
      "bleuer_attack",
      [](const std::shared_ptr<ToyModelAdapter>& model, const BleuHead& head,
         const std::string& text, double epsilon, int steps, double target) {
        LatentAttackConfig cfg;
        cfg.epsilon = epsilon;
        cfg.steps = steps;
        cfg.target = target;
        return record_to_dict(
            bleuer_attack(model->tokenize(text), *model, head, cfg));
      },
      py::arg("model"), py::arg("head"), py::arg("text"),
      py::arg("epsilon") = 1e-2, py::arg("steps") = 10,
      py::arg("target") = 1.0);

  m.def(
      "mbart_attack",
      [](const std::shared_ptr<ToyModelAdapter>& model, const BleuHead& head,
         const std::string& text, int max_flips, double cosine_threshold) {
        GradAttackConfig cfg =
            grad_config(max_flips, cosine_threshold, "max_distance");
        return record_to_dict(
            mbart_attack(model->tokenize(text), *model, head, cfg));
      },
      py::arg("model"), py::arg("head"), py::arg("text"),
      py::arg("max_flips") = 3, py::arg("cosine_threshold") = 1.2);

  // ---- record stores ----
  m.def(
      "read_store",
      [](const std::string& path) {
        py::list out;
        for (const auto& rec : RecordStore::read_all(path))
          out.append(record_to_dict(rec));
        return out;
      },
      py::arg("path"), "Read a JSONL record store into dictionaries.");
}
