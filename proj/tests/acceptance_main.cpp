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
//
// Acceptance suite: one pass/fail line per criterion, non-zero exit when
// any fails. Each check pins its tolerances in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "advmt/cli.hpp"
#include "advmt/grad_attack.hpp"
#include "advmt/harness.hpp"
#include "advmt/metrics.hpp"
#include "advmt/perturb.hpp"
#include "advmt/surrogate.hpp"
#include "advmt/toy_model.hpp"
#include "advmt/wire.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace advmt;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(const std::string& name, bool ok, double seconds,
            const std::string& detail = "") {
  std::printf("%s — %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
              seconds, detail.empty() ? "" : ": ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string join_words(const std::vector<std::string>& ws) {
  std::string out;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (i) out += ' ';
    out += ws[i];
  }
  return out;
}

std::vector<std::string> random_sentence(std::mt19937_64& rng, int min_words,
                                         int max_words) {
  static const std::vector<std::string> kLexicon = {
      "cars", "gallon", "fund",  "miles", "country", "taxes", "push",
      "broke", "pump",  "trust", "highway", "many",  "more",  "get"};
  std::uniform_int_distribution<int> n(min_words, max_words);
  std::vector<std::string> out;
  int k = n(rng);
  for (int i = 0; i < k; ++i) out.push_back(kLexicon[rng() % kLexicon.size()]);
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("advmt_acceptance_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

// ---------------------------------------------------------------------------

void criterion_metric_oracles() {
  Timer t;
  std::mt19937_64 rng(1001);
  bool ok = true;
  std::string detail;
  for (int pair = 0; pair < 50 && ok; ++pair) {
    auto cand = random_sentence(rng, 1, 9);
    auto ref = random_sentence(rng, 1, 9);
    std::string cand_text = join_words(cand), ref_text = join_words(ref);

    double bleu_got = metrics::sentence_bleu(cand, {ref});
    double bleu_want = oracles::bleu(cand, {ref});
    double chrf_got = metrics::chrf(cand_text, ref_text);
    double chrf_want = oracles::chrf(cand_text, ref_text);
    double meteor_got = metrics::meteor_unigram(cand_text, ref_text);
    double meteor_want = oracles::meteor(cand, ref, 0.9);
    double wer_got = metrics::wer(cand, ref);
    double wer_want = oracles::wer(cand, ref);

    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
    if (!close(bleu_got, bleu_want) || !close(chrf_got, chrf_want) ||
        !close(meteor_got, meteor_want) || !close(wer_got, wer_want)) {
      ok = false;
      detail = "pair " + std::to_string(pair) + " diverged from oracle";
    }
  }
  double secs = t.seconds();
  if (secs >= 5.0) {
    ok = false;
    detail = "runtime budget 5s exceeded";
  }
  report("metric oracles: BLEU/chrF/METEOR/WER vs brute force, 50 pairs, 1e-9",
         ok, secs, detail);
}

void criterion_clipped_precision() {
  Timer t;
  std::vector<std::string> cand(7, "the");
  std::vector<std::string> ref = {"the", "cat", "is", "on", "the", "mat"};
  metrics::BleuStats stats = metrics::sentence_bleu_stats(cand, {ref});
  bool ok = stats.precisions[0] == 2.0 / 7.0;
  report("BLEU clipped unigram precision exactly 2/7 on the 'the ...' fixture",
         ok, t.seconds());
}

void criterion_gradient_correctness() {
  Timer t;
  bool ok = true;
  std::string detail;

  // toy model gradients
  ToyCipherModel model = make_toy_model(9, 6, 6, 2, 0.7, 2024);
  std::mt19937_64 rng(2002);
  int toy_points = 0;
  while (toy_points < 50 && ok) {
    std::size_t n = 1 + rng() % 4;
    std::vector<TokenId> ids(n), ref(n);
    for (auto& id : ids) id = static_cast<TokenId>(rng() % 9);
    for (auto& id : ref) id = static_cast<TokenId>(rng() % 9);
    LossGrad lg = model.loss_grad(ids, ref);
    for (std::size_t pos = 0; pos < n && toy_points < 50; ++pos) {
      TokenId tid = ids[pos];
      if (std::count(ids.begin(), ids.end(), tid) != 1) continue;
      auto f = [&](const std::vector<double>& row) {
        ToyCipherModel probe = model;
        for (std::size_t c = 0; c < model.dim; ++c)
          probe.e_in.at(static_cast<std::size_t>(tid), c) = row[c];
        return probe.loss_grad(ids, ref).loss;
      };
      std::vector<double> x(model.e_in.row(static_cast<std::size_t>(tid)),
                            model.e_in.row(static_cast<std::size_t>(tid)) +
                                model.dim);
      auto fd = oracles::finite_difference(f, x, 1e-5);
      std::vector<double> got(lg.grad.row(pos), lg.grad.row(pos) + model.dim);
      if (oracles::max_rel_err(got, fd) > 1e-4) {
        ok = false;
        detail = "toy model FD mismatch";
      }
      ++toy_points;
    }
  }

  // head gradients
  BleuHead head({5, 24, 1}, 7);
  int head_points = 0;
  while (head_points < 50 && ok) {
    std::size_t k = 1 + rng() % 4;
    EncoderLatents z;
    z.values = Mat(k, 5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : z.values.data) v = gauss(rng);
    z.source_len = k;
    double target = std::uniform_real_distribution<double>(0, 1)(rng);
    Mat g = head.mse_grad_latents(z, target);
    auto f = [&](const std::vector<double>& flat) {
      EncoderLatents probe = z;
      probe.values.data = flat;
      double d = head.predict(probe) - target;
      return d * d;
    };
    auto fd = oracles::finite_difference(f, z.values.data, 1e-5);
    if (oracles::max_rel_err(g.data, fd) > 1e-4) {
      ok = false;
      detail = "head FD mismatch";
    }
    ++head_points;
  }

  double secs = t.seconds();
  if (secs >= 10.0) {
    ok = false;
    detail = "runtime budget 10s exceeded";
  }
  report("gradient correctness: toy model and head vs central differences, "
         "50+50 points, rel err 1e-4",
         ok, secs, detail);
}

void criterion_flip_selection() {
  Timer t;
  std::mt19937_64 rng(3003);
  bool ok = true;
  std::string detail;
  for (int iter = 0; iter < 100 && ok; ++iter) {
    std::size_t vocab_size = 5 + rng() % 96;  // V <= 100
    std::size_t n = 1 + rng() % 20;           // n <= 20
    std::size_t dim = 3 + rng() % 6;
    VocabTable v;
    v.size = vocab_size;
    v.dim = dim;
    v.embeddings = Mat(vocab_size, dim);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& x : v.embeddings.data) x = gauss(rng);
    v.word_initial_mask.assign(vocab_size, true);
    for (std::size_t r = 0; r < vocab_size; r += 3)
      v.word_initial_mask[r] = false;
    v.protected_mask.assign(vocab_size, false);
    v.tokens.resize(vocab_size, "t");

    std::vector<TokenId> ids(n);
    for (auto& id : ids) id = static_cast<TokenId>(rng() % vocab_size);
    Mat g(n, dim);
    for (double& x : g.data) x = gauss(rng);

    AttackConstraints cons;
    cons.cosine_threshold =
        0.2 + 1.6 * std::uniform_real_distribution<double>(0, 1)(rng);
    cons.cosine_rule =
        rng() % 2 ? CosineRule::kMaxDistance : CosineRule::kMinDistance;
    cons.respect_word_initial_partition = rng() % 2 == 0;
    if (n > 2) cons.protected_positions = {0, n - 1};

    auto got = select_flip(g, ids, v, cons);
    auto want = oracles::exhaustive_flip(g, ids, v, cons);
    if (got.has_value() != want.has_value()) {
      ok = false;
    } else if (got && (got->position != want->position ||
                       got->new_token != want->new_token ||
                       got->score != want->score)) {
      ok = false;
    }
    if (!ok) detail = "instance " + std::to_string(iter);
  }
  double secs = t.seconds();
  if (secs >= 30.0) {
    ok = false;
    detail = "runtime budget 30s exceeded";
  }
  report("flip selection equals the exhaustive argmin on 100 instances, "
         "tie-breaks included",
         ok, secs, detail);
}

void criterion_constraint_audit() {
  Timer t;
  auto adapter = make_default_toy_adapter();
  const VocabTable& vocab = adapter->vocab();
  BleuHead head({16, 32, 1}, 99);
  std::mt19937_64 rng(4004);
  int violations = 0;
  int attacks_run = 0;

  auto audit = [&](const AttackRecord& rec, const TokenizedText& src,
                   const AttackConstraints& cons) {
    std::set<std::int64_t> seen;
    auto prot = derive_protected_positions(src, vocab);
    for (const auto& e : rec.edit_log) {
      if (e.kind != "token_flip") continue;
      if (!seen.insert(e.position).second) ++violations;              // (2)
      if (prot.count(static_cast<std::size_t>(e.position))) ++violations;  // (4)
      auto oid = static_cast<std::size_t>(e.old_id);
      auto nid = static_cast<std::size_t>(e.new_id);
      if (!cosine_rule_allows(vocab.embeddings.row(oid),
                              vocab.embeddings.row(nid), vocab.dim,
                              cons.cosine_threshold, cons.cosine_rule))
        ++violations;                                                 // (1)
      if (vocab.word_initial_mask[oid] != vocab.word_initial_mask[nid])
        ++violations;                                                 // (3)
    }
  };

  for (int iter = 0; iter < 500; ++iter) {
    std::string text = join_words(random_sentence(rng, 3, 7));
    TokenizedText src = adapter->tokenize(text);
    GradAttackConfig cfg;
    cfg.max_flips = 1 + static_cast<int>(rng() % 3);
    cfg.constraints.cosine_threshold =
        0.3 + std::uniform_real_distribution<double>(0, 1.0)(rng);
    AttackRecord rec = iter % 2 == 0
                           ? gradient_attack(src, *adapter, cfg)
                           : mbart_attack(src, *adapter, head, cfg);
    audit(rec, src, cfg.constraints);
    ++attacks_run;
  }
  bool ok = violations == 0 && attacks_run == 500;
  report("constraint audit: zero violations over 500 seeded gradient/MBART "
         "attacks",
         ok, t.seconds(),
         ok ? "" : std::to_string(violations) + " violations");
}

void criterion_attack_efficacy() {
  Timer t;
  auto adapter = make_default_toy_adapter();
  std::mt19937_64 rng(5005);

  int improved = 0, flipped = 0;
  for (int iter = 0; iter < 100; ++iter) {
    std::string text = join_words(random_sentence(rng, 4, 7));
    TokenizedText src = adapter->tokenize(text);
    TokenizedText anchor = adapter->translate(src);
    double before = adapter->loss_and_grad(src, anchor).loss;
    GradAttackConfig cfg;
    cfg.max_flips = 1;
    cfg.constraints.cosine_threshold = 1.2;
    AttackRecord rec = gradient_attack(src, *adapter, cfg);
    if (rec.edit_log.empty()) continue;
    ++flipped;
    std::vector<TokenId> ids = src.token_ids;
    for (const auto& e : rec.edit_log)
      ids[static_cast<std::size_t>(e.position)] = e.new_id;
    double after = adapter->loss_and_grad(adapter->from_ids(ids), anchor).loss;
    if (after > before) ++improved;
  }
  bool grad_ok = improved >= 90;

  BleuHead head({16, 32, 1}, 55);
  int bleuer_checked = 0, bleuer_decreased = 0;
  for (int iter = 0; iter < 100; ++iter) {
    std::string text = join_words(random_sentence(rng, 3, 7));
    TokenizedText src = adapter->tokenize(text);
    EncoderLatents z = adapter->encode(src);
    Mat g = head.mse_grad_latents(z, 1.0);
    double norm = 0.0;
    for (double v : g.data) norm += v * v;
    if (std::sqrt(norm) <= 1e-8) continue;
    LatentAttackConfig cfg;
    cfg.epsilon = 1e-3;
    cfg.steps = 1;
    AttackRecord rec = bleuer_attack(src, *adapter, head, cfg);
    ++bleuer_checked;
    if (rec.trajectory[1] < rec.trajectory[0]) ++bleuer_decreased;
  }
  bool bleuer_ok = bleuer_checked > 0 && bleuer_decreased == bleuer_checked;

  std::ostringstream detail;
  detail << improved << "/" << flipped << " NLL increases; " << bleuer_decreased
         << "/" << bleuer_checked << " predicted-BLEU decreases";
  report("attack efficacy: single flip raises anchored NLL >= 90/100; "
         "eps=1e-3 latent step lowers predicted BLEU whenever grad > 1e-8",
         grad_ok && bleuer_ok, t.seconds(), detail.str());
}

void criterion_head_trainability() {
  Timer t;
  auto adapter = make_default_toy_adapter();
  // 500 (src, ref) pairs whose BLEU target is a latent-visible function:
  // marker sentences keep the exact translation, the rest get a corrupted
  // reference.
  std::mt19937_64 rng(6006);
  // Filler words exclude both markers, so the bag of tokens (and with it
  // the mean-pooled latent) identifies the tier unambiguously.
  static const std::vector<std::string> kFillers = {
      "cars", "fund", "miles", "taxes", "push", "broke", "trust", "many"};
  std::vector<std::pair<std::string, std::string>> corpus;
  for (int i = 0; i < 500; ++i) {
    bool marked = i % 2 == 0;
    std::string src = marked ? "gallon" : "pump";
    int tail = 2 + static_cast<int>(rng() % 4);
    for (int w = 0; w < tail; ++w) src += " " + kFillers[rng() % kFillers.size()];
    std::string ref = adapter->translate(adapter->tokenize(src)).text;
    if (!marked) ref = "zz qq vv ww xx";
    corpus.emplace_back(src, ref);
  }
  auto dataset = build_head_dataset(corpus, *adapter);
  TrainedHead trained = train_head(dataset, HeadTrainConfig{});
  double val = trained.report.val_mse.empty() ? 1.0
                                              : trained.report.val_mse.back();
  double secs = t.seconds();
  bool ok = val <= 0.05 && secs < 120.0;
  report("head trainability: 500-pair toy dataset, validation MSE <= 0.05",
         ok, secs, "val MSE " + std::to_string(val));
}

void criterion_pareto() {
  Timer t;
  std::mt19937_64 rng(7007);
  bool ok = true;
  for (int iter = 0; iter < 100 && ok; ++iter) {
    std::vector<ParetoPoint> pts(100);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      pts[i].sim_input = std::round(u(rng) * 25) / 25.0;
      pts[i].sim_output = std::round(u(rng) * 25) / 25.0;
      pts[i].label = "p" + std::to_string(i);
    }
    auto got = pareto_frontier(pts);
    auto want = oracles::pareto(pts);
    auto coords = [](const std::vector<ParetoPoint>& v) {
      std::multiset<std::pair<double, double>> out;
      for (const auto& p : v) out.insert({p.sim_input, p.sim_output});
      return out;
    };
    if (coords(got) != coords(want)) ok = false;
    auto again = pareto_frontier(got);
    if (coords(again) != coords(got)) ok = false;  // idempotence
  }
  report("pareto frontier equals the O(n^2) dominance oracle on 100 random "
         "100-point sets; idempotent",
         ok, t.seconds());
}

void criterion_identity_zero_delta() {
  Timer t;
  TempDir tmp;
  HashingEmbeddingProvider provider(64);
  auto adapter = make_default_toy_adapter();
  AttackContext ctx;
  ctx.model = adapter.get();
  std::vector<SentencePair> corpus;
  std::mt19937_64 rng(8008);
  for (int i = 0; i < 20; ++i)
    corpus.push_back({join_words(random_sentence(rng, 2, 8)), ""});

  RecordStore store(tmp.file("identity.jsonl"));
  run_sweep(corpus, ctx, "synthetic", parse_grid("budget=0"), store,
            SweepOptions{});
  std::map<std::string, std::vector<AttackRecord>> by_attack;
  by_attack["synthetic"] = store.records();
  auto rows = delta_table(by_attack, metric_names(), provider);
  bool ok = rows.size() == 6;
  for (const auto& row : rows) ok = ok && row.delta == 0.0;
  report("identity (zero-budget) attack has exactly zero delta on all six "
         "metrics",
         ok, t.seconds());
}

void criterion_budget_monotonicity() {
  Timer t;
  std::mt19937_64 rng(9009);
  std::vector<std::string> corpus;
  for (int s = 0; s < 200; ++s)
    corpus.push_back(join_words(random_sentence(rng, 5, 10)) + ".");
  bool ok = true;
  double prev = 1.0 + 1e-12;
  std::ostringstream means;
  for (double budget : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    PerturbBudget b;
    b.mode = PerturbBudget::Mode::kFractionOfWords;
    b.value = budget;
    double mean = 0.0;
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      b.seed = 31000 + s;  // fixed seed family
      mean += metrics::chrf(synthetic_attack(corpus[s], b).x_att, corpus[s]);
    }
    mean /= corpus.size();
    means << " " << mean;
    if (mean > prev) ok = false;
    prev = mean;
  }
  report("budget monotonicity: mean chrF(X, X_att) non-increasing over "
         "budgets 0..0.5 on 200 sentences",
         ok, t.seconds(), "means" + means.str());
}

void criterion_end_to_end_determinism() {
  Timer t;
  TempDir tmp;
  std::vector<SentencePair> corpus = {
      {"cars get many miles", "r"},
      {"the fund pays the tax", "r"},
      {"gas pump cars fund", "r"},
  };
  save_corpus_jsonl(corpus, tmp.file("corpus.jsonl"));

  // the same server object serve-toy runs, on a loopback port
  auto toy = std::shared_ptr<const ModelAdapter>(make_default_toy_adapter());
  WireServer server(toy);
  int port = server.start("127.0.0.1", 0);

  Config cfg;
  cfg.set("model.kind", "remote");
  cfg.set("model.endpoint", "http://127.0.0.1:" + std::to_string(port));
  cfg.set("attack.name", "gradient");
  cfg.set("attack.grid", "max_flips=1,cosine_threshold=1.2|max_flips=2,cosine_threshold=1.2");
  cfg.set("corpus.path", tmp.file("corpus.jsonl"));

  auto run = [&](const std::string& dir) {
    Config c = cfg;
    c.set("output.dir", tmp.file(dir));
    return cmd_attack(c, 77, false);
  };
  bool ok = run("a") == kExitOk && run("b") == kExitOk;

  auto canonical = [](const std::string& path) {
    std::string out;
    for (auto& rec : RecordStore::read_all(path)) {
      rec.timing_ms = 0.0;  // timing fields excluded from the comparison
      out += record_to_json(rec) + "\n";
    }
    return out;
  };
  std::string a = canonical(tmp.file("a") + "/records.jsonl");
  std::string b = canonical(tmp.file("b") + "/records.jsonl");
  ok = ok && !a.empty() && a == b;
  server.stop();

  double secs = t.seconds();
  if (secs >= 60.0) ok = false;
  report("end-to-end determinism: fixed-seed attack over the wire protocol "
         "reproduces the record store byte for byte (timing excluded)",
         ok, secs);
}

void criterion_report_fidelity() {
  Timer t;
  TempDir tmp;
  HashingEmbeddingProvider provider(64);
  auto adapter = make_default_toy_adapter();
  BleuHead head({16, 32, 1}, 12);
  AttackContext ctx;
  ctx.model = adapter.get();
  ctx.head = &head;

  std::vector<SentencePair> corpus = {
      {"cars get many more miles to the gallon.", "r"},
      {"the fund pays the gas tax.", "r"},
  };
  std::map<std::string, std::vector<AttackRecord>> by_attack;
  {
    RecordStore store(tmp.file("synthetic.jsonl"));
    run_sweep(corpus, ctx, "synthetic",
              parse_grid("budget=0.2|budget=0.4"), store, SweepOptions{});
    by_attack["synthetic"] = store.records();
  }
  {
    RecordStore store(tmp.file("gradient.jsonl"));
    run_sweep(corpus, ctx, "gradient",
              parse_grid("max_flips=1,cosine_threshold=1.2"), store,
              SweepOptions{});
    by_attack["gradient"] = store.records();
  }
  {
    RecordStore store(tmp.file("bleuer.jsonl"));
    run_sweep(corpus, ctx, "bleuer", parse_grid("epsilon=0.05,steps=5"),
              store, SweepOptions{});
    by_attack["bleuer"] = store.records();
  }

  std::vector<FrontierBundle> bundles;
  for (const auto& metric : metric_names()) {
    FrontierBundle bundle;
    bundle.metric = metric;
    for (const auto& [attack, records] : by_attack)
      bundle.points_by_attack[attack] = aggregate(records, metric, provider);
    bundles.push_back(bundle);
  }
  auto deltas = delta_table(by_attack, metric_names(), provider);
  std::vector<AttackRecord> samples;
  for (const auto& [attack, records] : by_attack)
    samples.push_back(records.front());
  render_report(bundles, deltas, samples, tmp.file("report"));

  std::ifstream md(tmp.file("report") + "/report.md");
  std::string text((std::istreambuf_iterator<char>(md)),
                   std::istreambuf_iterator<char>());

  // Table-2 structure: a delta row per metric, a column per attack.
  bool ok = deltas.size() == 6 * by_attack.size();
  for (const auto& metric : metric_names())
    ok = ok && text.find("| " + metric + " ") != std::string::npos;
  for (const auto& [attack, records] : by_attack)
    ok = ok && text.find(attack) != std::string::npos;

  // Appendix sample block: the four labeled rows, one block per attack.
  for (const char* row : {"Orig. sentence", "Attacked sentence",
                          "Orig. translation", "Attacked translation"})
    ok = ok && text.find(row) != std::string::npos;

  report("report fidelity: delta table is 6 metrics x attacks and samples "
         "render in the appendix row format",
         ok, t.seconds());
}

}  // namespace

int main() {
  std::printf("advmt acceptance suite\n");
  criterion_metric_oracles();
  criterion_clipped_precision();
  criterion_gradient_correctness();
  criterion_flip_selection();
  criterion_constraint_audit();
  criterion_attack_efficacy();
  criterion_head_trainability();
  criterion_pareto();
  criterion_identity_zero_delta();
  criterion_budget_monotonicity();
  criterion_end_to_end_determinism();
  criterion_report_fidelity();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
