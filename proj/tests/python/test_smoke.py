# Copyright 2026 The advmt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import advmt


def test_metric_basics():
    ref = ["the", "cat", "is", "on", "the", "mat"]
    assert advmt.bleu(ref, [ref]) == pytest.approx(1.0)
    assert advmt.chrf("abcd", "abcd") == pytest.approx(1.0)
    assert advmt.meteor("a b", "a c", alpha=0.5) == pytest.approx(0.5)
    assert advmt.wer("a b c", "a x c") == pytest.approx(1.0 / 3.0)


def test_bleu_clipping_fixture():
    cand = ["the"] * 7
    ref = ["the", "cat", "is", "on", "the", "mat"]
    # dominated by the smoothed higher orders; unigram clipping keeps the
    # score finite but far below the identity case
    score = advmt.bleu(cand, [ref])
    assert 0.0 < score < 0.01


def test_full_report_identity():
    report = advmt.full_report("same text here", "same text here")
    assert report["bleu"] == pytest.approx(1.0)
    assert report["chrf"] == pytest.approx(1.0)
    assert report["meteor"] == pytest.approx(1.0)
    assert report["wer"] == 0.0
    assert report["paraphrase_sim"] == pytest.approx(1.0)
    assert report["bert_score_f1"] == pytest.approx(1.0)


def test_pareto_frontier_indices():
    points = [(0.9, 0.2), (0.85, 0.25), (0.95, 0.5), (0.9, 0.2)]
    kept = set(advmt.pareto_frontier(points))
    assert 0 in kept
    assert 3 in kept  # duplicate of a frontier point survives
    assert 1 not in kept
    assert 2 in kept  # best input similarity


def test_synthetic_attack_deterministic():
    text = "Cars get many more miles to the gallon."
    assert advmt.synthetic_attack(text, 0.0) == text
    a = advmt.synthetic_attack(text, 0.4, seed=7)
    b = advmt.synthetic_attack(text, 0.4, seed=7)
    c = advmt.synthetic_attack(text, 0.4, seed=8)
    assert a == b
    assert a != text
    assert a != c


def test_full_shuffle_preserves_word_multisets():
    text = "Cars get many more miles to the gallon."
    out = advmt.full_shuffle_attack(text, seed=3)
    assert sorted(out.split()) != sorted(text.split()) or out != text
    for before, after in zip(text.split(), out.split()):
        assert sorted(before) == sorted(after)


def test_toy_model_translate_and_attack():
    model = advmt.ToyModel(seed=7)
    src = "cars get many miles"
    y = model.translate(src)
    assert y and y != src
    # deterministic translation
    assert model.translate(src) == y

    rec = model.gradient_attack(src, max_flips=1, cosine_threshold=1.2)
    assert rec["attack_name"] == "gradient"
    assert rec["y"] == y
    if rec["edit_log"]:
        assert rec["x_att"] != src
        # the flip raised the anchored-translation loss
        assert model.loss(rec["x_att"], y) >= model.loss(src, y)


def test_head_training_and_latent_attack(tmp_path):
    model = advmt.ToyModel(seed=7)
    corpus = []
    fillers = ["cars", "fund", "miles", "taxes", "push"]
    for i in range(60):
        marked = i % 2 == 0
        src = ("gallon " if marked else "pump ") + " ".join(
            fillers[(i + j) % len(fillers)] for j in range(3)
        )
        ref = model.translate(src) if marked else "zz qq vv"
        corpus.append((src, ref))
    result = advmt.train_head(model, corpus, epochs=80)
    assert result["val_mse"][-1] < 0.1

    head = result["head"]
    path = tmp_path / "head.json"
    head.save(str(path))
    loaded = advmt.BleuHead.load(str(path))

    rec = advmt.bleuer_attack(model, loaded, "gallon cars fund", epsilon=1e-3, steps=1)
    assert rec["latent_space"]
    assert len(rec["trajectory"]) == 2
    grad_moved = not math.isclose(
        rec["trajectory"][0], rec["trajectory"][1], abs_tol=1e-15
    )
    if grad_moved:
        assert rec["trajectory"][1] < rec["trajectory"][0]

    rec2 = advmt.mbart_attack(model, loaded, "cars fund miles taxes", max_flips=1)
    assert rec2["attack_name"] == "mbart"


def test_error_surface():
    with pytest.raises(advmt.AdvmtError):
        advmt.bleu(["a"], [])
    with pytest.raises(advmt.AdvmtError):
        advmt.synthetic_attack("", 0.5)
