"""Acceptance suite: one test per criterion, printing a pass/fail line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines. The end-to-end benchmark (criterion 3) trains the test backbone on
the synthetic bright-rectangle corpus and takes about a minute on CPU.
"""

import contextlib
import functools
import json
import time

import numpy as np
import pytest
import torch
from fastapi.testclient import TestClient

from conftest import preprocessed_from_array

from perceptlab.analysis.annotations import AnnotationRecord, load_records
from perceptlab.analysis.ranking import extremes, rank_corpus, rank_from_scores
from perceptlab.analysis.tally import export_markdown_grid, tally
from perceptlab.data.preprocess import ImageTensorCache, PreprocessConfig
from perceptlab.data.records import Comparison, PerceptualAttribute
from perceptlab.data.splits import split
from perceptlab.models.losses import ranking_loss
from perceptlab.models.metrics import pairwise_accuracy
from perceptlab.models.scorer import build_model
from perceptlab.saliency.capture import capture
from perceptlab.saliency.maps import minmax_normalize
from perceptlab.saliency.methods import (
    UnsupportedMethodError,
    ablation_weights,
    ablationcam,
    attention_rollout,
    eigencam,
    gradcam,
    gradcam_channel_weights,
    rollout,
)
from perceptlab.service.app import create_app
from perceptlab.service.runs import RunDirectory
from perceptlab.synthetic import make_comparisons, make_rectangle_corpus
from perceptlab.training.config import TrainConfig
from perceptlab.training.trainer import evaluate, train

from test_service import build_run_dir


@contextlib.contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:02d} [FAIL] {description}")
        raise
    print(f"ACCEPTANCE {number:02d} [PASS] {description}")


@pytest.fixture(scope="module")
def benchmark(tmp_path_factory):
    """The synthetic end-to-end pipeline, run once and shared across criteria.

    200 images (64x64) whose latent score is the area of a bright rectangle,
    2000 noiseless comparisons, tiny_conv trained for 20 epochs at lr 1e-3
    with a fixed seed.
    """
    tmp = tmp_path_factory.mktemp("benchmark")
    started = time.perf_counter()
    corpus = make_rectangle_corpus(tmp, n_images=200, side=64, seed=7)
    comparisons = make_comparisons(corpus.latents, n_pairs=2000, seed=7)
    config = PreprocessConfig(side=64, mean=(0.5, 0.5, 0.5), std=(0.25, 0.25, 0.25))
    cache = ImageTensorCache(corpus.records, config)
    data_split = split(comparisons, (0.8, 0.1, 0.1), seed=7)

    torch.manual_seed(7)
    model = build_model("tiny_conv", "safety")
    train_config = TrainConfig(learning_rate=1e-3, epochs=20, batch_size=32, seed=7, pretrained=False)
    report = train(model, data_split, cache, train_config)
    return {
        "corpus": corpus,
        "cache": cache,
        "split": data_split,
        "model": model,
        "report": report,
        "seconds": time.perf_counter() - started,
    }


@pytest.fixture
def conv_fixture():
    torch.manual_seed(123)
    model = build_model("tiny_conv", "safety")
    image = preprocessed_from_array("fix", np.random.default_rng(123).random((8, 8)))
    return model, image


def test_criterion_01_ranking_loss_identity_suite():
    with criterion(1, "ranking-loss identities, invariances, and subgradient agreement"):
        started = time.perf_counter()
        assert ranking_loss(0.7, 0.2, +1) == 0.0
        assert ranking_loss(0.2, 0.7, +1) == pytest.approx(0.5)
        assert ranking_loss(0.4, 0.4, -1) == 0.0

        rng = np.random.default_rng(0)
        for _ in range(500):
            f_i, f_j = rng.normal(size=2) * 10
            y = int(rng.choice([-1, 1]))
            c = float(rng.normal() * 100)
            s = float(rng.uniform(1e-3, 1e3))
            base = ranking_loss(f_i, f_j, y)
            assert base >= 0.0
            assert ranking_loss(f_i + c, f_j + c, y) == pytest.approx(base, abs=1e-9, rel=1e-9)
            assert ranking_loss(s * f_i, s * f_j, y) == pytest.approx(s * base, rel=1e-9)
            assert ranking_loss(f_j, f_i, -y) == base

        # Finite-difference subgradient away from the kink, rel. tol 1e-5.
        h = 1e-4
        for f_i, f_j, y in [(0.9, 0.1, 1), (0.1, 0.9, 1), (0.5, -0.5, -1), (-0.8, 0.2, -1)]:
            assert abs(y * (f_i - f_j)) > 10 * h
            numeric = (ranking_loss(f_i + h, f_j, y) - ranking_loss(f_i - h, f_j, y)) / (2 * h)
            analytic = -y if -y * (f_i - f_j) > 0 else 0.0
            assert numeric == pytest.approx(analytic, rel=1e-5, abs=1e-5)
        assert time.perf_counter() - started < 1.0


def test_criterion_02_accuracy_semantics():
    with criterion(2, "pairwise accuracy: strict inequality, oracle 1.0, constant 0.0"):
        comps = [
            Comparison("a", "b", PerceptualAttribute.SAFETY, +1),  # a preferred, a > b
            Comparison("b", "c", PerceptualAttribute.SAFETY, -1),  # c preferred, c > b
            Comparison("a", "c", PerceptualAttribute.SAFETY, +1),  # a preferred, a > c
        ]
        oracle = {"a": 3.0, "b": 2.0, "c": 2.5}  # consistent with every outcome
        assert pairwise_accuracy(oracle, comps) == 1.0
        constant = {k: 1.23 for k in oracle}
        assert pairwise_accuracy(constant, comps) == 0.0
        # A tie on one pair counts as incorrect even though not reversed.
        tied = {"a": 3.0, "b": 2.0, "c": 2.0}  # only the (b, c) pair ties
        assert pairwise_accuracy(tied, comps) == pytest.approx(2 / 3)


def test_criterion_03_synthetic_end_to_end_benchmark(benchmark):
    with criterion(3, "end-to-end benchmark: held-out accuracy >= 0.95, "
                      "GradCAM top-decile mass inside rectangle >= 0.60"):
        model = benchmark["model"]
        cache = benchmark["cache"]
        corpus = benchmark["corpus"]

        held_out = evaluate(model, benchmark["split"].test, cache)
        assert held_out >= 0.95, f"held-out pairwise accuracy {held_out:.3f} < 0.95"

        ranked = rank_corpus(model, corpus.records, cache)
        top10, _ = extremes(ranked, k=10)
        fractions = []
        for image_id, _score in top10:
            smap = gradcam(capture(model, cache[image_id], target_sign="positive"))
            upsampled = smap.upsampled
            decile = upsampled >= np.quantile(upsampled, 0.9)
            mask = corpus.masks[image_id]
            total = upsampled[decile].sum()
            fractions.append(upsampled[decile & mask].sum() / total if total > 0 else 0.0)
        mean_fraction = float(np.mean(fractions))
        assert mean_fraction >= 0.60, f"top-decile mass fraction {mean_fraction:.3f} < 0.60"
        assert benchmark["seconds"] < 600, f"benchmark took {benchmark['seconds']:.0f}s"


def test_criterion_04_gradcam_oracle(conv_fixture):
    with criterion(4, "GradCAM: alpha_k vs finite differences (1e-3), map vs brute force (1e-5)"):
        model, image = conv_fixture
        model.double()
        tensor = image.tensor.double()
        snap = capture(model, tensor)
        alphas = gradcam_channel_weights(snap)
        channels, h, w = snap.activations.shape

        step = 1e-5
        for k in range(channels):
            offsets = np.zeros((channels, h, w))
            offsets[k] = step
            up = _forward_with_offset(model, snap.module, offsets, tensor)
            down = _forward_with_offset(model, snap.module, -offsets, tensor)
            numeric = (up - down) / (2 * step) / (h * w)
            assert numeric == pytest.approx(alphas[k], rel=1e-3, abs=1e-10)

        raw = np.zeros((h, w))
        for k in range(channels):
            raw = raw + (snap.gradients[k].sum() / (h * w)) * snap.activations[k]
        raw = np.maximum(raw, 0.0)
        expected, _, _ = minmax_normalize(raw)
        np.testing.assert_allclose(gradcam(snap).grid, expected, atol=1e-5)


def _forward_with_offset(model, module, offsets, tensor):
    shift = torch.from_numpy(np.asarray(offsets)).to(tensor.dtype)
    handle = module.register_forward_hook(lambda _m, _a, out: out + shift.unsqueeze(0))
    try:
        model.eval()
        with torch.no_grad():
            return float(model(tensor.unsqueeze(0))[0])
    finally:
        handle.remove()


def test_criterion_05_ablationcam_oracle(conv_fixture):
    with criterion(5, "Ablation-CAM: weights equal per-channel brute-force re-evaluation exactly"):
        model, image = conv_fixture
        snap = capture(model, image)
        weights = ablation_weights(model, image, snap)
        acts = torch.from_numpy(snap.activations).to(torch.float32)
        for k in range(acts.shape[0]):
            ablated = acts.clone()
            ablated[k] = 0.0
            with torch.no_grad():
                f_k = float(model.head(ablated.mean(dim=(1, 2)).unsqueeze(0))[0])
            assert weights[k] == (snap.score - f_k) / snap.score
        smap = ablationcam(model, image, snap)
        assert smap.grid.min() >= 0.0 and smap.grid.max() <= 1.0


def test_criterion_06_eigencam_oracle(conv_fixture):
    with criterion(6, "Eigen-CAM: matches independent SVD (1e-6); rank-1 recovers spatial factor"):
        model, image = conv_fixture
        snap = capture(model, image)
        channels, h, w = snap.activations.shape
        matrix = snap.activations.reshape(channels, h * w).T
        eigenvalues, eigenvectors = np.linalg.eigh(matrix.T @ matrix)
        projected = matrix @ eigenvectors[:, np.argmax(eigenvalues)]
        if projected.mean() < 0:
            projected = -projected
        expected, _, _ = minmax_normalize(projected.reshape(h, w))
        np.testing.assert_allclose(eigencam(snap).grid, expected, atol=1e-6)

        rng = np.random.default_rng(5)
        u = rng.random((6, 5))
        v = rng.random(4) + 0.5
        from test_saliency import make_capture

        rank_one = make_capture(np.einsum("c,hw->chw", v, u))
        expected_u, _, _ = minmax_normalize(u)
        np.testing.assert_allclose(eigencam(rank_one).grid, expected_u, atol=1e-10)


def test_criterion_07_attention_rollout_oracle(conv_fixture):
    with criterion(7, "attention rollout: explicit-product oracle (1e-6), identity case, "
                      "row sums (1e-9), conv backbone rejected"):
        rng = np.random.default_rng(11)
        for layers in (1, 2, 3, 4):
            stack = []
            for _ in range(layers):
                raw = rng.random((3, 10, 10))
                stack.append(raw / raw.sum(axis=-1, keepdims=True))
            mixed = []
            for attn in stack:
                a = 0.5 * attn.mean(axis=0) + 0.5 * np.eye(10)
                mixed.append(a / a.sum(axis=1, keepdims=True))
            oracle = functools.reduce(np.matmul, reversed(mixed))
            result = rollout(stack)
            np.testing.assert_allclose(result, oracle, atol=1e-6)
            np.testing.assert_allclose(result.sum(axis=1), np.ones(10), atol=1e-9)

        np.testing.assert_allclose(rollout([np.eye(10)]), np.eye(10), atol=1e-12)

        model, image = conv_fixture
        snap = capture(model, image)
        with pytest.raises(UnsupportedMethodError):
            attention_rollout(snap)


def test_criterion_08_extremes_protocol(benchmark):
    with criterion(8, "extremes protocol: disjoint top/bottom 50 matching an independent sort"):
        model = benchmark["model"]
        cache = benchmark["cache"]
        corpus = benchmark["corpus"]
        ranked = rank_corpus(model, corpus.records, cache)
        assert len(ranked) >= 100
        top, bottom = extremes(ranked, k=50)
        assert len(top) == 50 and len(bottom) == 50
        assert not ({i for i, _ in top} & {i for i, _ in bottom})

        scores = dict(ranked.entries)
        oracle = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
        assert top == oracle[:50]
        assert bottom == oracle[-50:]
        assert ranked.entries == rank_from_scores(scores, "safety").entries


def test_criterion_09_tally_determinism():
    with criterion(9, "tally: exact counts, once-per-image dedup, permutation invariance, "
                      "3x2 Markdown block layout"):
        def make(image_id, labels, attribute, polarity):
            return AnnotationRecord(
                task_id=f"{attribute}_{polarity}_{image_id}", image_id=image_id,
                attribute=attribute, polarity=polarity, model="cnn",
                annotator_id="ann1", labels=set(labels),
            )

        records = [
            make("i1", {"tree", "car"}, "safety", "high"),
            make("i2", {"tree"}, "safety", "high"),
            make("i3", {"tree"}, "safety", "high"),
            make("i4", {"cable"}, "safety", "low"),
            make("i1", {"cable", "roof"}, "depressing", "high"),
            make("i5", {"grass"}, "wealthy", "high"),
            make("i6", {"roof", "wall"}, "wealthy", "low"),
        ]
        expected_safety_high = [("tree", 3), ("car", 1)]
        tables = tally(records)
        assert tables[("safety", "high", "cnn")].rows == expected_safety_high
        assert tables[("safety", "low", "cnn")].rows == [("cable", 1)]

        # Typing an object twice for one image is rejected before tallying.
        with pytest.raises(ValueError):
            AnnotationRecord(task_id="t", image_id="x", attribute="safety", polarity="high",
                             model="cnn", annotator_id="a", labels=["tree", "Tree"])

        rng = np.random.default_rng(0)
        for _ in range(5):
            shuffled = list(records)
            rng.shuffle(shuffled)
            assert {k: t.rows for k, t in tally(shuffled).items()} == {
                k: t.rows for k, t in tables.items()
            }

        grid = export_markdown_grid(tables, attributes=("depressing", "safety", "wealthy"))
        header = grid.splitlines()[0]
        for attribute in ("depressing", "safety", "wealthy"):
            assert f"{attribute} +" in header and f"{attribute} -" in header
        assert header.count("count") == 6


def test_criterion_10_persistence_replay(tmp_path):
    with criterion(10, "25 HTTP submissions: replayed JSON-lines store equals live /tally"):
        run = RunDirectory.open(
            build_run_dir(tmp_path / "run", n_images=30, k=7, attributes=("safety", "wealthy"))
        )
        api = TestClient(create_app(run))
        session = api.post("/sessions", json={"annotator_id": "ann1"}).json()
        assert session["total"] == 28

        rng = np.random.default_rng(2)
        vocabulary = ["tree", "car", "cable", "roof", "grass", "sky"]
        for index in range(25):
            task = api.get(f"/sessions/{session['session_id']}/next").json()
            assert task["done"] is False
            labels = list(rng.choice(vocabulary, size=int(rng.integers(1, 4)), replace=False))
            response = api.post(
                f"/sessions/{session['session_id']}/tasks/{task['task_id']}",
                json={"labels": labels},
            )
            assert response.status_code == 200

        records = load_records(run.store_path)
        assert len(records) == 25
        replayed = tally(records)
        live = api.get("/tally").json()["tables"]
        assert len(live) == len(replayed)
        for table_json in live:
            key = (table_json["attribute"], table_json["polarity"], table_json["model"])
            assert [(r["object"], r["count"]) for r in table_json["rows"]] == replayed[key].rows
