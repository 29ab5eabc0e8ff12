"""Scoring, ranking loss, and pairwise-accuracy semantics."""

import math

import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import preprocessed_from_array

from perceptlab.data.records import Comparison, PerceptualAttribute
from perceptlab.models.losses import ranking_loss, ranking_loss_batch
from perceptlab.models.metrics import pairwise_accuracy, score_images
from perceptlab.models.scorer import build_model

finite_scores = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
outcomes = st.sampled_from([-1, 1])


class TestRankingLoss:
    def test_correctly_ordered_pair_is_free(self):
        assert ranking_loss(0.7, 0.2, +1) == 0.0

    def test_violation_costs_its_margin(self):
        assert ranking_loss(0.2, 0.7, +1) == pytest.approx(0.5)

    def test_tie_is_free(self):
        assert ranking_loss(0.4, 0.4, -1) == 0.0

    def test_invalid_outcome(self):
        for bad in (0, 2, -2, 0.5, None):
            with pytest.raises(ValueError):
                ranking_loss(1.0, 0.0, bad)

    @settings(max_examples=200)
    @given(f_i=finite_scores, f_j=finite_scores, y=outcomes)
    def test_nonnegative_and_zero_iff_ordered(self, f_i, f_j, y):
        loss = ranking_loss(f_i, f_j, y)
        assert loss >= 0.0
        assert (loss == 0.0) == (y * (f_i - f_j) >= 0.0)

    @settings(max_examples=200)
    @given(f_i=finite_scores, f_j=finite_scores, y=outcomes,
           c=st.floats(min_value=-1e5, max_value=1e5, allow_nan=False))
    def test_shift_invariance(self, f_i, f_j, y, c):
        assert ranking_loss(f_i + c, f_j + c, y) == pytest.approx(ranking_loss(f_i, f_j, y), abs=1e-9, rel=1e-9)

    @settings(max_examples=200)
    @given(f_i=finite_scores, f_j=finite_scores, y=outcomes,
           c=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False))
    def test_positive_scale_equivariance(self, f_i, f_j, y, c):
        assert ranking_loss(c * f_i, c * f_j, y) == pytest.approx(c * ranking_loss(f_i, f_j, y), rel=1e-9)

    @settings(max_examples=200)
    @given(f_i=finite_scores, f_j=finite_scores, y=outcomes)
    def test_antisymmetry(self, f_i, f_j, y):
        assert ranking_loss(f_i, f_j, y) == ranking_loss(f_j, f_i, -y)

    def test_subgradient_matches_finite_differences(self):
        # Central differences on f_i, away from the kink at y*(f_i - f_j) = 0.
        h = 1e-4
        cases = [(0.9, 0.1, +1), (0.1, 0.9, +1), (0.3, -0.5, -1), (-0.7, 0.4, -1)]
        for f_i, f_j, y in cases:
            assert abs(y * (f_i - f_j)) > 10 * h
            numeric = (ranking_loss(f_i + h, f_j, y) - ranking_loss(f_i - h, f_j, y)) / (2 * h)
            analytic = -y if -y * (f_i - f_j) > 0 else 0.0
            if analytic == 0.0:
                assert abs(numeric) <= 1e-5
            else:
                assert abs(numeric - analytic) / abs(analytic) <= 1e-5

    def test_batch_agrees_with_scalar(self):
        rng = np.random.default_rng(0)
        left = rng.normal(size=16)
        right = rng.normal(size=16)
        ys = rng.choice([-1, 1], size=16)
        batch = ranking_loss_batch(
            torch.tensor(left), torch.tensor(right), torch.tensor(ys, dtype=torch.float64)
        )
        for k in range(16):
            assert batch[k].item() == pytest.approx(ranking_loss(left[k], right[k], int(ys[k])))

    def test_batch_rejects_bad_outcomes(self):
        with pytest.raises(ValueError):
            ranking_loss_batch(torch.zeros(2), torch.zeros(2), torch.tensor([1.0, 0.0]))


def _comps(pairs):
    return [Comparison(l, r, PerceptualAttribute.SAFETY, y) for l, r, y in pairs]


class TestPairwiseAccuracy:
    def test_oracle_scores_are_perfect(self):
        latent = {"a": 3.0, "b": 2.0, "c": 1.0}
        comps = _comps([("a", "b", +1), ("c", "b", -1), ("a", "c", +1)])
        assert pairwise_accuracy(latent, comps) == 1.0

    def test_constant_scores_fail_everywhere(self):
        comps = _comps([("a", "b", +1), ("b", "c", -1)])
        assert pairwise_accuracy({"a": 0.5, "b": 0.5, "c": 0.5}, comps) == 0.0

    def test_two_of_three_by_hand(self):
        # scores: a=2, b=1, c=3
        #   (a,b,+1): +1*(2-1) > 0  -> correct
        #   (b,c,+1): +1*(1-3) < 0  -> wrong
        #   (c,a,+1): +1*(3-2) > 0  -> correct
        scores = {"a": 2.0, "b": 1.0, "c": 3.0}
        comps = _comps([("a", "b", +1), ("b", "c", +1), ("c", "a", +1)])
        assert pairwise_accuracy(scores, comps) == pytest.approx(2 / 3)

    def test_empty_is_undefined(self):
        with pytest.raises(ValueError):
            pairwise_accuracy({"a": 1.0}, [])

    def test_missing_score_raises(self):
        with pytest.raises(KeyError, match="ghost"):
            pairwise_accuracy({"a": 1.0}, _comps([("a", "ghost", +1)]))

    @settings(max_examples=50)
    @given(shift=st.floats(min_value=-100, max_value=100, allow_nan=False),
           scale=st.floats(min_value=1e-3, max_value=1e3))
    def test_invariance_under_shift_and_positive_scale(self, shift, scale):
        scores = {"a": 0.3, "b": -1.2, "c": 0.9, "d": 0.0}
        comps = _comps([("a", "b", +1), ("b", "c", +1), ("c", "d", +1), ("d", "a", -1)])
        base = pairwise_accuracy(scores, comps)
        moved = {k: scale * v + shift for k, v in scores.items()}
        assert pairwise_accuracy(moved, comps) == base


def _numpy_tiny_conv_forward(model, image):
    """Independent forward pass: plain nested loops, no torch ops."""
    x = image.astype(np.float64)  # (3, H, W)
    state = model.state_dict()

    def conv3x3(inp, weight, bias):
        c_out, c_in, _, _ = weight.shape
        _, h, w = inp.shape
        padded = np.zeros((c_in, h + 2, w + 2))
        padded[:, 1:-1, 1:-1] = inp
        out = np.zeros((c_out, h, w))
        for o in range(c_out):
            for i in range(h):
                for j in range(w):
                    acc = bias[o]
                    for c in range(c_in):
                        for di in range(3):
                            for dj in range(3):
                                acc += weight[o, c, di, dj] * padded[c, i + di, j + dj]
                    out[o, i, j] = acc
        return out

    w1 = state["backbone.conv1.weight"].double().numpy()
    b1 = state["backbone.conv1.bias"].double().numpy()
    w2 = state["backbone.conv2.weight"].double().numpy()
    b2 = state["backbone.conv2.bias"].double().numpy()
    hw = state["head.weight"].double().numpy()[0]
    hb = float(state["head.bias"].double().numpy()[0])

    a1 = np.maximum(conv3x3(x, w1, b1), 0.0)
    a2 = np.maximum(conv3x3(a1, w2, b2), 0.0)
    pooled = a2.mean(axis=(1, 2))
    return float(np.dot(hw, pooled) + hb)


class TestScoringModel:
    def test_zero_weights_score_zero(self):
        model = build_model("tiny_conv", "safety")
        with torch.no_grad():
            for p in model.parameters():
                p.zero_()
        img = preprocessed_from_array("x", np.random.default_rng(0).random((8, 8)))
        assert model.score(img) == 0.0

    def test_inference_is_deterministic(self):
        model = build_model("tiny_conv", "safety")
        img = preprocessed_from_array("x", np.random.default_rng(1).random((8, 8)))
        assert model.score(img) == model.score(img)

    def test_shape_mismatch_raises(self):
        model = build_model("tiny_conv", "safety")
        with pytest.raises(ValueError, match="shape"):
            model(torch.zeros(2, 1, 8, 8))

    def test_forward_matches_numpy_oracle_on_2x2_image(self):
        torch.manual_seed(7)
        model = build_model("tiny_conv", "safety", channels=(4, 3))
        image = np.random.default_rng(7).random((3, 2, 2))
        img = preprocessed_from_array("x", image.transpose(1, 2, 0))
        expected = _numpy_tiny_conv_forward(model, image)
        assert model.score(img) == pytest.approx(expected, abs=1e-5)

    def test_score_images_batches_match_single(self):
        model = build_model("tiny_conv", "safety")
        rng = np.random.default_rng(3)
        images = {f"i{k}": preprocessed_from_array(f"i{k}", rng.random((8, 8))) for k in range(5)}
        batched = score_images(model, images, batch_size=2)
        for image_id, img in images.items():
            assert batched[image_id] == pytest.approx(model.score(img), abs=1e-6)

    def test_pair_batch_invariants(self):
        from perceptlab.models.pairs import PairBatch, collate_pairs

        rng = np.random.default_rng(9)
        images = {n: preprocessed_from_array(n, rng.random((8, 8))) for n in ("a", "b", "c")}
        batch = collate_pairs(_comps([("a", "b", +1), ("b", "c", -1)]), images)
        assert len(batch) == 2
        assert batch.left.shape == batch.right.shape == (2, 3, 8, 8)
        with pytest.raises(ValueError, match="lengths"):
            PairBatch(batch.left, batch.right[:1], batch.outcomes)
        with pytest.raises(ValueError, match="outcomes"):
            PairBatch(batch.left, batch.right, torch.tensor([1.0, 0.0]))

    def test_weight_sharing_within_pair(self):
        # The same parameters score both members: scoring left and right
        # through the one model must equal scoring them independently.
        model = build_model("tiny_conv", "safety")
        rng = np.random.default_rng(5)
        a = preprocessed_from_array("a", rng.random((8, 8)))
        b = preprocessed_from_array("b", rng.random((8, 8)))
        batch = torch.stack([a.tensor, b.tensor])
        model.eval()
        with torch.no_grad():
            pair_scores = model(batch)
        assert pair_scores[0].item() == pytest.approx(model.score(a), abs=1e-6)
        assert pair_scores[1].item() == pytest.approx(model.score(b), abs=1e-6)
