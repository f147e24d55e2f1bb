import numpy as np
import pytest

from knowcage.classifier import (
    ClassifierHead,
    branch_probs,
    class_weights,
    head_dims,
    interpolate,
    weighted_bce,
)
from knowcage.errors import ConfigError, DimensionError
from knowcage.numerics import (
    ParamStore,
    Var,
    backward,
    finite_diff_grad,
    max_relative_error,
)


def zero_head(d_in, d_mid=4):
    return ClassifierHead(
        W1=Var(np.zeros((d_in, d_mid))),
        b1=Var(np.zeros((1, d_mid))),
        W2=Var(np.zeros((d_mid, 2))),
        b2=Var(np.zeros((1, 2))),
    )


class TestBranchProbs:
    def test_zero_weights_uniform(self):
        out = branch_probs(Var(np.random.default_rng(0).random((5, 3))), zero_head(3))
        assert out.value == pytest.approx(np.full((5, 2), 0.5))

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(1)
        head = ClassifierHead(
            W1=Var(rng.standard_normal((3, 4))),
            b1=Var(rng.standard_normal((1, 4))),
            W2=Var(rng.standard_normal((4, 2))),
            b2=Var(rng.standard_normal((1, 2))),
        )
        out = branch_probs(Var(rng.random((6, 3))), head)
        assert np.allclose(out.value.sum(axis=1), 1.0, atol=1e-12)

    def test_hand_computed_toy(self):
        # x = [2], W1 = [[1, -1]], relu -> [2, 0], W2 = [[1, 0], [0, 1]]
        head = ClassifierHead(
            W1=Var(np.array([[1.0, -1.0]])),
            b1=Var(np.zeros((1, 2))),
            W2=Var(np.eye(2)),
            b2=Var(np.zeros((1, 2))),
        )
        out = branch_probs(Var(np.array([[2.0]])), head)
        z = np.array([2.0, 0.0])
        expected = np.exp(z) / np.exp(z).sum()
        assert out.value[0] == pytest.approx(expected)

    def test_dimension_error(self):
        with pytest.raises(DimensionError):
            branch_probs(Var(np.zeros((2, 5))), zero_head(3))

    def test_head_dims_floor(self):
        assert head_dims(100) == (100, 50)
        assert head_dims(6) == (6, 16)


class TestInterpolate:
    def test_lambda_zero_bitwise(self):
        rng = np.random.default_rng(2)
        p_g = rng.random((4, 2))
        p_c = rng.random((4, 2))
        out = interpolate(Var(p_g), Var(p_c), 0.0)
        assert np.array_equal(out.value, p_c)

    def test_hand_arithmetic(self):
        out = interpolate(
            Var(np.array([[0.8, 0.2]])), Var(np.array([[0.4, 0.6]])), 0.5
        )
        assert out.value == pytest.approx(np.array([[0.6, 0.4]]))

    def test_rows_still_sum_to_one(self):
        rng = np.random.default_rng(3)
        a = rng.random((5, 2))
        a /= a.sum(axis=1, keepdims=True)
        b = rng.random((5, 2))
        b /= b.sum(axis=1, keepdims=True)
        out = interpolate(Var(a), Var(b), 0.3)
        assert np.allclose(out.value.sum(axis=1), 1.0, atol=1e-12)

    @pytest.mark.parametrize("lam", [-0.1, 1.0, 1.5])
    def test_lambda_out_of_range(self, lam):
        with pytest.raises(ConfigError):
            interpolate(Var(np.zeros((1, 2))), Var(np.zeros((1, 2))), lam)


class TestWeightedBce:
    def test_balanced_weights(self):
        w_pos, w_neg = class_weights(1209, 1209)
        assert w_pos == w_neg == 0.5

    def test_imbalanced_weights_as_written(self):
        # the positive weight tracks the positive share, exactly
        w_pos, w_neg = class_weights(809, 191)
        assert w_pos == 0.191
        assert w_neg == 0.809

    def test_inverse_flag_swaps(self):
        w_pos, w_neg = class_weights(809, 191, inverse=True)
        assert w_pos == 0.809
        assert w_neg == 0.191

    def test_weights_sum_to_one(self):
        for n0, n1 in [(1, 1), (3, 17), (1209, 1209), (809, 191)]:
            w_pos, w_neg = class_weights(n0, n1)
            assert w_pos + w_neg == pytest.approx(1.0, abs=1e-15)

    def test_perfect_predictions_tiny_loss(self):
        labels = np.array([1, 0, 1])
        p = np.array([[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        loss = weighted_bce(Var(p), labels, 1, 2)
        assert 0.0 <= float(loss.value) <= 3 * 1e-11

    def test_loss_finite_for_confident_wrong(self):
        labels = np.array([1, 0])
        p = np.array([[1.0, 0.0], [0.0, 1.0]])  # exactly wrong
        loss = weighted_bce(Var(p), labels, 1, 1)
        assert np.isfinite(float(loss.value))

    def test_matches_closed_form(self):
        labels = np.array([1, 0, 0])
        p_pos = np.array([0.7, 0.2, 0.4])
        p = np.column_stack([1 - p_pos, p_pos])
        n0, n1 = 2, 1
        w_pos, w_neg = n1 / 3, n0 / 3
        expected = -(w_pos * np.log(0.7)) - w_neg * (np.log(0.8) + np.log(0.6))
        loss = weighted_bce(Var(p), labels, n0, n1)
        assert float(loss.value) == pytest.approx(expected, rel=1e-12)

    def test_gradient_passes_finite_difference(self):
        rng = np.random.default_rng(4)
        store = ParamStore()
        store.glorot("w", (3, 2), rng)
        x = rng.random((6, 3))
        labels = np.array([1, 0, 1, 1, 0, 0])

        def forward():
            logits = Var(x) @ store.leaf("w")
            from knowcage.numerics import softmax_rows

            return weighted_bce(softmax_rows(logits), labels, 3, 3)

        analytic = backward(forward())
        numeric = finite_diff_grad(lambda: float(forward().value), store)
        assert max_relative_error(analytic, numeric) < 1e-6

    def test_zero_counts_rejected(self):
        with pytest.raises(ConfigError):
            class_weights(0, 0)
