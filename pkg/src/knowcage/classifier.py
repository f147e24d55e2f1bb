"""Two-branch classification head, probability interpolation, weighted loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .numerics import Var, as_var, clip, log, matmul, relu, softmax_rows, vsum

PROB_EPS = 1e-12  # probabilities are clamped to [eps, 1-eps] before logs

# selects the positive-class column of an n x 2 probability matrix
_POS_COLUMN = np.array([[0.0], [1.0]])


@dataclass
class ClassifierHead:
    """linear -> relu -> linear -> softmax, output width 2."""

    W1: Var
    b1: Var
    W2: Var
    b2: Var


@dataclass(frozen=True)
class PredictionProbs:
    """Per-document class distributions from both branches plus their mix."""

    p_g: np.ndarray  # graph branch, n_d x 2
    p_c: np.ndarray  # context branch, n_d x 2
    p: np.ndarray  # lam * p_g + (1 - lam) * p_c
    lam: float

    @classmethod
    def from_branches(cls, p_g: np.ndarray, p_c: np.ndarray, lam: float) -> "PredictionProbs":
        return cls(p_g=p_g, p_c=p_c, p=interpolate(p_g, p_c, lam).value, lam=lam)


def head_dims(d_in: int) -> tuple[int, int]:
    """(d_in, d_mid) with d_mid = d_in // 2, floored at 16."""
    return d_in, max(16, d_in // 2)


def branch_probs(features: Var, head: ClassifierHead) -> Var:
    """softmax(linear2(relu(linear1(x)))) row per document."""
    if features.value.ndim != 2 or features.value.shape[1] != head.W1.value.shape[0]:
        raise DimensionError(
            f"features {features.value.shape} do not match head input {head.W1.value.shape}"
        )
    hidden = relu(matmul(features, head.W1) + head.b1)
    return softmax_rows(matmul(hidden, head.W2) + head.b2)


def interpolate(p_g, p_c, lam: float):
    """Convex combination p = lam * p_g + (1 - lam) * p_c, lam in [0, 1)."""
    if not (0.0 <= lam < 1.0):
        raise ConfigError(f"lambda must lie in [0, 1), got {lam}")
    return lam * as_var(p_g) + (1.0 - lam) * as_var(p_c)


def class_weights(n0: int, n1: int, inverse: bool = False) -> tuple[float, float]:
    """(w_pos, w_neg) from class counts; they always sum to 1.

    As defined, w_pos = N1/(N0+N1): the weight tracks its own class share,
    which up-weights the majority class. ``inverse`` swaps the two for the
    conventional minority up-weighting.
    """
    total = n0 + n1
    if total <= 0:
        raise ConfigError("class counts must be positive")
    w_pos = n1 / total
    w_neg = n0 / total
    return (w_neg, w_pos) if inverse else (w_pos, w_neg)


def weighted_bce(p, labels, n0: int, n1: int, inverse_class_weights: bool = False) -> Var:
    """Sum of -w+ y log(p_i) - w- (1-y) log(1-p_i) over documents.

    ``p`` holds n x 2 class distributions; p_i is the positive-class
    probability, clamped before the logs so the loss stays finite.
    """
    p = as_var(p)
    y = np.asarray(labels, dtype=np.float64).reshape(-1, 1)
    if p.value.shape != (y.shape[0], 2):
        raise DimensionError(f"probabilities {p.value.shape} do not match {y.shape[0]} labels")
    w_pos, w_neg = class_weights(n0, n1, inverse_class_weights)
    p_pos = clip(matmul(p, _POS_COLUMN), PROB_EPS, 1.0 - PROB_EPS)
    terms = (-w_pos) * (y * log(p_pos)) + (-w_neg) * ((1.0 - y) * log(1.0 - p_pos))
    return vsum(terms)
