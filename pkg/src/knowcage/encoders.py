"""The three interchangeable graph encoders: GCN, GAT, and DGCNN.

All encoders are functional forwards over ``Var`` parameters so gradients
flow through the shared autodiff engine. Node-order permutation
equivariance holds for each of them (covered by tests).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .numerics import (
    CsrMatrix,
    Var,
    concat_cols,
    leaky_relu,
    matmul,
    relu,
    softmax_rows,
    take_rows,
    tanh,
)

log = logging.getLogger(__name__)

ACTIVATIONS = {"relu": relu, "tanh": tanh, "identity": lambda v: v}


def apply_activation(name: str, v: Var) -> Var:
    try:
        return ACTIVATIONS[name](v)
    except KeyError:
        raise DimensionError(f"unknown activation {name!r}") from None


@dataclass
class GcnLayer:
    W: Var  # d_in x d_out
    activation: str = "relu"


@dataclass
class GatLayer:
    heads: list[tuple[Var, Var]]  # per head: (W d_in x d_out, a 2*d_out x 1)
    slope: float = 0.2
    combine: str = "concat"  # hidden layers concat, final layer mean
    activation: str = "relu"


@dataclass
class DgcnnEncoder:
    layers: list[GcnLayer]
    sortpool_k: int


def gcn_forward(a_hat: CsrMatrix, h: Var, layers: list[GcnLayer]) -> Var:
    """Chain of H <- f(A_hat @ H @ W) layers."""
    for layer in layers:
        h = apply_activation(layer.activation, matmul(a_hat, matmul(h, layer.W)))
    return h


def _half_rows(a: Var, lo: int, hi: int) -> Var:
    return take_rows(a, np.arange(lo, hi))


def _gat_layer(mask: np.ndarray, h: Var, layer: GatLayer) -> Var:
    neg = np.where(mask, 0.0, -np.inf)  # additive mask: softmax support = neighborhood
    head_outs = []
    for W, a in layer.heads:
        wh = matmul(h, W)
        d_out = W.value.shape[1]
        # e_ij = leaky(a^T [Wh_i || Wh_j]) = leaky(s_i + t_j), a split in halves
        s = matmul(wh, _half_rows(a, 0, d_out))
        t = matmul(wh, _half_rows(a, d_out, 2 * d_out))
        scores = leaky_relu(s + t.T, layer.slope) + neg
        alpha = softmax_rows(scores)
        head_outs.append(matmul(alpha, wh))
    if len(head_outs) == 1:
        combined = head_outs[0]
    elif layer.combine == "concat":
        combined = concat_cols(head_outs)
    else:
        combined = head_outs[0]
        for extra in head_outs[1:]:
            combined = combined + extra
        combined = combined * (1.0 / len(head_outs))
    return apply_activation(layer.activation, combined)


def gat_forward(mask: np.ndarray, h: Var, layers: list[GatLayer]) -> Var:
    """Masked-attention layers; mask marks A > 0 pairs plus self-loops."""
    if mask.shape[0] != mask.shape[1] or mask.shape[0] != h.value.shape[0]:
        raise DimensionError(f"mask {mask.shape} does not match features {h.value.shape}")
    isolated = ~mask.any(axis=1)
    if isolated.any():  # rescue isolated nodes: a softmax row must not be empty
        mask = mask.copy()
        mask[isolated, isolated] = True
    for layer in layers:
        h = _gat_layer(mask, h, layer)
    return h


def dgcnn_forward(a_hat: CsrMatrix, h: Var, encoder: DgcnnEncoder) -> Var:
    """Per-node concatenation of every layer's hidden representation."""
    outputs = []
    for layer in encoder.layers:
        h = apply_activation(layer.activation, matmul(a_hat, matmul(h, layer.W)))
        outputs.append(h)
    return outputs[0] if len(outputs) == 1 else concat_cols(outputs)


def sortpool(z: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagnostic SortPooling: order nodes by last-channel value (descending),
    truncate or zero-pad to k rows. Not part of the classification path.
    """
    n = z.shape[0]
    if k > n:
        log.warning("sortpool_k=%d larger than n=%d; clamped", k, n)
        k = n
    order = np.argsort(-z[:, -1], kind="stable")[:k]
    pooled = z[order]
    if pooled.shape[0] < k:
        pad = np.zeros((k - pooled.shape[0], z.shape[1]))
        pooled = np.vstack([pooled, pad])
    return order, pooled
