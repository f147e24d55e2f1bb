"""Concept-aware attention over typed nodes, plus two comparison attentions.

The concept-aware block keeps one key matrix K and one value matrix V but
selects among nine query matrices by the ordered kind pair
(kind of attended node j, kind of query node i). With all nine queries
tied it reduces exactly to plain scaled dot-product attention.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .numerics import Var, matmul, softmax_rows, tanh, vsum

log = logging.getLogger(__name__)

KIND_LETTERS = ("d", "w", "c")  # document, word, concept
QUERY_KEYS = tuple(f"{a}{q}" for a in KIND_LETTERS for q in KIND_LETTERS)

SCOPE_ALL = "all_nodes"
SCOPE_EQ4 = "eq4_literal"


@dataclass
class ConceptAwareAttention:
    """K, V, and the nine Q matrices, each l x d_h.

    ``q[ak + qk]`` is the query matrix used when a node of kind ``qk``
    attends to a node of kind ``ak`` (subscript order: attended, query).
    """

    K: Var
    V: Var
    q: dict[str, Var]
    l: int

    def __post_init__(self):
        if set(self.q) != set(QUERY_KEYS):
            raise ConfigError(f"expected query matrices {QUERY_KEYS}, got {sorted(self.q)}")


def _kind_masks(kinds: np.ndarray) -> dict[str, np.ndarray]:
    return {letter: kinds == i for i, letter in enumerate(KIND_LETTERS)}


def _scope_mask(kinds: np.ndarray, scope: str) -> np.ndarray | None:
    """Additive attention mask (0 allowed, -inf hidden), or None for all_nodes."""
    if scope == SCOPE_ALL:
        return None
    if scope != SCOPE_EQ4:
        raise ConfigError(f"unknown attention scope {scope!r}")
    is_doc, is_word, is_concept = (kinds == 0), (kinds == 1), (kinds == 2)
    n = kinds.shape[0]
    allowed = np.zeros((n, n), dtype=bool)
    if is_concept.any():
        allowed[np.ix_(is_doc, is_concept)] = True
    else:
        # Literal scope with no concept nodes would leave documents with an
        # empty attended set; fall back to attending over words.
        log.warning("eq4_literal scope with no concept nodes: documents attend over words")
        allowed[np.ix_(is_doc, is_word)] = True
    allowed[np.ix_(is_word, is_word | is_concept)] = True
    allowed[np.ix_(is_concept, is_concept)] = True
    return np.where(allowed, 0.0, -np.inf)


def concept_attention(
    h: Var,
    kinds: np.ndarray,
    params: ConceptAwareAttention,
    scope: str = SCOPE_ALL,
) -> Var:
    """Kind-pair-selected scaled attention; returns n x l features.

    Scores: s_ij = (K x_j)^T Q_{kind(j),kind(i)} x_i / sqrt(l); rows are
    softmax-normalized over the attended set and mixed through V.
    """
    kinds = np.asarray(kinds, dtype=np.int64)
    n, d_h = h.value.shape
    if kinds.shape[0] != n:
        raise DimensionError(f"kinds length {kinds.shape[0]} != node count {n}")
    if params.K.value.shape[1] != d_h:
        raise DimensionError(f"K is {params.K.value.shape}, features are n x {d_h}")
    masks = _kind_masks(kinds)
    kx = matmul(h, params.K.T)  # n x l
    vx = matmul(h, params.V.T)
    scale = 1.0 / np.sqrt(params.l)
    scores = None
    for ak, attended in masks.items():
        if not attended.any():
            continue
        # query rows of kind qk use Q[ak+qk]; the row masks partition n
        qx = None
        for qk, querying in masks.items():
            if not querying.any():
                continue
            part = matmul(h, params.q[ak + qk].T) * querying[:, None].astype(float)
            qx = part if qx is None else qx + part
        block = matmul(qx, kx.T) * attended[None, :].astype(float)
        scores = block if scores is None else scores + block
    scores = scores * scale
    extra = _scope_mask(kinds, scope)
    if extra is not None:
        scores = scores + extra
    alpha = softmax_rows(scores)
    return matmul(alpha, vx)


def dot_product_attention(h: Var, w_q: Var, w_k: Var, w_v: Var) -> Var:
    """Plain scaled dot-product self-attention over all nodes."""
    l = w_q.value.shape[0]
    kx = matmul(h, w_k.T)
    qx = matmul(h, w_q.T)
    vx = matmul(h, w_v.T)
    alpha = softmax_rows(matmul(qx, kx.T) * (1.0 / np.sqrt(l)))
    return matmul(alpha, vx)


def structured_attention(h: Var, w_s1: Var, w_s2: Var) -> Var:
    """Hop-based global attention: A = softmax(W_s2 tanh(W_s1 H^T)).

    Each of the r hops produces one weighted combination of all node
    features; hops are averaged and the resulting row is replicated so the
    output keeps one row per node. All nodes therefore share the same
    global-context vector (the attended content does not depend on the
    query node in this formulation).
    """
    r = w_s2.value.shape[0]
    if r < 1:
        raise ConfigError("structured attention needs r >= 1 hops")
    n = h.value.shape[0]
    scores = matmul(w_s2, tanh(matmul(w_s1, h.T)))  # r x n
    alpha = softmax_rows(scores)
    hops = matmul(alpha, h)  # r x d_h
    pooled = vsum(hops, axis=0, keepdims=True) * (1.0 / r)
    ones = Var(np.ones((n, 1)))
    return matmul(ones, pooled)
