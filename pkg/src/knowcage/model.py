"""Two-branch model: graph encoder + typed attention on one side,
contextualized document embeddings on the other, interpolated at the
probability level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import attention as att
from . import classifier as clf
from . import encoders as enc
from .errors import ConfigError
from .graph import HeteroTextGraph, normalize_adjacency
from .numerics import CsrMatrix, ParamStore, Var, backward, take_rows

ENCODERS = ("gcn", "gat", "dgcnn")
ATTENTIONS = ("concept", "dot", "structured")


@dataclass
class ModelConfig:
    encoder: str = "gcn"
    attention: str = "concept"
    hidden_dim: int = 300
    n_layers: int = 2
    activation: str = "relu"
    attention_dim: int | None = None  # defaults to hidden_dim
    attention_scope: str = att.SCOPE_ALL
    attention_blocks: int = 1
    gat_heads: int = 1
    gat_slope: float = 0.2
    structured_hops: int = 2
    structured_da: int = 64
    sortpool_k: int = 10
    lambda_: float = 0.5
    inverse_class_weights: bool = False

    def validate(self) -> None:
        if self.encoder not in ENCODERS:
            raise ConfigError(f"encoder must be one of {ENCODERS}, got {self.encoder!r}")
        if self.attention not in ATTENTIONS:
            raise ConfigError(f"attention must be one of {ATTENTIONS}, got {self.attention!r}")
        if self.n_layers < 1:
            raise ConfigError("need at least one encoder layer")
        if self.attention_blocks < 1:
            raise ConfigError("need at least one encoder+attention block")
        if not (0.0 <= self.lambda_ < 1.0):
            raise ConfigError(f"lambda must lie in [0, 1), got {self.lambda_}")


class KnowCageModel:
    """Owns the ParamStore and builds the forward op graph per step."""

    def __init__(self, config: ModelConfig, d_in: int, d_doc: int, kinds: np.ndarray, rng: np.random.Generator):
        config.validate()
        self.config = config
        self.kinds = np.asarray(kinds, dtype=np.int64)
        self.store = ParamStore()
        self._enc_widths: list[int] = []
        c = config
        width_in = d_in
        for block in range(c.attention_blocks):
            enc_out = self._init_encoder(block, width_in, rng)
            att_out = self._init_attention(block, enc_out, rng)
            self._enc_widths.append(enc_out)
            width_in = att_out
        self._init_head("head_g", width_in, rng)
        self._init_head("head_c", d_doc, rng)

    # -- parameter construction -------------------------------------------------

    def _init_encoder(self, block: int, d_in: int, rng) -> int:
        c = self.config
        dims = [d_in] + [c.hidden_dim] * c.n_layers
        if c.encoder in ("gcn", "dgcnn"):
            for i in range(c.n_layers):
                self.store.glorot(f"enc{block}.{i}.W", (dims[i], dims[i + 1]), rng)
            return c.hidden_dim * c.n_layers if c.encoder == "dgcnn" else c.hidden_dim
        # gat: hidden layers concat heads, final layer averages them
        out_width = d_in
        for i in range(c.n_layers):
            is_last = i == c.n_layers - 1
            in_w = out_width
            for head in range(c.gat_heads):
                self.store.glorot(f"enc{block}.{i}.h{head}.W", (in_w, c.hidden_dim), rng)
                self.store.glorot(f"enc{block}.{i}.h{head}.a", (2 * c.hidden_dim, 1), rng)
            out_width = c.hidden_dim if (is_last or c.gat_heads == 1) else c.hidden_dim * c.gat_heads
        return out_width

    def _init_attention(self, block: int, d_h: int, rng) -> int:
        c = self.config
        l = c.attention_dim or c.hidden_dim
        if c.attention == "concept":
            self.store.glorot(f"att{block}.K", (l, d_h), rng)
            self.store.glorot(f"att{block}.V", (l, d_h), rng)
            for key in att.QUERY_KEYS:
                self.store.glorot(f"att{block}.Q.{key}", (l, d_h), rng)
            return l
        if c.attention == "dot":
            self.store.glorot(f"att{block}.Wq", (l, d_h), rng)
            self.store.glorot(f"att{block}.Wk", (l, d_h), rng)
            self.store.glorot(f"att{block}.Wv", (l, d_h), rng)
            return l
        self.store.glorot(f"att{block}.Ws1", (c.structured_da, d_h), rng)
        self.store.glorot(f"att{block}.Ws2", (c.structured_hops, c.structured_da), rng)
        return d_h  # structured attention preserves the feature width

    def _init_head(self, prefix: str, d_in: int, rng) -> None:
        d_in, d_mid = clf.head_dims(d_in)
        self.store.glorot(f"{prefix}.W1", (d_in, d_mid), rng)
        self.store.zeros(f"{prefix}.b1", (1, d_mid))
        self.store.glorot(f"{prefix}.W2", (d_mid, 2), rng)
        self.store.zeros(f"{prefix}.b2", (1, 2))

    # -- forward ------------------------------------------------------------------

    def _encoder_forward(self, block: int, a_hat: CsrMatrix, mask, h: Var) -> Var:
        c = self.config
        if c.encoder == "gcn":
            layers = [
                enc.GcnLayer(self.store.leaf(f"enc{block}.{i}.W"), c.activation)
                for i in range(c.n_layers)
            ]
            return enc.gcn_forward(a_hat, h, layers)
        if c.encoder == "dgcnn":
            layers = [
                enc.GcnLayer(self.store.leaf(f"enc{block}.{i}.W"), c.activation)
                for i in range(c.n_layers)
            ]
            return enc.dgcnn_forward(a_hat, h, enc.DgcnnEncoder(layers, c.sortpool_k))
        layers = []
        for i in range(c.n_layers):
            heads = [
                (
                    self.store.leaf(f"enc{block}.{i}.h{head}.W"),
                    self.store.leaf(f"enc{block}.{i}.h{head}.a"),
                )
                for head in range(c.gat_heads)
            ]
            combine = "mean" if i == c.n_layers - 1 else "concat"
            layers.append(enc.GatLayer(heads, c.gat_slope, combine, c.activation))
        return enc.gat_forward(mask, h, layers)

    def _attention_forward(self, block: int, h: Var) -> Var:
        c = self.config
        l = c.attention_dim or c.hidden_dim
        if c.attention == "concept":
            params = att.ConceptAwareAttention(
                K=self.store.leaf(f"att{block}.K"),
                V=self.store.leaf(f"att{block}.V"),
                q={key: self.store.leaf(f"att{block}.Q.{key}") for key in att.QUERY_KEYS},
                l=l,
            )
            return att.concept_attention(h, self.kinds, params, c.attention_scope)
        if c.attention == "dot":
            return att.dot_product_attention(
                h,
                self.store.leaf(f"att{block}.Wq"),
                self.store.leaf(f"att{block}.Wk"),
                self.store.leaf(f"att{block}.Wv"),
            )
        return att.structured_attention(
            h, self.store.leaf(f"att{block}.Ws1"), self.store.leaf(f"att{block}.Ws2")
        )

    def _head(self, prefix: str) -> clf.ClassifierHead:
        return clf.ClassifierHead(
            W1=self.store.leaf(f"{prefix}.W1"),
            b1=self.store.leaf(f"{prefix}.b1"),
            W2=self.store.leaf(f"{prefix}.W2"),
            b2=self.store.leaf(f"{prefix}.b2"),
        )

    def forward(self, a_hat: CsrMatrix, mask, h0: np.ndarray, h_doc: np.ndarray):
        """One full pass; returns (p Var, p_g Var, p_c Var)."""
        n_d = h_doc.shape[0]
        h = Var(h0)
        for block in range(self.config.attention_blocks):
            h = self._encoder_forward(block, a_hat, mask, h)
            h = self._attention_forward(block, h)
        p_g = clf.branch_probs(take_rows(h, np.arange(n_d)), self._head("head_g"))
        p_c = clf.branch_probs(Var(h_doc), self._head("head_c"))
        p = clf.interpolate(p_g, p_c, self.config.lambda_)
        return p, p_g, p_c

    def loss(self, p: Var, labels: np.ndarray, train_idx: np.ndarray) -> Var:
        """Weighted BCE over the training documents only; class counts come
        from the training labels, so held-out labels never touch the loss."""
        y_train = labels[train_idx]
        n1 = int(y_train.sum())
        n0 = int(y_train.shape[0]) - n1
        return clf.weighted_bce(
            take_rows(p, train_idx), y_train, n0, n1, self.config.inverse_class_weights
        )

    def gradients(self, loss_var: Var) -> dict[str, np.ndarray]:
        """Backward pass; parameters outside the graph get zero gradients
        (e.g. unused query kinds when a node kind is absent)."""
        grads = backward(loss_var)
        for name, value in self.store.params.items():
            if name not in grads:
                grads[name] = np.zeros_like(value)
        return grads

    def lr_map(self, lr_graph: float, lr_classifier: float) -> dict[str, float]:
        return {
            name: lr_classifier if name.startswith("head_") else lr_graph
            for name in self.store.params
        }


def model_inputs(graph: HeteroTextGraph):
    """(normalized adjacency, GAT mask) pair shared by every forward pass."""
    return normalize_adjacency(graph), graph.gat_mask()
