"""Training orchestration: epochs, scheduling, metrics, cross-validation, sweeps.

Training is full-batch and transductive: the whole corpus is in the graph,
one optimizer step per epoch, and the loss is computed on training-document
rows only. Held-out labels are masked from every gradient.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .classifier import PredictionProbs
from .corpus import Corpus, stratified_kfold, tokenize_corpus
from .embeddings import (
    DocEmbeddingMatrix,
    assemble_initial_features,
    hashed_embeddings,
    hashed_token_features,
)
from .errors import ConfigError, NumericError
from .graph import HeteroTextGraph, build_graph
from .lexicon import ConceptLexicon
from .model import KnowCageModel, ModelConfig, model_inputs
from .numerics import adam_step

log = logging.getLogger(__name__)

DEFAULT_LAMBDA_SWEEP = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass
class TrainConfig:
    """Model plus optimization settings; one seed drives all randomness."""

    model: ModelConfig = field(default_factory=ModelConfig)
    lr_graph: float = 1e-3
    lr_classifier: float = 1e-4
    # recorded for completeness; inert here because the context branch works
    # on fixed exported embeddings rather than a fine-tuned text encoder
    lr_text_encoder: float = 2e-5
    epochs: int = 200
    gamma: float = 0.1
    milestone: int = 30
    seed: int = 0
    early_stop_patience: int = 20  # 0 disables; practical addition, not core method
    window_size: int = 20
    min_word_freq: int = 1
    tweet_mode: bool = False
    embedding_dim: int = 64  # hashed-embedding width when no file is given
    init_wc: str = "zeros"  # "zeros" | "hashed" (ablation)

    def validate(self) -> None:
        self.model.validate()
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not (0.0 < self.gamma <= 1.0):
            raise ConfigError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.init_wc not in ("zeros", "hashed"):
            raise ConfigError(f"init_wc must be zeros or hashed, got {self.init_wc!r}")


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float


@dataclass
class TrainResult:
    model: KnowCageModel
    loss_history: list[tuple[int, float, float]]  # (epoch, loss, lr_graph)
    prediction: PredictionProbs  # final per-branch and interpolated probabilities
    graph: HeteroTextGraph

    @property
    def probs(self) -> np.ndarray:
        return self.prediction.p


def lr_schedule(base_lr: float, step: int, milestone: int, gamma: float) -> float:
    """Single-milestone decay: base_lr before the milestone, base_lr * gamma after."""
    if step < 0:
        raise ConfigError(f"step must be >= 0, got {step}")
    return base_lr if step < milestone else base_lr * gamma


def precision_recall_f1(predictions, labels) -> MetricsReport:
    """P, R, F1 with the positive class as target; zero denominators yield 0."""
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    tp = int(np.sum((predictions == 1) & (labels == 1)))
    fp = int(np.sum((predictions == 1) & (labels == 0)))
    fn = int(np.sum((predictions == 0) & (labels == 1)))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MetricsReport(precision=precision, recall=recall, f1=f1)


def build_pipeline_inputs(
    corpus: Corpus,
    lexicon: ConceptLexicon,
    config: TrainConfig,
    embeddings: DocEmbeddingMatrix | None = None,
):
    """Graph, initial features, and document features shared across folds."""
    tokenized = tokenize_corpus(corpus, config.tweet_mode)
    graph = build_graph(tokenized, lexicon, config.window_size, config.min_word_freq)
    if embeddings is None:
        embeddings = hashed_embeddings(corpus, config.embedding_dim, config.seed, config.tweet_mode)
    if embeddings.n_d != corpus.n_docs:
        raise ConfigError(
            f"embeddings cover {embeddings.n_d} documents, corpus has {corpus.n_docs}"
        )
    h0 = assemble_initial_features(embeddings, graph.n_w, graph.n_c)
    if config.init_wc == "hashed":
        node_tokens = [node_id[2:] for node_id in graph.node_ids[graph.n_d :]]
        h0[graph.n_d :] = hashed_token_features(node_tokens, embeddings.d, config.seed)
    return graph, h0, embeddings.values


def train(
    graph: HeteroTextGraph,
    h0: np.ndarray,
    h_doc: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig,
    train_idx: np.ndarray | None = None,
) -> TrainResult:
    """Full-batch training; deterministic for a fixed config and seed."""
    config.validate()
    if train_idx is None:
        train_idx = np.arange(graph.n_d)
    train_idx = np.asarray(train_idx, dtype=np.int64)
    rng = np.random.default_rng(config.seed)
    model = KnowCageModel(config.model, h0.shape[1], h_doc.shape[1], graph.kinds, rng)
    a_hat, mask = model_inputs(graph)

    history: list[tuple[int, float, float]] = []
    best_loss = np.inf
    stale = 0
    for epoch in range(config.epochs):
        lr_g = lr_schedule(config.lr_graph, epoch, config.milestone, config.gamma)
        lr_c = lr_schedule(config.lr_classifier, epoch, config.milestone, config.gamma)
        p, _, _ = model.forward(a_hat, mask, h0, h_doc)
        loss_var = model.loss(p, labels, train_idx)
        loss = float(loss_var.value)
        if not np.isfinite(loss):
            raise NumericError(f"non-finite loss at epoch {epoch}")
        history.append((epoch, loss, lr_g))
        grads = model.gradients(loss_var)
        adam_step(model.store, grads, model.lr_map(lr_g, lr_c))
        if config.early_stop_patience > 0:
            if loss < best_loss - 1e-12:
                best_loss = loss
                stale = 0
            else:
                stale += 1
                if stale >= config.early_stop_patience:
                    log.info("early stop at epoch %d (no train-loss improvement)", epoch)
                    break
    # final probabilities under the trained parameter values
    p, p_g, p_c = model.forward(a_hat, mask, h0, h_doc)
    prediction = PredictionProbs(
        p_g=p_g.value, p_c=p_c.value, p=p.value, lam=config.model.lambda_
    )
    return TrainResult(model=model, loss_history=history, prediction=prediction, graph=graph)


def evaluate_probs(probs: np.ndarray, labels: np.ndarray, idx: np.ndarray) -> MetricsReport:
    predictions = probs[idx].argmax(axis=1)
    return precision_recall_f1(predictions, labels[idx])


def train_eval_split(
    corpus: Corpus,
    lexicon: ConceptLexicon,
    config: TrainConfig,
    train_ids: list[str],
    test_ids: list[str],
    embeddings: DocEmbeddingMatrix | None = None,
) -> tuple[MetricsReport, TrainResult]:
    """Train with the given id split and report metrics on the held-out ids."""
    index = {doc_id: i for i, doc_id in enumerate(corpus.ids)}
    missing = [i for i in list(train_ids) + list(test_ids) if i not in index]
    if missing:
        raise ConfigError(f"split references unknown document ids: {missing[:5]}")
    graph, h0, h_doc = build_pipeline_inputs(corpus, lexicon, config, embeddings)
    train_idx = np.array([index[i] for i in train_ids], dtype=np.int64)
    test_idx = np.array([index[i] for i in test_ids], dtype=np.int64)
    result = train(graph, h0, h_doc, corpus.labels, config, train_idx)
    return evaluate_probs(result.probs, corpus.labels, test_idx), result


def cross_validate(
    corpus: Corpus,
    lexicon: ConceptLexicon,
    k: int,
    config: TrainConfig,
    embeddings: DocEmbeddingMatrix | None = None,
) -> tuple[list[MetricsReport], MetricsReport]:
    """Stratified k-fold over one shared transductive graph.

    Nothing is rebuilt per fold; the fold's documents are masked out of the
    loss and evaluated on afterwards. Returns per-fold reports plus their
    arithmetic mean.
    """
    config.validate()
    graph, h0, h_doc = build_pipeline_inputs(corpus, lexicon, config, embeddings)
    index = {doc_id: i for i, doc_id in enumerate(corpus.ids)}
    labels = corpus.labels
    reports = []
    for train_ids, test_ids in stratified_kfold(corpus, k, config.seed):
        train_idx = np.array([index[i] for i in train_ids], dtype=np.int64)
        test_idx = np.array([index[i] for i in test_ids], dtype=np.int64)
        result = train(graph, h0, h_doc, labels, config, train_idx)
        reports.append(evaluate_probs(result.probs, labels, test_idx))
    mean = MetricsReport(
        precision=float(np.mean([r.precision for r in reports])),
        recall=float(np.mean([r.recall for r in reports])),
        f1=float(np.mean([r.f1 for r in reports])),
    )
    return reports, mean


def lambda_sweep(
    corpus: Corpus,
    lexicon: ConceptLexicon,
    config: TrainConfig,
    values=DEFAULT_LAMBDA_SWEEP,
    train_ids: list[str] | None = None,
    test_ids: list[str] | None = None,
    embeddings: DocEmbeddingMatrix | None = None,
) -> list[tuple[float, MetricsReport]]:
    """One full train/eval per lambda value with a shared seed and split.

    Without an explicit split, fold 0 of a seed-derived 5-fold split is
    held out.
    """
    for lam in values:
        if not (0.0 <= lam < 1.0):
            raise ConfigError(f"lambda must lie in [0, 1), got {lam}")
    if train_ids is None or test_ids is None:
        train_ids, test_ids = stratified_kfold(corpus, 5, config.seed)[0]
    rows = []
    for lam in values:
        cfg = replace(config, model=replace(config.model, lambda_=lam))
        report, _ = train_eval_split(corpus, lexicon, cfg, train_ids, test_ids, embeddings)
        rows.append((lam, report))
    return rows
