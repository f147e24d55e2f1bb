"""Deterministic fixtures: the gradient-check model and the planted-signal corpus.

The planted-signal corpus is built so the label is carried exclusively by
concept nodes: every document contains one signal token unique to that
document, and the lexicon maps each signal token to a concept whose
preferred name is shared across its class. Word-level features therefore
cannot generalize across documents; the class hubs exist only in the
augmented graph. Removing the lexicon removes the signal.
"""

from __future__ import annotations

import numpy as np

from .corpus import Corpus, Document
from .lexicon import ConceptEntry, ConceptLexicon
from .model import ATTENTIONS, ENCODERS, KnowCageModel, ModelConfig, model_inputs
from .numerics import finite_diff_grad, max_relative_error
from .training import TrainConfig, build_pipeline_inputs

GRADCHECK_TEXTS = (
    ("g1", "alpha beta gamma", 1),
    ("g2", "beta gamma delta", 0),
    ("g3", "gamma delta epsilon", 1),
)
GRADCHECK_LEXICON = ConceptLexicon(
    entries={
        "alpha": ConceptEntry("alpha", "C0000001", "conceptone"),
        "epsilon": ConceptEntry("epsilon", "C0000002", "concepttwo"),
    }
)


def gradcheck_corpus() -> Corpus:
    return Corpus(tuple(Document(i, t, y) for i, t, y in GRADCHECK_TEXTS))


def gradcheck_config(encoder: str, attention: str) -> TrainConfig:
    """3 docs, 5 words, 2 concepts, d=8, hidden=6; smooth activation so the
    finite-difference comparison is not polluted by rectifier kinks."""
    model = ModelConfig(
        encoder=encoder,
        attention=attention,
        hidden_dim=6,
        attention_dim=6,
        activation="tanh",
        structured_hops=2,
        structured_da=5,
        lambda_=0.5,
    )
    return TrainConfig(model=model, embedding_dim=8, seed=12345)


def gradcheck_error(encoder: str, attention: str, h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients."""
    corpus = gradcheck_corpus()
    config = gradcheck_config(encoder, attention)
    graph, h0, h_doc = build_pipeline_inputs(corpus, GRADCHECK_LEXICON, config)
    assert (graph.n_d, graph.n_w, graph.n_c) == (3, 5, 2)
    rng = np.random.default_rng(config.seed)
    model = KnowCageModel(config.model, h0.shape[1], h_doc.shape[1], graph.kinds, rng)
    a_hat, mask = model_inputs(graph)
    labels = corpus.labels
    train_idx = np.arange(graph.n_d)

    def loss_value() -> float:
        p, _, _ = model.forward(a_hat, mask, h0, h_doc)
        return float(model.loss(p, labels, train_idx).value)

    p, _, _ = model.forward(a_hat, mask, h0, h_doc)
    analytic = model.gradients(model.loss(p, labels, train_idx))
    numeric = finite_diff_grad(loss_value, model.store, h)
    return max_relative_error(analytic, numeric)


def gradcheck_all(h: float = 1e-5) -> dict[tuple[str, str], float]:
    return {
        (e, a): gradcheck_error(e, a, h)
        for e in ENCODERS
        for a in ATTENTIONS
    }


# none of these collide with the shipped stop-word list
FILLER_WORDS = (
    "taking medication daily since last week doctor said nothing unusual "
    "started feeling better slightly morning evening water sleep food rest"
).split()

POSITIVE_HUBS = tuple(f"reaction{c}" for c in "abcdefghij")
NEGATIVE_HUBS = tuple(f"wellness{c}" for c in "abcdefghij")


def planted_corpus(
    n_docs: int = 200, seed: int = 7, n_fillers: int = 3
) -> tuple[Corpus, ConceptLexicon]:
    """Corpus where the label is reachable only through concept nodes.

    Each document carries one signal token unique to it plus class-neutral
    fillers. The lexicon maps the signal token to a concept whose preferred
    name is two hub tokens drawn from that class's pool, so class structure
    exists only in the concept layer. Training prunes the singleton signal
    words from the word vocabulary (min_word_freq=2), leaving the concept
    path as the only route from token to label.
    """
    rng = np.random.default_rng(seed)
    docs = []
    entries: dict[str, ConceptEntry] = {}
    for i in range(n_docs):
        label = i % 2
        signal = f"sig{i:04d}x"  # unique per document; trailing letter keeps it non-numeric
        pool = POSITIVE_HUBS if label == 1 else NEGATIVE_HUBS
        hub_tokens = list(rng.choice(pool, size=2, replace=False))
        fillers = list(rng.choice(FILLER_WORDS, size=n_fillers, replace=False))
        position = int(rng.integers(0, n_fillers + 1))
        tokens = fillers[:position] + [signal] + fillers[position:]
        docs.append(Document(f"doc{i:04d}", " ".join(tokens), label))
        entries[signal] = ConceptEntry(signal, f"C{9000000 + i}", " ".join(hub_tokens))
    return Corpus(tuple(docs)), ConceptLexicon(entries=entries)


def planted_config(seed: int = 7, epochs: int = 200) -> TrainConfig:
    model = ModelConfig(
        encoder="gcn",
        attention="concept",
        hidden_dim=32,
        attention_dim=32,
        lambda_=0.9,
    )
    return TrainConfig(
        model=model,
        epochs=epochs,
        seed=seed,
        embedding_dim=32,
        lr_graph=5e-3,
        lr_classifier=1e-3,
        milestone=200,
        min_word_freq=2,
    )
