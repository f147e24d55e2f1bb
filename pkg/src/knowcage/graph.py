"""Knowledge-augmented heterogeneous text graph construction.

Nodes are ordered documents, then words, then concepts. Word-word,
word-concept, and concept-concept edges carry positive PMI over sliding
windows; document-word and document-concept edges carry TF-IDF. Document
pairs are never connected. Concept units inherit the window positions of
the words that trigger them, which is what gives concept-concept and
word-concept pairs a co-occurrence count at all.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import kernels
from .corpus import TokenizedDocument
from .errors import DataValidationError
from .lexicon import ConceptLexicon, concept_tokens
from .numerics import CsrMatrix


class NodeKind(IntEnum):
    DOCUMENT = 0
    WORD = 1
    CONCEPT = 2


KIND_PAIR_LABELS = {
    (NodeKind.DOCUMENT, NodeKind.WORD): "document-word",
    (NodeKind.DOCUMENT, NodeKind.CONCEPT): "document-concept",
    (NodeKind.WORD, NodeKind.WORD): "word-word",
    (NodeKind.WORD, NodeKind.CONCEPT): "word-concept",
    (NodeKind.CONCEPT, NodeKind.CONCEPT): "concept-concept",
}


@dataclass(frozen=True)
class CooccurrenceStats:
    """Window-based counts feeding PMI: p(i), p(j), p(i,j) numerators."""

    window_count: int
    unit_count: dict[int, int]
    pair_count: dict[tuple[int, int], int]  # keys (i, j) with i < j

    def pairs(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("pair counts are defined for distinct units")
        key = (i, j) if i < j else (j, i)
        return self.pair_count.get(key, 0)


@dataclass
class HeteroTextGraph:
    node_ids: list[str]  # "d:<doc id>", "w:<token>", "c:<token>"
    kinds: np.ndarray  # NodeKind value per node
    n_d: int
    n_w: int
    n_c: int
    adjacency: CsrMatrix

    @property
    def n(self) -> int:
        return self.n_d + self.n_w + self.n_c

    def gat_mask(self) -> np.ndarray:
        """Boolean A > 0 mask with self-loops, for attention-style encoders."""
        mask = self.adjacency.to_dense() > 0.0
        np.fill_diagonal(mask, True)
        return mask


def sliding_windows(tokens, window_size: int) -> list[list[str]]:
    """All contiguous windows; a document shorter than the window is one window."""
    if window_size < 1:
        raise DataValidationError(f"window_size must be >= 1, got {window_size}")
    tokens = list(tokens)
    if not tokens:
        return []
    if len(tokens) <= window_size:
        return [tokens]
    return [tokens[i : i + window_size] for i in range(len(tokens) - window_size + 1)]


def augment_window_with_concepts(window, lexicon: ConceptLexicon) -> set[tuple[str, str]]:
    """Window units: ("w", token) for each word plus ("c", token) for every
    concept token of every matched word. Set semantics: one count per unit
    per window regardless of multiplicity.
    """
    units: set[tuple[str, str]] = set()
    for token in window:
        units.add(("w", token))
        entry = lexicon.lookup(token)
        if entry is not None:
            for ct in concept_tokens(entry):
                units.add(("c", ct))
    return units


def compute_pmi(stats: CooccurrenceStats, i: int, j: int) -> float:
    """log(pair * windows / (count_i * count_j)); -inf when the pair never co-occurs."""
    ci, cj = stats.unit_count[i], stats.unit_count[j]
    if ci <= 0 or cj <= 0:
        raise DataValidationError("PMI needs positive unit counts")
    pij = stats.pairs(i, j)
    if pij == 0:
        return -math.inf
    return math.log(pij * stats.window_count / (ci * cj))


def _doc_unit_tf(doc: TokenizedDocument, lexicon: ConceptLexicon) -> Counter:
    """Raw term frequencies of word and concept units within one document.

    A concept unit counts once per occurrence of each word that triggers it,
    even if the preferred name repeats the token.
    """
    tf: Counter = Counter()
    for token in doc.tokens:
        tf[("w", token)] += 1
        entry = lexicon.lookup(token)
        if entry is not None:
            for ct in set(concept_tokens(entry)):
                tf[("c", ct)] += 1
    return tf


def compute_tfidf(tokenized_docs, lexicon: ConceptLexicon, unit: tuple[str, str], doc_id: str) -> float:
    """tf * log(n_docs / df) for one unit in one document; 0 when absent."""
    n_docs = len(tokenized_docs)
    tf = 0
    df = 0
    for doc in tokenized_docs:
        doc_tf = _doc_unit_tf(doc, lexicon)
        if doc_tf[unit] > 0:
            df += 1
        if doc.id == doc_id:
            tf = doc_tf[unit]
    if tf == 0:
        return 0.0
    return tf * math.log(n_docs / df)


def build_graph(
    tokenized_docs: list[TokenizedDocument],
    lexicon: ConceptLexicon,
    window_size: int = 20,
    min_word_freq: int = 1,
) -> HeteroTextGraph:
    """Assemble nodes, PMI edges, and TF-IDF edges into a symmetric sparse graph."""
    n_d = len(tokenized_docs)
    word_freq: Counter = Counter()
    for doc in tokenized_docs:
        word_freq.update(doc.tokens)
    words = sorted(t for t, c in word_freq.items() if c >= min_word_freq)
    if not words:
        raise DataValidationError("empty vocabulary: no tokens survive preprocessing")
    word_set = set(words)

    # concept nodes trigger from every corpus token, including words pruned
    # from the vocabulary by the frequency floor
    concepts: set[str] = set()
    for token in word_freq:
        entry = lexicon.lookup(token)
        if entry is not None:
            concepts.update(concept_tokens(entry))
    concept_list = sorted(concepts)

    n_w, n_c = len(words), len(concept_list)
    n = n_d + n_w + n_c
    word_index = {t: n_d + i for i, t in enumerate(words)}
    concept_index = {t: n_d + n_w + i for i, t in enumerate(concept_list)}

    def unit_node(unit: tuple[str, str]) -> int | None:
        kind, token = unit
        if kind == "w":
            return word_index.get(token)
        return concept_index.get(token)

    # Window co-occurrence counting through the kernels backend. Windows run
    # over the raw token stream: concept triggering does not depend on the
    # word-frequency floor, only word units are gated by vocabulary.
    flat_units: list[int] = []
    offsets = [0]
    for doc in tokenized_docs:
        for window in sliding_windows(doc.tokens, window_size):
            unit_nodes = sorted(
                node
                for u in augment_window_with_concepts(window, lexicon)
                if (node := unit_node(u)) is not None
            )
            flat_units.extend(unit_nodes)
            offsets.append(len(flat_units))
    window_count = len(offsets) - 1
    unit_ids, unit_counts, pair_i, pair_j, pair_counts = kernels.window_unit_pair_counts(
        np.asarray(flat_units, dtype=np.int64), np.asarray(offsets, dtype=np.int64)
    )
    stats = CooccurrenceStats(
        window_count=window_count,
        unit_count=dict(zip(unit_ids.tolist(), unit_counts.tolist())),
        pair_count={
            (int(i), int(j)): int(c) for i, j, c in zip(pair_i, pair_j, pair_counts)
        },
    )

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []

    def put_edge(i: int, j: int, w: float) -> None:
        rows.extend((i, j))
        cols.extend((j, i))
        vals.extend((w, w))

    for (i, j), _count in sorted(stats.pair_count.items()):
        pmi = compute_pmi(stats, i, j)
        if pmi > 0.0:
            put_edge(i, j, pmi)

    # document-unit TF-IDF edges
    doc_tfs = [_doc_unit_tf(doc, lexicon) for doc in tokenized_docs]
    df: Counter = Counter()
    for tf in doc_tfs:
        df.update(unit for unit, c in tf.items() if c > 0)
    for d_idx, tf in enumerate(doc_tfs):
        for unit in sorted(tf):
            node = unit_node(unit)
            if node is None:
                continue
            weight = tf[unit] * math.log(n_d / df[unit])
            if weight != 0.0:
                put_edge(d_idx, node, weight)

    node_ids = (
        [f"d:{doc.id}" for doc in tokenized_docs]
        + [f"w:{t}" for t in words]
        + [f"c:{t}" for t in concept_list]
    )
    kinds = np.concatenate(
        [
            np.full(n_d, NodeKind.DOCUMENT, dtype=np.int64),
            np.full(n_w, NodeKind.WORD, dtype=np.int64),
            np.full(n_c, NodeKind.CONCEPT, dtype=np.int64),
        ]
    )
    adjacency = CsrMatrix.from_coo(rows, cols, vals, (n, n))
    return HeteroTextGraph(
        node_ids=node_ids, kinds=kinds, n_d=n_d, n_w=n_w, n_c=n_c, adjacency=adjacency
    )


def normalize_adjacency(graph: HeteroTextGraph) -> CsrMatrix:
    """Symmetric normalization D^-1/2 (A + I) D^-1/2 with D from A + I."""
    a = graph.adjacency
    n = a.shape[0]
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(a.indptr))
    rows = np.concatenate([rows, np.arange(n, dtype=np.int64)])
    cols = np.concatenate([a.indices, np.arange(n, dtype=np.int64)])
    vals = np.concatenate([a.data, np.ones(n)])
    degree = np.zeros(n)
    np.add.at(degree, rows, vals)
    inv_sqrt = 1.0 / np.sqrt(degree)
    return CsrMatrix.from_coo(rows, cols, vals * inv_sqrt[rows] * inv_sqrt[cols], (n, n))


def edge_list_rows(graph: HeteroTextGraph) -> list[tuple[str, str, str, float]]:
    """One row per undirected edge (upper triangle), sorted, for export/diffing."""
    a = graph.adjacency
    rows = np.repeat(np.arange(a.shape[0], dtype=np.int64), np.diff(a.indptr))
    out = []
    for i, j, w in zip(rows, a.indices, a.data):
        if i < j:
            pair = KIND_PAIR_LABELS[(NodeKind(graph.kinds[i]), NodeKind(graph.kinds[j]))]
            out.append((graph.node_ids[i], graph.node_ids[j], pair, float(w)))
    return out


def export_edge_list(graph: HeteroTextGraph, path) -> None:
    """Deterministic TSV export: src_id, dst_id, kind_pair, weight (17 sig digits)."""
    with open(path, "w", encoding="utf-8") as fh:
        for src, dst, pair, w in edge_list_rows(graph):
            fh.write(f"{src}\t{dst}\t{pair}\t{w:.17g}\n")


def graph_stats(graph: HeteroTextGraph) -> dict:
    edge_kinds = Counter(pair for _, _, pair, _ in edge_list_rows(graph))
    return {
        "n": graph.n,
        "n_d": graph.n_d,
        "n_w": graph.n_w,
        "n_c": graph.n_c,
        "edges": sum(edge_kinds.values()),
        "edges_by_kind": dict(sorted(edge_kinds.items())),
    }
