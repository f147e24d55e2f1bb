import math

import numpy as np
import pytest

from knowcage.corpus import Corpus, Document, tokenize_corpus
from knowcage.errors import DataValidationError
from knowcage.graph import (
    CooccurrenceStats,
    NodeKind,
    augment_window_with_concepts,
    build_graph,
    compute_pmi,
    compute_tfidf,
    edge_list_rows,
    export_edge_list,
    normalize_adjacency,
    sliding_windows,
)
from knowcage.lexicon import ConceptEntry, ConceptLexicon, EMPTY_LEXICON, concept_tokens

from helpers_graph import LEX, WORD_POOL, brute_force_adjacency, corpus_from_texts, random_corpus


def toks(corpus):
    return tokenize_corpus(corpus)


class TestSlidingWindows:
    def test_short_document(self):
        assert sliding_windows(["a", "b", "c"], 20) == [["a", "b", "c"]]

    def test_count(self):
        assert sliding_windows(list("abcd"), 3) == [["a", "b", "c"], ["b", "c", "d"]]

    def test_empty(self):
        assert sliding_windows([], 5) == []


class TestAugmentWindow:
    def test_expansion(self):
        units = augment_window_with_concepts(["lipitor", "fever"], LEX)
        assert units == {("w", "lipitor"), ("w", "fever"), ("c", "atorvastatin")}

    def test_no_hits(self):
        units = augment_window_with_concepts(["x", "y"], EMPTY_LEXICON)
        assert units == {("w", "x"), ("w", "y")}

    def test_shared_concept_counted_once(self):
        lex = ConceptLexicon(
            entries={
                "a": ConceptEntry("a", "C1", "shared"),
                "b": ConceptEntry("b", "C2", "shared"),
            }
        )
        units = augment_window_with_concepts(["a", "b"], lex)
        assert units == {("w", "a"), ("w", "b"), ("c", "shared")}


class TestComputePmi:
    def test_always_together_every_window(self):
        stats = CooccurrenceStats(2, {0: 2, 1: 2}, {(0, 1): 2})
        assert compute_pmi(stats, 0, 1) == pytest.approx(0.0)

    def test_exclusive_pair(self):
        stats = CooccurrenceStats(4, {0: 1, 1: 1}, {(0, 1): 1})
        assert compute_pmi(stats, 0, 1) == pytest.approx(math.log(4))

    def test_never_cooccur(self):
        stats = CooccurrenceStats(4, {0: 2, 1: 2}, {})
        assert compute_pmi(stats, 0, 1) == -math.inf


class TestComputeTfidf:
    def test_unit_everywhere_idf_zero(self):
        docs = toks(corpus_from_texts(["common fever", "common chills"]))
        assert compute_tfidf(docs, EMPTY_LEXICON, ("w", "common"), "d0") == 0.0

    def test_two_occurrences(self):
        docs = toks(corpus_from_texts(["fever fever chills", "calm", "calm", "calm"]))
        assert compute_tfidf(docs, EMPTY_LEXICON, ("w", "fever"), "d0") == pytest.approx(
            2 * math.log(4)
        )

    def test_absent_unit(self):
        docs = toks(corpus_from_texts(["fever", "calm"]))
        assert compute_tfidf(docs, EMPTY_LEXICON, ("w", "fever"), "d1") == 0.0


class TestBuildGraph:
    def test_counts_and_doc_concept_edge(self):
        docs = toks(corpus_from_texts(["lipitor fever", "fever chills"]))
        graph = build_graph(docs, LEX, window_size=20)
        assert graph.n_d == 2
        assert graph.n_c == 1
        assert graph.n == 2 + graph.n_w + 1
        kinds = {
            (NodeKind(graph.kinds[i]), NodeKind(graph.kinds[j]))
            for i, j, w in zip(*_triplets(graph))
            if w != 0
        }
        assert (NodeKind.DOCUMENT, NodeKind.CONCEPT) in kinds

    def test_empty_lexicon_reduces_to_word_doc_graph(self):
        docs = toks(corpus_from_texts(["fever chills", "chills calm"]))
        graph = build_graph(docs, EMPTY_LEXICON, window_size=20)
        assert graph.n_c == 0
        labels = {pair for _, _, pair, _ in edge_list_rows(graph)}
        assert labels <= {"document-word", "word-word"}

    def test_empty_vocabulary_rejected(self):
        docs = toks(corpus_from_texts(["the of and", "a an"]))
        with pytest.raises(DataValidationError, match="vocabulary"):
            build_graph(docs, EMPTY_LEXICON)

    def test_word_concept_token_collision_distinct_nodes(self):
        docs = toks(corpus_from_texts(["pain lipitor", "pain calm"]))
        graph = build_graph(docs, LEX, window_size=20)
        assert "w:pain" in graph.node_ids
        assert "c:pain" in graph.node_ids


def _triplets(graph):
    a = graph.adjacency
    rows = np.repeat(np.arange(a.shape[0]), np.diff(a.indptr))
    return rows, a.indices, a.data


class TestNormalizeAdjacency:
    def test_isolated_node_self_loop(self):
        docs = toks(corpus_from_texts(["fever", "chills"]))
        graph = build_graph(docs, EMPTY_LEXICON)
        a_hat = normalize_adjacency(graph).to_dense()
        assert np.allclose(a_hat, a_hat.T)
        assert np.all(np.diag(a_hat) > 0)

    def test_two_node_hand_computation(self):
        import knowcage.graph as g
        from knowcage.numerics import CsrMatrix

        graph = g.HeteroTextGraph(
            node_ids=["d:a", "w:x"],
            kinds=np.array([0, 1]),
            n_d=1,
            n_w=1,
            n_c=0,
            adjacency=CsrMatrix.from_coo([0, 1], [1, 0], [1.0, 1.0], (2, 2)),
        )
        a_hat = normalize_adjacency(graph).to_dense()
        assert np.allclose(a_hat, np.array([[0.5, 0.5], [0.5, 0.5]]), atol=1e-15)

    def test_symmetry_random_fixture(self):
        docs = toks(
            corpus_from_texts(
                ["lipitor fever cramps", "fever chills", "cramps pain lipitor", "calm pain"]
            )
        )
        a_hat = normalize_adjacency(build_graph(docs, LEX, window_size=3)).to_dense()
        assert np.allclose(a_hat, a_hat.T, atol=0)


@pytest.mark.parametrize("seed,n_docs,window", [(0, 6, 4), (1, 12, 3), (2, 20, 20), (3, 9, 1)])
def test_adjacency_matches_brute_force(seed, n_docs, window):
    rng = np.random.default_rng(seed)
    docs = toks(random_corpus(rng, n_docs))
    graph = build_graph(docs, LEX, window_size=window)
    dense = graph.adjacency.to_dense()
    oracle = brute_force_adjacency(docs, LEX, window)
    assert dense.shape == oracle.shape
    assert np.max(np.abs(dense - oracle)) < 1e-12


def test_edge_typing_invariant():
    rng = np.random.default_rng(7)
    docs = toks(random_corpus(rng, 15))
    graph = build_graph(docs, LEX, window_size=5)
    allowed = {
        frozenset({NodeKind.WORD}),
        frozenset({NodeKind.WORD, NodeKind.CONCEPT}),
        frozenset({NodeKind.CONCEPT}),
        frozenset({NodeKind.DOCUMENT, NodeKind.WORD}),
        frozenset({NodeKind.DOCUMENT, NodeKind.CONCEPT}),
    }
    rows, cols, vals = _triplets(graph)
    for i, j, w in zip(rows, cols, vals):
        assert w > 0 or (NodeKind(graph.kinds[i]) is NodeKind.DOCUMENT) != (
            NodeKind(graph.kinds[j]) is NodeKind.DOCUMENT
        ), "PMI edges must be strictly positive"
        pair = frozenset({NodeKind(graph.kinds[i]), NodeKind(graph.kinds[j])})
        assert pair in allowed
    # the document-document block stays empty
    dense = graph.adjacency.to_dense()
    assert np.all(dense[: graph.n_d, : graph.n_d] == 0)


def test_pmi_edges_strictly_positive():
    rng = np.random.default_rng(11)
    docs = toks(random_corpus(rng, 10))
    graph = build_graph(docs, LEX, window_size=4)
    rows, cols, vals = _triplets(graph)
    for i, j, w in zip(rows, cols, vals):
        if graph.kinds[i] != NodeKind.DOCUMENT and graph.kinds[j] != NodeKind.DOCUMENT:
            assert w > 0


def test_export_deterministic(tmp_path):
    docs = toks(corpus_from_texts(["lipitor fever cramps", "fever chills", "pain calm"]))
    graph = build_graph(docs, LEX, window_size=20)
    p1, p2 = tmp_path / "e1.tsv", tmp_path / "e2.tsv"
    export_edge_list(graph, p1)
    export_edge_list(build_graph(docs, LEX, window_size=20), p2)
    assert p1.read_bytes() == p2.read_bytes()
    first = p1.read_text().splitlines()[0].split("\t")
    assert len(first) == 4
