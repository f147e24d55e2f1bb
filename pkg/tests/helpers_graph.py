"""Shared test helpers: the independent brute-force graph oracle."""

import math

import numpy as np

from knowcage.corpus import Corpus, Document
from knowcage.graph import sliding_windows
from knowcage.lexicon import ConceptEntry, ConceptLexicon, concept_tokens

LEX = ConceptLexicon(
    entries={
        "lipitor": ConceptEntry("lipitor", "C1", "atorvastatin"),
        "cramps": ConceptEntry("cramps", "C2", "muscle pain"),
        "pain": ConceptEntry("pain", "C3", "pain sensation"),  # word/concept token collision
    }
)

WORD_POOL = [
    "lipitor", "cramps", "pain", "fever", "chills", "calm", "happy", "severe",
    "mild", "sleep", "ache", "dose", "daily", "sudden", "better",
]


def corpus_from_texts(texts):
    return Corpus(tuple(Document(f"d{i}", t, i % 2) for i, t in enumerate(texts)))


def random_corpus(rng, n_docs, max_len=9):
    texts = []
    for _ in range(n_docs):
        length = int(rng.integers(1, max_len))
        texts.append(" ".join(rng.choice(WORD_POOL, size=length)))
    return corpus_from_texts(texts)


def brute_force_adjacency(tokenized, lexicon, window_size):
    """O(n^2) recomputation: per-pair window scans and direct tf/df recounts.

    Deliberately independent of the production counting path: pair counts
    come from scanning every window for every node pair, and tf/df from
    direct token scans.
    """
    n_d = len(tokenized)
    vocab = sorted({t for doc in tokenized for t in doc.tokens})
    concepts = set()
    for t in vocab:
        entry = lexicon.lookup(t)
        if entry is not None:
            concepts.update(concept_tokens(entry))
    concepts = sorted(concepts)
    node_of = {("w", t): n_d + i for i, t in enumerate(vocab)}
    node_of.update({("c", t): n_d + len(vocab) + i for i, t in enumerate(concepts)})
    n = n_d + len(vocab) + len(concepts)

    windows = []
    for doc in tokenized:
        for win in sliding_windows(doc.tokens, window_size):
            units = {("w", t) for t in win}
            for t in win:
                entry = lexicon.lookup(t)
                if entry is not None:
                    units.update(("c", ct) for ct in concept_tokens(entry))
            windows.append({node_of[u] for u in units})
    n_win = len(windows)

    a = np.zeros((n, n))
    unit_nodes = sorted(node_of.values())
    for ii, i in enumerate(unit_nodes):
        for j in unit_nodes[ii + 1 :]:
            ci = sum(1 for w in windows if i in w)
            cj = sum(1 for w in windows if j in w)
            pij = sum(1 for w in windows if i in w and j in w)
            if ci and cj and pij:
                pmi = math.log(pij * n_win / (ci * cj))
                if pmi > 0:
                    a[i, j] = a[j, i] = pmi

    for d_idx, doc in enumerate(tokenized):
        for unit, node in node_of.items():
            kind, token = unit
            if kind == "w":
                tf = sum(1 for t in doc.tokens if t == token)
            else:
                tf = sum(
                    1
                    for t in doc.tokens
                    if (e := lexicon.lookup(t)) is not None
                    and token in set(concept_tokens(e))
                )
            if tf == 0:
                continue
            df = 0
            for other in tokenized:
                if kind == "w":
                    present = token in other.tokens
                else:
                    present = any(
                        (e := lexicon.lookup(t)) is not None
                        and token in set(concept_tokens(e))
                        for t in other.tokens
                    )
                df += present
            w = tf * math.log(n_d / df)
            if w != 0.0:
                a[d_idx, node] = a[node, d_idx] = w
    return a
