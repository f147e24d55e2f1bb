"""Corpus loading, text preprocessing, tokenization, and stratified folds."""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataValidationError, ParseError
from .stopwords import STOP_WORDS

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
_RESERVED_RE = re.compile(r"\b(?:rt|fav)\b")
_DIGITS_RE = re.compile(r"\d+")

# Emoji blocks not covered by unicode symbol categories alone.
_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),
    (0x2600, 0x27BF),
    (0xFE00, 0xFE0F),
    (0x200D, 0x200D),
)


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: int


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]

    @property
    def n_docs(self) -> int:
        return len(self.documents)

    @property
    def class_counts(self) -> tuple[int, int]:
        """(N0, N1) = counts of label 0 and label 1 documents."""
        n1 = sum(d.label for d in self.documents)
        return len(self.documents) - n1, n1

    @property
    def labels(self) -> np.ndarray:
        return np.array([d.label for d in self.documents], dtype=np.int64)

    @property
    def ids(self) -> list[str]:
        return [d.id for d in self.documents]


@dataclass(frozen=True)
class TokenizedDocument:
    id: str
    tokens: tuple[str, ...]
    label: int


def _validate_record(path, line_no, rec_id, text, label, seen_ids) -> Document:
    if not isinstance(rec_id, str) or not rec_id:
        raise ParseError(path, line_no, "record id must be a non-empty string")
    if not isinstance(text, str):
        raise ParseError(path, line_no, "text must be a string")
    if label not in (0, 1):
        raise ParseError(path, line_no, f"label must be 0 or 1, got {label!r}")
    if rec_id in seen_ids:
        raise DataValidationError(f"{path}:{line_no}: duplicate document id {rec_id!r}")
    seen_ids.add(rec_id)
    return Document(id=rec_id, text=text, label=int(label))


def load_corpus(path, format: str = "jsonl") -> Corpus:
    """Load a labeled document collection from JSONL or TSV.

    JSONL: one object per line with keys "id", "text", "label" (0/1).
    TSV: exactly three tab-separated columns id/text/label, no header;
    tabs are forbidden inside text.
    """
    if format not in ("jsonl", "tsv"):
        raise ConfigError(f"unknown corpus format {format!r}")
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if format == "jsonl":
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(path, line_no, f"invalid JSON: {exc.msg}") from exc
                if not isinstance(rec, dict) or not {"id", "text", "label"} <= rec.keys():
                    raise ParseError(path, line_no, "record needs keys id, text, label")
                docs.append(
                    _validate_record(path, line_no, rec["id"], rec["text"], rec["label"], seen)
                )
            else:
                cols = line.split("\t")
                if len(cols) != 3:
                    raise ParseError(path, line_no, f"expected 3 tab-separated columns, got {len(cols)}")
                rec_id, text, label_s = cols
                if label_s not in ("0", "1"):
                    raise ParseError(path, line_no, f"label must be 0 or 1, got {label_s!r}")
                docs.append(_validate_record(path, line_no, rec_id, text, int(label_s), seen))
    return Corpus(documents=tuple(docs))


def _strip_emoji(text: str) -> str:
    out = []
    for ch in text:
        cp = ord(ch)
        if any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES):
            out.append(" ")
        elif unicodedata.category(ch) in ("So", "Sk"):
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


def _strip_punctuation(text: str) -> str:
    return "".join(" " if unicodedata.category(ch).startswith("P") else ch for ch in text)


def preprocess(text: str, tweet_mode: bool = False) -> str:
    """Lowercase and remove stop words, punctuation, and standalone numbers.

    In tweet mode additionally removes URLs, @-mentions, RT/FAV markers,
    emoji codepoints, and hashtag symbols (the hashtag word is kept).
    Idempotent: applying it twice gives the same output.
    """
    text = unicodedata.normalize("NFKC", text).lower()
    if tweet_mode:
        text = _URL_RE.sub(" ", text)
        text = _MENTION_RE.sub(" ", text)
        text = _RESERVED_RE.sub(" ", text)
        text = _strip_emoji(text)
        text = text.replace("#", " ")
    text = _strip_punctuation(text)
    kept = [
        tok
        for tok in text.split()
        if tok not in STOP_WORDS and not _DIGITS_RE.fullmatch(tok)
    ]
    return " ".join(kept)


def tokenize(text: str) -> list[str]:
    """Whitespace split; empty fields dropped."""
    return text.split()


def tokenize_corpus(corpus: Corpus, tweet_mode: bool = False) -> list[TokenizedDocument]:
    return [
        TokenizedDocument(id=d.id, tokens=tuple(tokenize(preprocess(d.text, tweet_mode))), label=d.label)
        for d in corpus.documents
    ]


def stratified_kfold(corpus: Corpus, k: int, seed: int) -> list[tuple[list[str], list[str]]]:
    """Deterministic stratified k-fold split into (train_ids, test_ids) pairs.

    Test folds are disjoint and cover every document exactly once; the
    per-fold class ratio stays within one document of the global ratio.
    """
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    order = {d.id: i for i, d in enumerate(corpus.documents)}
    rng = np.random.default_rng(seed)
    fold_members: list[list[str]] = [[] for _ in range(k)]
    start = 0  # stagger classes so total fold sizes differ by at most one
    for label in (0, 1):
        ids = [d.id for d in corpus.documents if d.label == label]
        if len(ids) < k:
            raise ConfigError(f"class {label} has {len(ids)} members, fewer than k={k}")
        rng.shuffle(ids)
        for i, doc_id in enumerate(ids):
            fold_members[(start + i) % k].append(doc_id)
        start = (start + len(ids)) % k
    folds = []
    for f in range(k):
        test = sorted(fold_members[f], key=order.__getitem__)
        test_set = set(test)
        train = [d.id for d in corpus.documents if d.id not in test_set]
        folds.append((train, test))
    return folds
