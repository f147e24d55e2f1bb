"""Document embedding I/O and initial feature assembly.

The KCEM binary format decouples the model from any pretrained-LM runtime:
magic "KCEM", version u16, n_d u64, d u32 (all little-endian), n_d
null-terminated UTF-8 document ids, then n_d * d little-endian float32
values row-major. Values are widened to float64 on load; gradients are
checked at 64-bit precision downstream.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, preprocess, tokenize
from .errors import DataValidationError

KCEM_MAGIC = b"KCEM"
KCEM_VERSION = 1


@dataclass(frozen=True)
class DocEmbeddingMatrix:
    ids: tuple[str, ...]
    values: np.ndarray  # n_d x d float64

    @property
    def n_d(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def write_embeddings(matrix: DocEmbeddingMatrix, path) -> None:
    """Write the KCEM binary file (values stored at 32-bit precision)."""
    with open(path, "wb") as fh:
        fh.write(KCEM_MAGIC)
        fh.write(struct.pack("<HQI", KCEM_VERSION, matrix.n_d, matrix.d))
        for doc_id in matrix.ids:
            fh.write(doc_id.encode("utf-8") + b"\x00")
        fh.write(matrix.values.astype("<f4").tobytes(order="C"))


def _load_kcem(path) -> DocEmbeddingMatrix:
    with open(path, "rb") as fh:
        blob = fh.read()
    header = struct.calcsize("<HQI")
    if blob[:4] != KCEM_MAGIC or len(blob) < 4 + header:
        raise DataValidationError(f"{path}: not a KCEM file")
    version, n_d, d = struct.unpack_from("<HQI", blob, 4)
    if version != KCEM_VERSION:
        raise DataValidationError(f"{path}: unsupported KCEM version {version}")
    pos = 4 + header
    ids = []
    for _ in range(n_d):
        end = blob.find(b"\x00", pos)
        if end < 0:
            raise DataValidationError(f"{path}: truncated id table")
        ids.append(blob[pos:end].decode("utf-8"))
        pos = end + 1
    expected = n_d * d * 4
    if len(blob) - pos != expected:
        raise DataValidationError(
            f"{path}: expected {expected} bytes of float32 data, found {len(blob) - pos}"
        )
    values = np.frombuffer(blob, dtype="<f4", count=n_d * d, offset=pos)
    return DocEmbeddingMatrix(
        ids=tuple(ids), values=values.reshape(n_d, d).astype(np.float64)
    )


def _load_tsv(path) -> DocEmbeddingMatrix:
    ids = []
    rows = []
    width = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise DataValidationError(f"{path}:{line_no}: expected id plus float columns")
            if width is None:
                width = len(cols) - 1
            elif len(cols) - 1 != width:
                raise DataValidationError(f"{path}:{line_no}: inconsistent column count")
            ids.append(cols[0])
            try:
                rows.append([float(c) for c in cols[1:]])
            except ValueError as exc:
                raise DataValidationError(f"{path}:{line_no}: {exc}") from exc
    return DocEmbeddingMatrix(ids=tuple(ids), values=np.asarray(rows, dtype=np.float64))


def load_embeddings(path, corpus: Corpus | None = None) -> DocEmbeddingMatrix:
    """Load KCEM (sniffed by magic bytes) or debug TSV embeddings.

    When a corpus is given, ids must match its document order exactly.
    """
    with open(path, "rb") as fh:
        magic = fh.read(4)
    matrix = _load_kcem(path) if magic == KCEM_MAGIC else _load_tsv(path)
    if not np.all(np.isfinite(matrix.values)):
        raise DataValidationError(f"{path}: embeddings contain non-finite entries")
    if corpus is not None:
        if list(matrix.ids) != corpus.ids:
            raise DataValidationError(
                f"{path}: embedding ids do not match corpus document order"
            )
    return matrix


def _token_vector(token: str, d: int, seed: int) -> tuple[int, float]:
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=16, key=str(seed).encode("ascii")
    ).digest()
    bucket = int.from_bytes(digest[:8], "little") % d
    sign = 1.0 if digest[8] & 1 else -1.0
    return bucket, sign


def hashed_embeddings(corpus: Corpus, d: int, seed: int = 0, tweet_mode: bool = False) -> DocEmbeddingMatrix:
    """Deterministic bag-of-hashed-words unit vectors; a test-time stand-in
    for exported contextualized embeddings."""
    if d < 1:
        raise DataValidationError(f"embedding dimension must be >= 1, got {d}")
    values = np.zeros((corpus.n_docs, d))
    for row, doc in enumerate(corpus.documents):
        tokens = tokenize(preprocess(doc.text, tweet_mode))
        if not tokens:
            tokens = [""]  # empty documents still get a deterministic unit vector
        for token in tokens:
            bucket, sign = _token_vector(token, d, seed)
            values[row, bucket] += sign
        norm = np.linalg.norm(values[row])
        if norm == 0.0:
            bucket, _ = _token_vector("", d, seed)
            values[row, bucket] = 1.0
            norm = 1.0
        values[row] /= norm
    return DocEmbeddingMatrix(ids=tuple(corpus.ids), values=values)


def assemble_initial_features(h_doc: DocEmbeddingMatrix, n_w: int, n_c: int) -> np.ndarray:
    """Stack H_doc on top of an (n_w + n_c) x d zero block."""
    if n_w < 0 or n_c < 0:
        raise DataValidationError("node counts must be non-negative")
    zeros = np.zeros((n_w + n_c, h_doc.d))
    return np.vstack([h_doc.values, zeros])


def hashed_token_features(tokens, d: int, seed: int = 0) -> np.ndarray:
    """One deterministic unit vector per token; the init_wc=hashed ablation
    uses these instead of the default zero rows for word/concept nodes."""
    values = np.zeros((len(tokens), d))
    for row, token in enumerate(tokens):
        bucket, sign = _token_vector(token, d, seed)
        values[row, bucket] = sign
    return values
