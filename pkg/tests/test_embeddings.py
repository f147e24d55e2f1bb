import numpy as np
import pytest

from knowcage.corpus import Corpus, Document
from knowcage.embeddings import (
    DocEmbeddingMatrix,
    assemble_initial_features,
    hashed_embeddings,
    hashed_token_features,
    load_embeddings,
    write_embeddings,
)
from knowcage.errors import DataValidationError


def corpus_of(texts):
    return Corpus(tuple(Document(f"d{i}", t, i % 2) for i, t in enumerate(texts)))


class TestKcemRoundTrip:
    def test_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(0)
        values = rng.random((3, 5)).astype(np.float32).astype(np.float64)
        matrix = DocEmbeddingMatrix(ids=("a", "b", "c"), values=values)
        path = tmp_path / "e.kcem"
        write_embeddings(matrix, path)
        loaded = load_embeddings(path)
        assert loaded.ids == ("a", "b", "c")
        assert np.array_equal(loaded.values, values)  # 32-bit values survive exactly

    def test_dimension_echo(self, tmp_path):
        matrix = DocEmbeddingMatrix(ids=("x",), values=np.zeros((1, 768)))
        path = tmp_path / "e.kcem"
        write_embeddings(matrix, path)
        assert load_embeddings(path).d == 768

    def test_truncated_file_rejected(self, tmp_path):
        matrix = DocEmbeddingMatrix(ids=("a", "b"), values=np.ones((2, 4)))
        path = tmp_path / "e.kcem"
        write_embeddings(matrix, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-7])
        with pytest.raises(DataValidationError):
            load_embeddings(path)

    def test_bad_magic_falls_to_tsv_parser(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("a\t1.0\t2.0\nb\t3.0\t4.0\n")
        loaded = load_embeddings(path)
        assert loaded.d == 2
        assert loaded.values[1, 1] == 4.0

    def test_corpus_order_mismatch(self, tmp_path):
        matrix = DocEmbeddingMatrix(ids=("d1", "d0"), values=np.ones((2, 3)))
        path = tmp_path / "e.kcem"
        write_embeddings(matrix, path)
        with pytest.raises(DataValidationError, match="order"):
            load_embeddings(path, corpus_of(["x", "y"]))

    def test_nan_rejected(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("a\tnan\t1.0\n")
        with pytest.raises(DataValidationError, match="non-finite"):
            load_embeddings(path)

    def test_unicode_ids(self, tmp_path):
        matrix = DocEmbeddingMatrix(ids=("café", "日記"), values=np.ones((2, 2)))
        path = tmp_path / "e.kcem"
        write_embeddings(matrix, path)
        assert load_embeddings(path).ids == ("café", "日記")


class TestHashedEmbeddings:
    def test_identical_documents_identical_rows(self):
        m = hashed_embeddings(corpus_of(["same text here", "same text here"]), d=16, seed=1)
        assert np.array_equal(m.values[0], m.values[1])

    def test_unit_norms(self):
        m = hashed_embeddings(corpus_of(["a b c", "d e", "", "x y z w"]), d=16, seed=2)
        assert np.linalg.norm(m.values, axis=1) == pytest.approx(np.ones(4), abs=1e-12)

    def test_seed_changes_rows(self):
        c = corpus_of(["some tokens here"])
        a = hashed_embeddings(c, d=16, seed=1).values
        b = hashed_embeddings(c, d=16, seed=2).values
        assert not np.array_equal(a, b)

    def test_deterministic(self):
        c = corpus_of(["alpha beta", "gamma"])
        assert np.array_equal(
            hashed_embeddings(c, d=8, seed=5).values, hashed_embeddings(c, d=8, seed=5).values
        )


class TestAssemble:
    def test_no_extra_nodes(self):
        m = DocEmbeddingMatrix(ids=("a",), values=np.array([[1.0, 2.0]]))
        out = assemble_initial_features(m, 0, 0)
        assert np.array_equal(out, m.values)

    def test_zero_block(self):
        m = DocEmbeddingMatrix(ids=("a", "b"), values=np.ones((2, 3)))
        out = assemble_initial_features(m, 4, 2)
        assert out.shape == (8, 3)
        assert np.all(out[2:] == 0.0)
        assert np.array_equal(out[0], m.values[0])

    def test_hashed_token_features_unit_rows(self):
        feats = hashed_token_features(["alpha", "beta"], d=8, seed=0)
        assert np.linalg.norm(feats, axis=1) == pytest.approx(np.ones(2))
