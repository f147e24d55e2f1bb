import json

import pytest
from hypothesis import given, strategies as st

from knowcage.corpus import (
    Corpus,
    Document,
    load_corpus,
    preprocess,
    stratified_kfold,
    tokenize,
)
from knowcage.errors import ConfigError, DataValidationError, ParseError
from knowcage.stopwords import STOP_WORDS


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def test_stopword_list_size():
    assert len(STOP_WORDS) == 179


class TestLoadCorpus:
    def test_balanced_counts(self, tmp_path):
        # shaped like the balanced 2,418-document set: equal class counts
        path = tmp_path / "c.jsonl"
        write_jsonl(
            path,
            [{"id": f"t{i}", "text": "x", "label": i % 2} for i in range(2418)],
        )
        corpus = load_corpus(path)
        assert corpus.n_docs == 2418
        assert corpus.class_counts == (1209, 1209)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("")
        corpus = load_corpus(path)
        assert corpus.n_docs == 0
        assert corpus.class_counts == (0, 0)

    def test_hand_counts(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(
            path,
            [
                {"id": "a", "text": "one", "label": 1},
                {"id": "b", "text": "two", "label": 0},
                {"id": "c", "text": "three", "label": 1},
            ],
        )
        assert load_corpus(path).class_counts == (1, 2)

    def test_malformed_names_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": "a", "text": "x", "label": 1}\nnot json\n')
        with pytest.raises(ParseError, match=":2"):
            load_corpus(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(
            path,
            [
                {"id": "a", "text": "x", "label": 1},
                {"id": "a", "text": "y", "label": 0},
            ],
        )
        with pytest.raises(DataValidationError, match="duplicate"):
            load_corpus(path)

    def test_bad_label(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": "a", "text": "x", "label": 2}])
        with pytest.raises(ParseError, match="label"):
            load_corpus(path)

    def test_tsv(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("a\thello world\t1\nb\tbye\t0\n")
        corpus = load_corpus(path, format="tsv")
        assert corpus.ids == ["a", "b"]
        assert corpus.class_counts == (1, 1)

    def test_tsv_wrong_columns(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("a\thello\tworld\t1\n")
        with pytest.raises(ParseError, match="3 tab-separated"):
            load_corpus(path, format="tsv")

    def test_order_preserved(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [{"id": f"x{i}", "text": "t", "label": 0} for i in range(5)])
        assert load_corpus(path).ids == [f"x{i}" for i in range(5)]


class TestPreprocess:
    def test_sentence(self):
        assert preprocess("I took 2 pills of Lipitor.") == "took pills lipitor"

    def test_empty(self):
        assert preprocess("") == ""

    def test_tweet_mode(self):
        assert preprocess("RT @bob check https://x.co #insomnia!!", tweet_mode=True) == "check insomnia"

    def test_numbers_and_punct_removed(self):
        assert preprocess("dose: 40mg, 3 times!") == "dose 40mg times"

    def test_unicode_nfkc(self):
        # full-width characters normalize to ascii before filtering
        assert preprocess("ｐｉｌｌｓ ２") == "pills"

    def test_idempotent_examples(self):
        for text in ["I took 2 pills", "don't worry be happy", "RT @x yes", ""]:
            once = preprocess(text)
            assert preprocess(once) == once

    @given(st.text(max_size=80))
    def test_idempotent_property(self, text):
        once = preprocess(text)
        assert preprocess(once) == once

    @given(st.text(max_size=80))
    def test_no_stopword_or_numeric_tokens(self, text):
        for tok in tokenize(preprocess(text)):
            assert tok not in STOP_WORDS
            assert not tok.isdigit()


class TestTokenize:
    def test_simple(self):
        assert tokenize("took pills lipitor") == ["took", "pills", "lipitor"]

    def test_empty(self):
        assert tokenize("") == []

    def test_double_space(self):
        assert tokenize("a  b") == ["a", "b"]


def _corpus(n_pos, n_neg):
    docs = [Document(f"p{i}", "x", 1) for i in range(n_pos)]
    docs += [Document(f"n{i}", "x", 0) for i in range(n_neg)]
    return Corpus(tuple(docs))


class TestStratifiedKfold:
    def test_perfect_stratification(self):
        folds = stratified_kfold(_corpus(5, 5), k=5, seed=0)
        for _, test_ids in folds:
            assert len(test_ids) == 2
            assert sum(1 for i in test_ids if i.startswith("p")) == 1

    def test_cadec_shaped_partition(self):
        folds = stratified_kfold(_corpus(2478, 4996), k=10, seed=3)
        sizes = sorted(len(test) for _, test in folds)
        assert set(sizes) <= {747, 748}
        assert sum(sizes) == 7474

    def test_deterministic(self):
        c = _corpus(7, 9)
        assert stratified_kfold(c, 4, seed=11) == stratified_kfold(c, 4, seed=11)

    def test_folds_partition_ids(self):
        c = _corpus(7, 9)
        folds = stratified_kfold(c, 4, seed=1)
        seen = []
        for train_ids, test_ids in folds:
            assert set(train_ids).isdisjoint(test_ids)
            assert sorted(train_ids + test_ids) == sorted(c.ids)
            seen.extend(test_ids)
        assert sorted(seen) == sorted(c.ids)

    def test_class_ratio_within_one(self):
        c = _corpus(13, 29)
        for _, test_ids in stratified_kfold(c, 5, seed=2):
            pos = sum(1 for i in test_ids if i.startswith("p"))
            assert pos in (2, 3)  # 13/5 rounded either way

    def test_small_class_rejected(self):
        with pytest.raises(ConfigError, match="class 1"):
            stratified_kfold(_corpus(2, 10), k=3, seed=0)

    def test_k_too_small(self):
        with pytest.raises(ConfigError):
            stratified_kfold(_corpus(5, 5), k=1, seed=0)
