"""Command-line interface.

Subcommands: build-graph, train, evaluate, cross-validate, sweep-lambda,
gradcheck, export-graph. Options come from an optional JSON config file
with CLI flags overriding individual keys 1:1. One seed drives all
randomness; reruns with the same config produce byte-identical outputs.

Exit codes: 0 success, 2 configuration error, 3 data validation error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .corpus import load_corpus
from .embeddings import load_embeddings
from .errors import ConfigError, DataValidationError, NumericError
from .fixtures import gradcheck_all
from .graph import build_graph, export_edge_list, graph_stats
from .lexicon import EMPTY_LEXICON, load_lexicon
from .model import ModelConfig
from .training import (
    DEFAULT_LAMBDA_SWEEP,
    TrainConfig,
    build_pipeline_inputs,
    cross_validate,
    evaluate_probs,
    lambda_sweep,
    train,
    train_eval_split,
)
from .corpus import tokenize_corpus

log = logging.getLogger("knowcage")

GRADCHECK_TOLERANCE = 1e-4

# JSON config keys that map onto TrainConfig / ModelConfig fields
_TRAIN_KEYS = (
    "lr_graph",
    "lr_classifier",
    "lr_text_encoder",  # accepted and recorded; has no effect on training
    "epochs",
    "gamma",
    "milestone",
    "seed",
    "early_stop_patience",
    "window_size",
    "min_word_freq",
    "tweet_mode",
    "embedding_dim",
    "init_wc",
)
_MODEL_KEYS = (
    "encoder",
    "attention",
    "hidden_dim",
    "n_layers",
    "activation",
    "attention_dim",
    "attention_scope",
    "attention_blocks",
    "gat_heads",
    "gat_slope",
    "structured_hops",
    "structured_da",
    "sortpool_k",
    "inverse_class_weights",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="knowcage")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--corpus", type=Path, help="corpus JSONL/TSV path")
        p.add_argument("--format", choices=("jsonl", "tsv"), help="corpus file format")
        p.add_argument("--lexicon", type=Path, help="concept lexicon TSV path")
        p.add_argument("--embeddings", type=Path, help="KCEM/TSV document embeddings")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--encoder", choices=("gcn", "gat", "dgcnn"))
        p.add_argument("--attention", choices=("concept", "dot", "structured"))
        p.add_argument("--lambda", dest="lambda_", type=float, help="interpolation weight in [0,1)")
        p.add_argument("--window-size", dest="window_size", type=int)
        p.add_argument("--scope", dest="attention_scope", choices=("all_nodes", "eq4_literal"))
        p.add_argument("--init-wc", dest="init_wc", choices=("zeros", "hashed"))
        p.add_argument("--epochs", type=int)
        p.add_argument("--hidden-dim", dest="hidden_dim", type=int)
        p.add_argument("--tweet-mode", dest="tweet_mode", action="store_true", default=None)
        return p

    add_common(sub.add_parser("build-graph", help="build the graph; write edge list and stats"))
    add_common(sub.add_parser("export-graph", help="build the graph; write the edge list only"))
    add_common(sub.add_parser("train", help="train on all documents; write loss history"))
    p = add_common(sub.add_parser("evaluate", help="train on a fixed split; report test metrics"))
    p.add_argument("--split", type=Path, help="JSON file with train_ids/test_ids")
    p = add_common(sub.add_parser("cross-validate", help="stratified k-fold evaluation"))
    p.add_argument("--k", type=int, default=10)
    p = add_common(sub.add_parser("sweep-lambda", help="train/eval once per lambda value"))
    p.add_argument("--values", type=float, nargs="+", help="lambda values to sweep")
    p.add_argument("--split", type=Path, help="JSON file with train_ids/test_ids")
    p = sub.add_parser("gradcheck", help="finite-difference check on the shipped fixture")
    p.add_argument("--encoder", choices=("gcn", "gat", "dgcnn"))
    p.add_argument("--attention", choices=("concept", "dot", "structured"))
    return parser


def _load_config(args) -> tuple[TrainConfig, dict]:
    """Merge JSON config (if any) with CLI overrides; returns (config, file keys)."""
    raw: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{args.config}: config must be a JSON object")
    merged = dict(raw)
    for key in _TRAIN_KEYS + _MODEL_KEYS + ("lambda",):
        flag = "lambda_" if key == "lambda" else key
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value

    model_kwargs = {k: merged[k] for k in _MODEL_KEYS if k in merged}
    if "lambda" in merged:
        model_kwargs["lambda_"] = merged["lambda"]
    train_kwargs = {k: merged[k] for k in _TRAIN_KEYS if k in merged}
    known = set(_TRAIN_KEYS) | set(_MODEL_KEYS) | {
        "lambda",
        "corpus",
        "format",
        "lexicon",
        "embeddings",
        "out",
        "k",
        "split",
        "values",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        config = TrainConfig(model=ModelConfig(**model_kwargs), **train_kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    config.validate()
    return config, raw


def _path_opt(args, raw: dict, key: str) -> Path | None:
    value = getattr(args, key, None)
    if value is not None:
        return Path(value)
    if raw.get(key):
        return Path(raw[key])
    return None


def _load_inputs(args, raw, config):
    corpus_path = _path_opt(args, raw, "corpus")
    if corpus_path is None:
        raise ConfigError("a corpus path is required (--corpus or config key)")
    fmt = getattr(args, "format", None) or raw.get("format") or "jsonl"
    corpus = load_corpus(corpus_path, fmt)
    lexicon_path = _path_opt(args, raw, "lexicon")
    if lexicon_path is None:
        log.info("no lexicon given: building without concept nodes")
        lexicon = EMPTY_LEXICON
    else:
        lexicon = load_lexicon(lexicon_path)
    emb_path = _path_opt(args, raw, "embeddings")
    embeddings = load_embeddings(emb_path, corpus) if emb_path else None
    return corpus, lexicon, embeddings


def _out_dir(args, raw) -> Path:
    out = _path_opt(args, raw, "out") or Path("knowcage-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_metrics(path: Path, rows: list[tuple[str, object]]) -> None:
    """rows of (name, MetricsReport); TSV with fixed float formatting."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("name\tprecision\trecall\tf1\n")
        for name, r in rows:
            fh.write(f"{name}\t{r.precision:.6f}\t{r.recall:.6f}\t{r.f1:.6f}\n")


def _print_metrics(rows) -> None:
    print(f"{'name':<12} {'P':>8} {'R':>8} {'F1':>8}")
    for name, r in rows:
        print(f"{name:<12} {r.precision:8.4f} {r.recall:8.4f} {r.f1:8.4f}")


def _write_loss_history(path: Path, history) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,loss,lr\n")
        for epoch, loss, lr in history:
            fh.write(f"{epoch},{loss:.17g},{lr:.17g}\n")


def _load_split(path: Path) -> tuple[list[str], list[str]]:
    with open(path, encoding="utf-8") as fh:
        blob = json.load(fh)
    if not {"train_ids", "test_ids"} <= blob.keys():
        raise DataValidationError(f"{path}: split file needs train_ids and test_ids")
    return list(blob["train_ids"]), list(blob["test_ids"])


def cmd_build_graph(args, write_stats: bool = True) -> int:
    config, raw = _load_config(args)
    corpus, lexicon, _ = _load_inputs(args, raw, config)
    out = _out_dir(args, raw)
    tokenized = tokenize_corpus(corpus, config.tweet_mode)
    graph = build_graph(tokenized, lexicon, config.window_size, config.min_word_freq)
    export_edge_list(graph, out / "edges.tsv")
    stats = graph_stats(graph)
    if graph.n_c == 0:
        log.info("graph has no concept nodes (empty or missing lexicon)")
    if write_stats:
        with open(out / "stats.json", "w", encoding="utf-8") as fh:
            json.dump(stats, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(json.dumps(stats, sort_keys=True))
    return 0


def cmd_train(args) -> int:
    config, raw = _load_config(args)
    corpus, lexicon, embeddings = _load_inputs(args, raw, config)
    out = _out_dir(args, raw)
    graph, h0, h_doc = build_pipeline_inputs(corpus, lexicon, config, embeddings)
    result = train(graph, h0, h_doc, corpus.labels, config)
    _write_loss_history(out / "loss_history.csv", result.loss_history)
    report = evaluate_probs(result.probs, corpus.labels, np.arange(corpus.n_docs))
    rows = [("train", report)]
    _write_metrics(out / "metrics.tsv", rows)
    _print_metrics(rows)
    return 0


def cmd_evaluate(args) -> int:
    config, raw = _load_config(args)
    corpus, lexicon, embeddings = _load_inputs(args, raw, config)
    split_path = _path_opt(args, raw, "split")
    if split_path is None:
        raise ConfigError("evaluate needs --split (JSON with train_ids/test_ids)")
    train_ids, test_ids = _load_split(split_path)
    out = _out_dir(args, raw)
    report, result = train_eval_split(corpus, lexicon, config, train_ids, test_ids, embeddings)
    _write_loss_history(out / "loss_history.csv", result.loss_history)
    rows = [("test", report)]
    _write_metrics(out / "metrics.tsv", rows)
    _print_metrics(rows)
    return 0


def cmd_cross_validate(args) -> int:
    config, raw = _load_config(args)
    corpus, lexicon, embeddings = _load_inputs(args, raw, config)
    k = args.k if args.k is not None else int(raw.get("k", 10))
    out = _out_dir(args, raw)
    reports, mean = cross_validate(corpus, lexicon, k, config, embeddings)
    rows = [(f"fold{i}", r) for i, r in enumerate(reports)] + [("mean", mean)]
    _write_metrics(out / "metrics.tsv", rows)
    _print_metrics(rows)
    return 0


def cmd_sweep_lambda(args) -> int:
    config, raw = _load_config(args)
    corpus, lexicon, embeddings = _load_inputs(args, raw, config)
    values = args.values or raw.get("values") or list(DEFAULT_LAMBDA_SWEEP)
    split_path = _path_opt(args, raw, "split")
    train_ids = test_ids = None
    if split_path is not None:
        train_ids, test_ids = _load_split(split_path)
    out = _out_dir(args, raw)
    table = lambda_sweep(corpus, lexicon, config, values, train_ids, test_ids, embeddings)
    with open(out / "sweep.tsv", "w", encoding="utf-8") as fh:
        fh.write("lambda\tprecision\trecall\tf1\n")
        for lam, r in table:
            fh.write(f"{lam:g}\t{r.precision:.6f}\t{r.recall:.6f}\t{r.f1:.6f}\n")
    _print_metrics([(f"lambda={lam:g}", r) for lam, r in table])
    return 0


def cmd_gradcheck(args) -> int:
    encoders = [args.encoder] if args.encoder else None
    attentions = [args.attention] if args.attention else None
    worst = 0.0
    for (enc_name, att_name), err in gradcheck_all().items():
        if encoders and enc_name not in encoders:
            continue
        if attentions and att_name not in attentions:
            continue
        status = "ok" if err < GRADCHECK_TOLERANCE else "FAIL"
        print(f"{enc_name:>6} + {att_name:<10} max relative error {err:.3e}  {status}")
        worst = max(worst, err)
    print(f"max relative error {worst:.3e} (tolerance {GRADCHECK_TOLERANCE:g})")
    if worst >= GRADCHECK_TOLERANCE:
        print("gradcheck FAILED")
        return 4
    print("gradcheck PASSED")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    log.debug("kernels backend: %s", kernels.BACKEND)
    handlers = {
        "build-graph": cmd_build_graph,
        "export-graph": lambda a: cmd_build_graph(a, write_stats=False),
        "train": cmd_train,
        "evaluate": cmd_evaluate,
        "cross-validate": cmd_cross_validate,
        "sweep-lambda": cmd_sweep_lambda,
        "gradcheck": cmd_gradcheck,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataValidationError as exc:
        print(f"data validation error: {exc}", file=sys.stderr)
        return 3
    except (NumericError, FileNotFoundError) as exc:
        if isinstance(exc, FileNotFoundError):
            print(f"data validation error: {exc}", file=sys.stderr)
            return 3
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
