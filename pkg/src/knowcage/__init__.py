"""Knowledge-augmented heterogeneous text-graph classification.

Builds a document/word/concept graph from a labeled corpus and a concept
lexicon, encodes it with interchangeable graph encoders plus concept-aware
attention over contextualized document embeddings, and trains a two-branch
interpolated classifier with a class-weighted loss.
"""

from .corpus import Corpus, Document, load_corpus, preprocess, stratified_kfold, tokenize
from .embeddings import (
    DocEmbeddingMatrix,
    assemble_initial_features,
    hashed_embeddings,
    load_embeddings,
    write_embeddings,
)
from .classifier import PredictionProbs
from .graph import HeteroTextGraph, NodeKind, build_graph, normalize_adjacency
from .lexicon import ConceptEntry, ConceptLexicon, concept_tokens, load_lexicon
from .model import KnowCageModel, ModelConfig
from .training import (
    MetricsReport,
    TrainConfig,
    cross_validate,
    lambda_sweep,
    precision_recall_f1,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ConceptEntry",
    "ConceptLexicon",
    "Corpus",
    "DocEmbeddingMatrix",
    "Document",
    "HeteroTextGraph",
    "KnowCageModel",
    "MetricsReport",
    "ModelConfig",
    "NodeKind",
    "PredictionProbs",
    "TrainConfig",
    "assemble_initial_features",
    "build_graph",
    "concept_tokens",
    "cross_validate",
    "hashed_embeddings",
    "lambda_sweep",
    "load_corpus",
    "load_embeddings",
    "load_lexicon",
    "normalize_adjacency",
    "precision_recall_f1",
    "preprocess",
    "stratified_kfold",
    "tokenize",
    "train",
    "write_embeddings",
    "__version__",
]
