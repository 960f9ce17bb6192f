"""Lexical relation classification from dependency paths and distributional vectors."""

from .conllu import Sentence, Token, read_conllu
from .datasets import Dataset, LabeledPair, generate_switched_pairs, load_benchmark, make_splits
from .embeddings import EmbeddingTable, lookup, read_embeddings
from .evaluation import evaluate_labels, memorization_baseline, paired_ttest, weighted_prf
from .models import Hyper, MarginClassifier, RelationModel, load_model, predict_batch, save_model, train
from .paths import DependencyPath, PathIndex, extract_pair_paths, read_index, tree_path, write_index

__version__ = "0.1.0"

__all__ = [
    "Dataset", "DependencyPath", "EmbeddingTable", "Hyper", "LabeledPair", "MarginClassifier",
    "PathIndex", "RelationModel", "Sentence", "Token", "evaluate_labels", "extract_pair_paths",
    "generate_switched_pairs", "load_benchmark", "load_model", "lookup", "make_splits",
    "memorization_baseline", "paired_ttest", "predict_batch", "read_conllu", "read_embeddings",
    "read_index", "save_model", "train", "tree_path", "weighted_prf", "write_index",
]
