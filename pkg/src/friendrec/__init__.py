"""Friend recommendation engine built on book-annotated social edges.

Pipeline: edge-list ingestion -> seeded book annotation -> label encoding
-> 70/30 split -> exact Euclidean KNN classification and K sweeps ->
profile-similarity friend ranking. Exposed as a library, a CLI
(``friendrec``), and an HTTP JSON service.
"""

from .dataset import (
    BookCatalog,
    EdgeListError,
    EdgeRecord,
    LabeledDataset,
    SplitDataset,
    UserProfile,
    assign_books,
    build_adjacency,
    build_profiles,
    encode_books,
    load_annotated_edges,
    load_edges,
    split,
)
from .evaluation import EvaluationReport, KEntry, accuracy, evaluate_k, sweep
from .knn import KnnModel, Neighbor, classify, euclidean, nearest, sqrt_k_heuristic
from .recommender import Recommendation, UnknownUserError, cold_start_check, recommend

__version__ = "0.1.0"

__all__ = [
    "BookCatalog",
    "EdgeListError",
    "EdgeRecord",
    "EvaluationReport",
    "KEntry",
    "KnnModel",
    "LabeledDataset",
    "Neighbor",
    "Recommendation",
    "SplitDataset",
    "UnknownUserError",
    "UserProfile",
    "accuracy",
    "assign_books",
    "build_adjacency",
    "build_profiles",
    "classify",
    "cold_start_check",
    "encode_books",
    "euclidean",
    "evaluate_k",
    "load_annotated_edges",
    "load_edges",
    "nearest",
    "recommend",
    "split",
    "sqrt_k_heuristic",
    "sweep",
]
