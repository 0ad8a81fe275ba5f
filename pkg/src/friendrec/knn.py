"""Exact K-nearest-neighbors: Euclidean metric, brute-force search, voting.

The classifier keeps the full training matrix and defers all work to query
time. Neighbor search is an exact linear scan over fixed-size chunks of the
training matrix, so per-query extra memory stays bounded by the selection
size plus one chunk regardless of how many training rows there are. No
feature scaling is applied: codes enter the metric raw.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Hashable, List, Sequence, Union

import numpy as np

DEFAULT_K = 2
METRIC_EUCLIDEAN = "euclidean"
MODEL_FORMAT_VERSION = 1

_CHUNK = 2048  # rows scanned per block; bounds temporary memory, not results

ArrayLike = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True)
class Neighbor:
    """One retrieved training row: its index, true distance, and label."""

    index: int
    distance: float
    label: Any


def _as_vector(values: ArrayLike, name: str = "vector") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-D sequence of numbers")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return arr


def euclidean(a: ArrayLike, b: ArrayLike) -> float:
    """Euclidean distance sqrt(sum_i (a_i - b_i)^2) between two vectors."""
    va = _as_vector(a, "a")
    vb = _as_vector(b, "b")
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.size} vs {vb.size}")
    diff = va - vb
    # einsum keeps the summation order identical to the matrix path in nearest()
    return math.sqrt(float(np.einsum("i,i->", diff, diff)))


def sqrt_k_heuristic(n: int) -> int:
    """Starting K for sweeps: max(1, floor(sqrt(n)))."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return max(1, math.isqrt(n))


class KnnModel:
    """Immutable retained-training-set classifier.

    ``points`` is an (n, d) float matrix, ``labels`` a parallel sequence of
    class labels, ``k`` the vote size; the only supported metric is
    euclidean (the metric id exists for format evolution).
    """

    def __init__(
        self,
        points: ArrayLike,
        labels: Sequence[Hashable],
        k: int = DEFAULT_K,
        metric: str = METRIC_EUCLIDEAN,
    ):
        pts = np.array(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("points must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain NaN or infinite entries")
        labels = [x.item() if isinstance(x, np.generic) else x for x in labels]
        if len(labels) != pts.shape[0]:
            raise ValueError(
                f"got {pts.shape[0]} points but {len(labels)} labels"
            )
        if not 1 <= k <= pts.shape[0]:
            raise ValueError(f"k must satisfy 1 <= k <= {pts.shape[0]}, got {k}")
        if metric != METRIC_EUCLIDEAN:
            raise ValueError(f"unsupported metric {metric!r}")
        pts.setflags(write=False)
        self._points = pts
        self._labels = labels
        self.k = k
        self.metric = metric

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def labels(self) -> List[Any]:
        return list(self._labels)

    @property
    def dim(self) -> int:
        return int(self._points.shape[1])

    def __len__(self) -> int:
        return int(self._points.shape[0])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, KnnModel)
            and other.k == self.k
            and other.metric == self.metric
            and other._labels == self._labels
            and other._points.shape == self._points.shape
            and bool(np.all(other._points == self._points))
        )


def nearest(model: KnnModel, query: ArrayLike, k: int) -> List[Neighbor]:
    """The k training rows closest to ``query``, ascending by (distance, index).

    Index order breaks exact distance ties, which makes the result fully
    deterministic. One pass over the training matrix in fixed-size chunks;
    the running selection never holds more than k + chunk candidates.
    """
    q = _as_vector(query, "query")
    n = len(model)
    if q.size != model.dim:
        raise ValueError(f"query has dimension {q.size}, model expects {model.dim}")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} training rows")

    best_d2 = np.empty(0, dtype=np.float64)
    best_idx = np.empty(0, dtype=np.int64)
    pts = model.points
    for start in range(0, n, _CHUNK):
        block = pts[start : start + _CHUNK]
        diff = block - q
        d2 = np.einsum("ij,ij->i", diff, diff)
        idx = np.arange(start, start + len(block), dtype=np.int64)
        pool_d2 = np.concatenate([best_d2, d2])
        pool_idx = np.concatenate([best_idx, idx])
        if len(pool_d2) > k:
            order = np.lexsort((pool_idx, pool_d2))[:k]
        else:
            order = np.lexsort((pool_idx, pool_d2))
        best_d2 = pool_d2[order]
        best_idx = pool_idx[order]

    labels = model._labels
    return [
        Neighbor(index=int(i), distance=math.sqrt(float(d2)), label=labels[int(i)])
        for i, d2 in zip(best_idx, best_d2)
    ]


def vote(neighbors: Sequence[Neighbor]) -> Any:
    """Majority label; ties by smaller summed distance, then smaller label."""
    if not neighbors:
        raise ValueError("cannot vote over zero neighbors")
    counts: dict = {}
    sums: dict = {}
    for nb in neighbors:
        counts[nb.label] = counts.get(nb.label, 0) + 1
        sums[nb.label] = sums.get(nb.label, 0.0) + nb.distance
    return min(counts, key=lambda label: (-counts[label], sums[label], label))


def classify(model: KnnModel, query: ArrayLike) -> Any:
    """Label of ``query`` by majority vote among the model.k nearest rows."""
    return vote(nearest(model, query, model.k))


def save_model(model: KnnModel, path: Union[str, Path]) -> None:
    """Persist a model as versioned JSON, atomically (temp file + rename).

    Floats serialize through Python's shortest round-trip repr, so values
    reload bit-exactly.
    """
    document = {
        "version": MODEL_FORMAT_VERSION,
        "metric": model.metric,
        "k": model.k,
        "dim": model.dim,
        "points": [[float(x) for x in row] for row in model.points],
        "labels": model.labels,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as stream:
            json.dump(document, stream, allow_nan=False)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_model(path: Union[str, Path]) -> KnnModel:
    """Load a model persisted by save_model, validating the document."""
    with open(path, "r", encoding="utf-8") as stream:
        document = json.load(stream)
    version = document.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    points = np.asarray(document["points"], dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != document["dim"]:
        raise ValueError("model file dim field disagrees with its points")
    return KnnModel(
        points=points,
        labels=document["labels"],
        k=document["k"],
        metric=document["metric"],
    )
