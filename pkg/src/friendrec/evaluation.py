"""Train/test evaluation harness: accuracy metric, per-K runs, K sweeps.

Accuracy is the fraction of test rows whose predicted label matches the
true label, expressed in percent; error rate is its complement. A sweep
evaluates every K in a range and selects the K with minimum error rate
(smallest K on ties).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .dataset import SplitDataset
from .knn import KnnModel, nearest, sqrt_k_heuristic, vote

DEFAULT_K_MIN = 2
DEFAULT_K_MAX_CAP = 15
REPORT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class KEntry:
    """Outcome of evaluating one K over the test set."""

    k: int
    correct: int
    total: int
    accuracy: float
    error_rate: float


@dataclass(frozen=True)
class EvaluationReport:
    """Per-K accuracies plus the selected minimum-error K."""

    entries: Tuple[KEntry, ...]
    chosen_k: int
    seed: int
    split_ratio: float

    def to_dict(self) -> dict:
        return {
            "version": REPORT_FORMAT_VERSION,
            "seed": self.seed,
            "split_ratio": self.split_ratio,
            "chosen_k": self.chosen_k,
            "entries": [
                {
                    "k": e.k,
                    "correct": e.correct,
                    "total": e.total,
                    "accuracy": e.accuracy,
                    "error_rate": e.error_rate,
                }
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, document: dict) -> "EvaluationReport":
        entries = tuple(
            KEntry(
                k=item["k"],
                correct=item["correct"],
                total=item["total"],
                accuracy=item["accuracy"],
                error_rate=item["error_rate"],
            )
            for item in document["entries"]
        )
        return cls(
            entries=entries,
            chosen_k=document["chosen_k"],
            seed=document["seed"],
            split_ratio=document["split_ratio"],
        )

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        return cls.from_dict(json.loads(text))

    def as_table(self) -> str:
        """Aligned two-column text table of (K, accuracy) for human diffing."""
        header = f"{'K VALUE':<10}{'ACCURACY OBTAINED'}"
        lines = [header]
        for e in self.entries:
            lines.append(f"{e.k:<10}{e.accuracy:.3f}%")
        return "\n".join(lines)


def accuracy(predictions: Sequence, truth: Sequence) -> float:
    """Percentage of positions where prediction equals truth."""
    if len(predictions) != len(truth):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions vs {len(truth)} truths"
        )
    if len(truth) == 0:
        raise ValueError("cannot score an empty prediction set")
    count = sum(1 for p, t in zip(predictions, truth) if p == t)
    return count * 100.0 / len(truth)


def _count_correct(split: SplitDataset, ks: Sequence[int]) -> List[int]:
    """Correct-prediction counts for every k in ks, sharing one neighbor scan.

    Nearest neighbors are ordered by (distance, index), so the first k of a
    max(ks)-sized retrieval are exactly the k-sized retrieval; votes over
    prefixes reproduce per-k classification bit-for-bit.
    """
    k_max = max(ks)
    model = KnnModel(split.train.features, split.train.labels, k=k_max)
    correct = [0] * len(ks)
    test_labels = split.test.labels
    for row, true_label in zip(split.test.features, test_labels):
        neighbors = nearest(model, row, k_max)
        for slot, k in enumerate(ks):
            if vote(neighbors[:k]) == int(true_label):
                correct[slot] += 1
    return correct


def evaluate_k(split: SplitDataset, k: int) -> Tuple[int, int, float]:
    """Train on split.train, classify split.test, return (correct, total, accuracy)."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k > len(split.train):
        raise ValueError(f"k={k} exceeds the {len(split.train)} training rows")
    total = len(split.test)
    if total == 0:
        raise ValueError("test partition is empty")
    correct = _count_correct(split, [k])[0]
    return correct, total, correct * 100.0 / total


def sweep(split: SplitDataset, k_min: int, k_max: int) -> EvaluationReport:
    """Evaluate every k in [k_min, k_max]; choose minimum error, smallest k."""
    if not 1 <= k_min <= k_max:
        raise ValueError(f"need 1 <= k_min <= k_max, got k_min={k_min}, k_max={k_max}")
    if k_max > len(split.train):
        raise ValueError(f"k_max={k_max} exceeds the {len(split.train)} training rows")
    total = len(split.test)
    if total == 0:
        raise ValueError("test partition is empty")
    ks = list(range(k_min, k_max + 1))
    entries = []
    for k, correct in zip(ks, _count_correct(split, ks)):
        acc = correct * 100.0 / total
        entries.append(
            KEntry(k=k, correct=correct, total=total, accuracy=acc, error_rate=100.0 - acc)
        )
    chosen = min(entries, key=lambda e: (e.error_rate, e.k))
    return EvaluationReport(
        entries=tuple(entries),
        chosen_k=chosen.k,
        seed=split.seed,
        split_ratio=split.ratio,
    )


def default_k_range(train_size: int) -> Tuple[int, int]:
    """Default sweep range 2..min(15, floor(sqrt(train_size)))."""
    upper = min(DEFAULT_K_MAX_CAP, sqrt_k_heuristic(train_size))
    return DEFAULT_K_MIN, max(DEFAULT_K_MIN, upper)
