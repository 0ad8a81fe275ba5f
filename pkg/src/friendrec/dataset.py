"""Social edge-list ingestion, book annotation, encoding, and splitting.

The pipeline input is a two-column CSV of directed (user, friend) rows.
Each undirected pair of users is annotated with one of the catalog's book
labels by a seeded shuffle, labels are encoded to integer codes, and the
encoded rows are split 70/30 for training and testing.

All functions here are pure: annotation and splitting depend only on
(input, seed) and are bit-reproducible across runs and platforms.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .shuffling import seeded_shuffle

DEFAULT_SEED = 42
DEFAULT_SPLIT_RATIO = 0.7

_LABEL_RE = re.compile(r"^B(\d+)$")

TextSource = Union[str, Path, IO[str], IO[bytes]]


class EdgeListError(ValueError):
    """Malformed edge-list input (bad row, wrong arity, empty file...)."""


@dataclass(frozen=True)
class EdgeRecord:
    """One directed (user, friend) row, optionally carrying a book label."""

    user: int
    friend: int
    book: Optional[str] = None

    def __post_init__(self):
        if self.user < 0 or self.friend < 0:
            raise ValueError(f"user ids must be non-negative: ({self.user}, {self.friend})")
        if self.user == self.friend:
            raise ValueError(f"self-loop edge not accepted: user {self.user}")
        if self.book is not None and not _LABEL_RE.match(self.book):
            raise ValueError(f"book label {self.book!r} is not of the form B<digits>")

    @property
    def pair_key(self) -> Tuple[int, int]:
        """Canonical undirected key: the sorted (user, friend) pair."""
        return (self.user, self.friend) if self.user < self.friend else (self.friend, self.user)


class BookCatalog:
    """Ordered book labels plus their integer encoding.

    The code of a label is its integer suffix ("B7" -> 7), independent of
    catalog order, so codes stay stable if the catalog is reordered.
    """

    def __init__(self, labels: Sequence[str]):
        labels = list(labels)
        if not labels:
            raise ValueError("catalog must contain at least one book label")
        codes: Dict[str, int] = {}
        for label in labels:
            m = _LABEL_RE.match(label)
            if m is None:
                raise ValueError(f"book label {label!r} is not of the form B<digits>")
            code = int(m.group(1))
            if label in codes:
                raise ValueError(f"duplicate book label {label!r}")
            if code in codes.values():
                raise ValueError(f"labels {label!r} and another entry share code {code}")
            codes[label] = code
        self._labels: Tuple[str, ...] = tuple(labels)
        self._encoding = codes
        self._positions = {label: i for i, label in enumerate(labels)}

    @classmethod
    def default(cls) -> "BookCatalog":
        """The ten-book catalog B0..B9."""
        return cls([f"B{i}" for i in range(10)])

    @property
    def labels(self) -> Tuple[str, ...]:
        return self._labels

    @property
    def encoding(self) -> Mapping[str, int]:
        return dict(self._encoding)

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: object) -> bool:
        return label in self._encoding

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BookCatalog) and other._labels == self._labels

    def __repr__(self) -> str:
        return f"BookCatalog({list(self._labels)!r})"

    def code_of(self, label: str) -> int:
        try:
            return self._encoding[label]
        except KeyError:
            raise KeyError(f"unknown book label {label!r}") from None

    def label_of(self, code: int) -> str:
        for label, c in self._encoding.items():
            if c == code:
                return label
        raise KeyError(f"no book label with code {code}")

    def index_of(self, label: str) -> int:
        """Position of the label in catalog order (incidence-vector index)."""
        try:
            return self._positions[label]
        except KeyError:
            raise KeyError(f"unknown book label {label!r}") from None


@dataclass(frozen=True)
class LabeledDataset:
    """Encoded feature rows ([friend_code, book_code]) with user-id labels."""

    features: np.ndarray  # shape (n, 2), float64
    labels: np.ndarray  # shape (n,), int64

    def __post_init__(self):
        if self.features.ndim != 2 or len(self.features) != len(self.labels):
            raise ValueError("features and labels must be parallel 2-D / 1-D arrays")

    def __len__(self) -> int:
        return len(self.labels)

    def rows(self) -> List[Tuple[Tuple[float, ...], int]]:
        """Rows as hashable (feature tuple, label) pairs, for multiset checks."""
        return [
            (tuple(float(x) for x in feat), int(label))
            for feat, label in zip(self.features, self.labels)
        ]


@dataclass(frozen=True)
class SplitDataset:
    """Seeded train/test partition of a LabeledDataset."""

    train: LabeledDataset
    test: LabeledDataset
    ratio: float
    seed: int


@dataclass(frozen=True)
class UserProfile:
    """Per-user book incidence: entry i counts annotated out-edges whose
    book sits at catalog position i."""

    user: int
    incidence: Tuple[int, ...]

    def is_cold(self) -> bool:
        return not any(self.incidence)

    def books_read(self, catalog: BookCatalog) -> List[str]:
        return [catalog.labels[i] for i, n in enumerate(self.incidence) if n > 0]


def _open_text(source: TextSource):
    """Yield (line iterator, close flag) for a path, text stream, or byte stream."""
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    if hasattr(source, "read"):  # byte stream
        return io.TextIOWrapper(source, encoding="utf-8", newline=""), False
    raise TypeError(f"unsupported edge-list source: {type(source)!r}")


def _parse_int(field: str, line_no: int) -> int:
    try:
        return int(field.strip())
    except ValueError:
        raise EdgeListError(f"line {line_no}: field {field.strip()!r} is not an integer") from None


def _is_header(fields: Sequence[str]) -> bool:
    # Data rows always start with two integer ids; anything else up front is a header.
    try:
        int(fields[0].strip())
        int(fields[1].strip())
    except (ValueError, IndexError):
        return True
    return False


def _read_edge_rows(source: TextSource, arity: int) -> List[Tuple[int, List[str]]]:
    stream, should_close = _open_text(source)
    try:
        reader = csv.reader(stream)
        rows: List[Tuple[int, List[str]]] = []
        for line_no, fields in enumerate(reader, start=1):
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue  # blank line
            if line_no == 1 and _is_header(fields):
                continue
            if len(fields) != arity:
                raise EdgeListError(
                    f"line {line_no}: expected {arity} fields, got {len(fields)}"
                )
            rows.append((line_no, fields))
        if not rows:
            raise EdgeListError("edge list is empty")
        return rows
    finally:
        if should_close:
            stream.close()


def load_edges(source: TextSource) -> List[EdgeRecord]:
    """Parse a raw two-column edge list into EdgeRecords (books absent).

    Rows are returned in file order with no deduplication. An optional
    single header row is tolerated. Errors name the offending line.
    """
    edges = []
    for line_no, fields in _read_edge_rows(source, arity=2):
        user = _parse_int(fields[0], line_no)
        friend = _parse_int(fields[1], line_no)
        try:
            edges.append(EdgeRecord(user, friend))
        except ValueError as exc:
            raise EdgeListError(f"line {line_no}: {exc}") from None
    return edges


def load_annotated_edges(source: TextSource, catalog: BookCatalog) -> List[EdgeRecord]:
    """Parse a three-column user,friend,book CSV into annotated EdgeRecords."""
    edges = []
    for line_no, fields in _read_edge_rows(source, arity=3):
        user = _parse_int(fields[0], line_no)
        friend = _parse_int(fields[1], line_no)
        book = fields[2].strip()
        if book not in catalog:
            raise EdgeListError(f"line {line_no}: unknown book label {book!r}")
        try:
            edges.append(EdgeRecord(user, friend, book))
        except ValueError as exc:
            raise EdgeListError(f"line {line_no}: {exc}") from None
    return edges


def detect_columns(path: Union[str, Path]) -> int:
    """Column count (2 or 3) of the first data row of an edge-list CSV."""
    with open(path, "r", encoding="utf-8", newline="") as stream:
        reader = csv.reader(stream)
        for line_no, fields in enumerate(reader, start=1):
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue
            if line_no == 1 and _is_header(fields):
                continue
            return len(fields)
    raise EdgeListError("edge list is empty")


def assign_books(
    edges: Sequence[EdgeRecord], catalog: BookCatalog, seed: int
) -> List[EdgeRecord]:
    """Annotate every edge with a book by a seeded shuffle over pair keys.

    Both directed records of one undirected pair always receive the same
    book. Procedure (frozen, golden files depend on it): collect distinct
    canonical pair keys in first-appearance order, permute them with the
    seeded exchange shuffle, then give the pair at permuted position i the
    catalog label at index ``i % len(catalog)``.
    """
    if len(catalog) == 0:
        raise ValueError("cannot assign books from an empty catalog")
    keys: List[Tuple[int, int]] = []
    seen: Set[Tuple[int, int]] = set()
    for edge in edges:
        key = edge.pair_key
        if key not in seen:
            seen.add(key)
            keys.append(key)
    permuted = seeded_shuffle(keys, seed)
    book_of = {key: catalog.labels[i % len(catalog)] for i, key in enumerate(permuted)}
    return [replace(edge, book=book_of[edge.pair_key]) for edge in edges]


def encode_books(edges: Sequence[EdgeRecord], catalog: BookCatalog) -> LabeledDataset:
    """Encode annotated edges as ([friend, book_code], label=user) rows.

    The friend id enters the feature vector as-is; the book label goes in
    through the catalog's suffix encoding; the user id becomes the class
    label. This is the two-coordinate representation the distance metric
    consumes.
    """
    n = len(edges)
    features = np.empty((n, 2), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    for i, edge in enumerate(edges):
        if edge.book is None:
            raise ValueError(f"edge ({edge.user}, {edge.friend}) is not annotated with a book")
        if edge.book not in catalog:
            raise KeyError(f"unknown book label {edge.book!r}")
        features[i, 0] = edge.friend
        features[i, 1] = catalog.code_of(edge.book)
        labels[i] = edge.user
    return LabeledDataset(features=features, labels=labels)


def split(rows: LabeledDataset, ratio: float, seed: int) -> SplitDataset:
    """Seeded partition: permute rows, first floor(ratio*n) train, rest test."""
    if not (0.0 < ratio < 1.0):
        raise ValueError(f"split ratio must lie strictly between 0 and 1, got {ratio}")
    n = len(rows)
    if n < 2:
        raise ValueError(f"need at least 2 rows to split, got {n}")
    order = seeded_shuffle(range(n), seed)
    n_train = math.floor(ratio * n)
    train_idx = np.asarray(order[:n_train], dtype=np.intp)
    test_idx = np.asarray(order[n_train:], dtype=np.intp)
    train = LabeledDataset(rows.features[train_idx], rows.labels[train_idx])
    test = LabeledDataset(rows.features[test_idx], rows.labels[test_idx])
    return SplitDataset(train=train, test=test, ratio=ratio, seed=seed)


def build_profiles(
    edges: Sequence[EdgeRecord], catalog: BookCatalog
) -> Dict[int, UserProfile]:
    """One incidence profile per distinct id in the user field."""
    counts: Dict[int, List[int]] = {}
    width = len(catalog)
    for edge in edges:
        if edge.book is None:
            raise ValueError(f"edge ({edge.user}, {edge.friend}) is not annotated with a book")
        vec = counts.get(edge.user)
        if vec is None:
            vec = [0] * width
            counts[edge.user] = vec
        vec[catalog.index_of(edge.book)] += 1
    return {user: UserProfile(user, tuple(vec)) for user, vec in counts.items()}


def build_adjacency(edges: Sequence[EdgeRecord]) -> Dict[int, Set[int]]:
    """Symmetrized friendship map: u knows v if either direction appears."""
    adjacency: Dict[int, Set[int]] = {}
    for edge in edges:
        adjacency.setdefault(edge.user, set()).add(edge.friend)
        adjacency.setdefault(edge.friend, set()).add(edge.user)
    return adjacency


def write_annotated_csv(edges: Sequence[EdgeRecord], path: Union[str, Path]) -> None:
    """Write annotated edges as user,friend,book CSV (header included, LF)."""
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        stream.write("user,friend,book\n")
        for edge in edges:
            if edge.book is None:
                raise ValueError(f"edge ({edge.user}, {edge.friend}) is not annotated with a book")
            stream.write(f"{edge.user},{edge.friend},{edge.book}\n")


def write_raw_csv(edges: Sequence[EdgeRecord], path: Union[str, Path]) -> None:
    """Write raw edges as user,friend CSV (header included, LF)."""
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        stream.write("user,friend\n")
        for edge in edges:
            stream.write(f"{edge.user},{edge.friend}\n")


def profiles_to_json(profiles: Mapping[int, UserProfile]) -> str:
    """Profiles as a JSON object mapping user id to its incidence array."""
    payload = {str(user): list(profile.incidence) for user, profile in sorted(profiles.items())}
    return json.dumps(payload, indent=2)


def load_catalog_file(path: Union[str, Path]) -> BookCatalog:
    """Read a catalog from a text file: one label per line, '#' comments."""
    labels: List[str] = []
    with open(path, "r", encoding="utf-8") as stream:
        for raw in stream:
            line = raw.strip()
            if line and not line.startswith("#"):
                labels.append(line)
    return BookCatalog(labels)
