"""HTTP JSON API owning the dataset, trained model, and profile snapshots.

Concurrency contract: single writer, many readers. Every mutation (book
toggle, user creation, training) runs under one write lock and installs a
fresh immutable snapshot with a bumped version; readers pin exactly one
snapshot per request, so a response never observes a half-applied change.
The version travels in the X-Snapshot-Version response header.

Persistence is flat files under the data directory: the annotated edge
list (written once at startup), the trained model, and the last
evaluation report, each written atomically (temp file + rename).
"""

from __future__ import annotations

import os
import tempfile
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, FrozenSet, Literal, Optional, Tuple

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import evaluation as ev
from . import knn
from .data import bundled_edges_path
from .dataset import (
    BookCatalog,
    DEFAULT_SEED,
    DEFAULT_SPLIT_RATIO,
    EdgeRecord,
    UserProfile,
    assign_books,
    build_adjacency,
    build_profiles,
    detect_columns,
    encode_books,
    load_annotated_edges,
    load_catalog_file,
    load_edges,
    split,
    write_annotated_csv,
)
from .recommender import cold_start_check, recommend

ANNOTATED_FILE = "annotated.csv"
MODEL_FILE = "model.json"
REPORT_FILE = "report.json"

VERSION_HEADER = "X-Snapshot-Version"


@dataclass
class ServiceConfig:
    data_dir: Path
    edges_path: Path = field(default_factory=bundled_edges_path)
    catalog_path: Optional[Path] = None
    seed: int = DEFAULT_SEED
    ratio: float = DEFAULT_SPLIT_RATIO
    host: str = "127.0.0.1"
    port: int = 8080
    static_dir: Optional[Path] = None
    # test hook: artificial delay inside the training critical section
    train_delay_ms: int = 0

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        values = {
            "data_dir": Path(os.environ.get("DATA_DIR", "./data")),
            "port": int(os.environ.get("PORT", "8080")),
            "train_delay_ms": int(os.environ.get("FRIENDREC_TRAIN_DELAY_MS", "0")),
        }
        if os.environ.get("STATIC_DIR"):
            values["static_dir"] = Path(os.environ["STATIC_DIR"])
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class Snapshot:
    """One immutable, fully consistent view of the application state."""

    version: int
    catalog: BookCatalog
    edges: Tuple[EdgeRecord, ...]
    profiles: Dict[int, UserProfile]
    adjacency: Dict[int, FrozenSet[int]]
    model: Optional[knn.KnnModel]


class ApiError(Exception):
    """Maps application failures to an HTTP status and a JSON error body."""

    def __init__(self, status: int, error: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.error = error
        self.detail = detail


class ServiceStartupError(RuntimeError):
    """The listener could not start (typically: port already in use)."""


class StateStore:
    """Holds the current snapshot; serializes writers, never blocks readers."""

    def __init__(self, initial: Snapshot, config: ServiceConfig):
        self._lock = threading.RLock()
        self._train_gate = threading.Lock()
        self._snapshot = initial
        self._report_cache: Optional[Tuple[Tuple[int, int], ev.EvaluationReport]] = None
        self.config = config

    @property
    def current(self) -> Snapshot:
        return self._snapshot

    def _install(self, snapshot: Snapshot) -> Snapshot:
        self._snapshot = snapshot
        return snapshot

    def create_user(self) -> Tuple[Snapshot, UserProfile]:
        with self._lock:
            snap = self._snapshot
            new_id = max(snap.profiles, default=-1) + 1
            profile = UserProfile(new_id, tuple([0] * len(snap.catalog)))
            profiles = dict(snap.profiles)
            profiles[new_id] = profile
            new_snap = replace(snap, version=snap.version + 1, profiles=profiles)
            return self._install(new_snap), profile

    def toggle_book(self, user_id: int, book: str, action: str) -> Tuple[Snapshot, UserProfile]:
        with self._lock:
            snap = self._snapshot
            profile = snap.profiles.get(user_id)
            if profile is None:
                raise ApiError(404, "not_found", f"unknown user {user_id}")
            if book not in snap.catalog:
                raise ApiError(404, "not_found", f"unknown book label {book!r}")
            index = snap.catalog.index_of(book)
            counts = list(profile.incidence)
            if action == "add":
                counts[index] += 1
            else:
                if counts[index] == 0:
                    raise ApiError(
                        409, "conflict", f"user {user_id} has zero count for {book}"
                    )
                counts[index] -= 1
            updated = UserProfile(user_id, tuple(counts))
            profiles = dict(snap.profiles)
            profiles[user_id] = updated
            new_snap = replace(snap, version=snap.version + 1, profiles=profiles)
            return self._install(new_snap), updated

    def train(self, k: Optional[int]) -> Tuple[Snapshot, dict]:
        if not self._train_gate.acquire(blocking=False):
            raise ApiError(409, "conflict", "a training run is already in progress")
        try:
            with self._lock:
                snap = self._snapshot
                if self.config.train_delay_ms > 0:
                    time.sleep(self.config.train_delay_ms / 1000.0)
                dataset = encode_books(snap.edges, snap.catalog)
                parts = split(dataset, self.config.ratio, self.config.seed)
                k_used = knn.DEFAULT_K if k is None else k
                if not 1 <= k_used <= len(parts.train):
                    raise ApiError(
                        400,
                        "bad_request",
                        f"k must satisfy 1 <= k <= {len(parts.train)}, got {k_used}",
                    )
                model = knn.KnnModel(parts.train.features, parts.train.labels, k=k_used)
                knn.save_model(model, self.config.data_dir / MODEL_FILE)
                new_snap = replace(snap, version=snap.version + 1, model=model)
                result = {
                    "k_used": k_used,
                    "train_rows": len(parts.train),
                    "test_rows": len(parts.test),
                }
                return self._install(new_snap), result
        finally:
            self._train_gate.release()

    def evaluate(self, k_min: int, k_max: int) -> ev.EvaluationReport:
        snap = self._snapshot
        cached = self._report_cache
        if cached is not None and cached[0] == (k_min, k_max):
            return cached[1]
        dataset = encode_books(snap.edges, snap.catalog)
        parts = split(dataset, self.config.ratio, self.config.seed)
        if not 1 <= k_min <= k_max <= len(parts.train):
            raise ApiError(
                400,
                "bad_request",
                f"need 1 <= kmin <= kmax <= {len(parts.train)}, "
                f"got kmin={k_min}, kmax={k_max}",
            )
        report = ev.sweep(parts, k_min, k_max)
        with self._lock:
            self._report_cache = ((k_min, k_max), report)
            _atomic_write_text(self.config.data_dir / REPORT_FILE, report.to_json())
        return report


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as stream:
            stream.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_initial_snapshot(config: ServiceConfig) -> Snapshot:
    """Resolve catalog and edges, annotating and persisting on first start."""
    catalog = (
        load_catalog_file(config.catalog_path)
        if config.catalog_path is not None
        else BookCatalog.default()
    )
    config.data_dir.mkdir(parents=True, exist_ok=True)
    annotated_path = config.data_dir / ANNOTATED_FILE
    if annotated_path.exists():
        edges = load_annotated_edges(annotated_path, catalog)
    else:
        if detect_columns(config.edges_path) == 3:
            edges = load_annotated_edges(config.edges_path, catalog)
        else:
            raw = load_edges(config.edges_path)
            edges = assign_books(raw, catalog, config.seed)
        tmp = annotated_path.with_suffix(".csv.tmp")
        write_annotated_csv(edges, tmp)
        os.replace(tmp, annotated_path)

    model = None
    model_path = config.data_dir / MODEL_FILE
    if model_path.exists():
        model = knn.load_model(model_path)

    return Snapshot(
        version=1,
        catalog=catalog,
        edges=tuple(edges),
        profiles=build_profiles(edges, catalog),
        adjacency={u: frozenset(v) for u, v in build_adjacency(edges).items()},
        model=model,
    )


class TrainRequest(BaseModel):
    k: Optional[int] = None


class BookToggleRequest(BaseModel):
    book: str
    action: Literal["add", "remove"]


def _profile_body(profile: UserProfile, catalog: BookCatalog) -> dict:
    return {
        "user": profile.user,
        "incidence": list(profile.incidence),
        "books": profile.books_read(catalog),
    }


def create_app(config: ServiceConfig) -> FastAPI:
    store = StateStore(load_initial_snapshot(config), config)
    app = FastAPI(title="friendrec", docs_url=None, redoc_url=None)
    app.state.store = store

    def versioned(payload, snapshot: Snapshot, status: int = 200) -> JSONResponse:
        return JSONResponse(
            payload, status_code=status, headers={VERSION_HEADER: str(snapshot.version)}
        )

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            {"error": exc.error, "detail": exc.detail},
            status_code=exc.status,
            headers={VERSION_HEADER: str(store.current.version)},
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            {"error": "bad_request", "detail": str(exc.errors()[:1])},
            status_code=400,
            headers={VERSION_HEADER: str(store.current.version)},
        )

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_error(request: Request, exc: StarletteHTTPException):
        error = "not_found" if exc.status_code == 404 else "error"
        return JSONResponse(
            {"error": error, "detail": str(exc.detail)},
            status_code=exc.status_code,
            headers={VERSION_HEADER: str(store.current.version)},
        )

    @app.get("/api/health")
    def health():
        snap = store.current
        return versioned(
            {
                "status": "ok",
                "dataset_rows": len(snap.edges),
                "trained": snap.model is not None,
            },
            snap,
        )

    @app.get("/api/books")
    def books():
        snap = store.current
        return versioned(list(snap.catalog.labels), snap)

    @app.get("/api/users")
    def users():
        snap = store.current
        ids = sorted(snap.profiles)
        return versioned({"users": ids, "count": len(ids)}, snap)

    @app.post("/api/users", status_code=201)
    def create_user():
        snap, profile = store.create_user()
        return versioned(_profile_body(profile, snap.catalog), snap, status=201)

    @app.get("/api/users/{user_id}")
    def get_user(user_id: int):
        snap = store.current
        profile = snap.profiles.get(user_id)
        if profile is None:
            raise ApiError(404, "not_found", f"unknown user {user_id}")
        return versioned(_profile_body(profile, snap.catalog), snap)

    @app.post("/api/users/{user_id}/books")
    def toggle_book(user_id: int, body: BookToggleRequest):
        snap, profile = store.toggle_book(user_id, body.book, body.action)
        return versioned(_profile_body(profile, snap.catalog), snap)

    @app.get("/api/users/{user_id}/recommendations")
    def recommendations(user_id: int, k: Optional[int] = None, limit: Optional[int] = None):
        snap = store.current
        if user_id not in snap.profiles:
            raise ApiError(404, "not_found", f"unknown user {user_id}")
        if k is None:
            k = snap.model.k if snap.model is not None else knn.DEFAULT_K
        if limit is None:
            limit = 10
        if k < 1:
            raise ApiError(400, "bad_request", f"k must be positive, got {k}")
        if limit < 1:
            raise ApiError(400, "bad_request", f"limit must be positive, got {limit}")
        if cold_start_check(snap.profiles, user_id):
            raise ApiError(
                422, "cold_start", f"user {user_id} has no books read"
            )
        results = recommend(snap.profiles, snap.adjacency, user_id, k, limit, snap.catalog)
        return versioned([r.to_dict() for r in results], snap)

    @app.post("/api/train")
    def train(body: Optional[TrainRequest] = None):
        k = body.k if body is not None else None
        snap, result = store.train(k)
        return versioned(result, snap)

    @app.get("/api/evaluation")
    def evaluation_endpoint(kmin: Optional[int] = None, kmax: Optional[int] = None):
        snap = store.current
        if kmin is None or kmax is None:
            train_size = int(len(snap.edges) * config.ratio)
            default_min, default_max = ev.default_k_range(max(train_size, 1))
            kmin = default_min if kmin is None else kmin
            kmax = default_max if kmax is None else kmax
        report = store.evaluate(kmin, kmax)
        return versioned(report.to_dict(), snap)

    if config.static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="static")

    return app


def run_server(config: ServiceConfig, on_ready=None) -> None:
    """Blocking uvicorn launch of the API (plus optional static passthrough).

    The dataset is loaded before the listener binds, so the health endpoint
    reflects the full dataset from the first reachable moment.
    """
    import socket

    import uvicorn

    app = create_app(config)

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.host, config.port))
    except OSError as exc:
        raise ServiceStartupError(
            f"cannot listen on {config.host}:{config.port}: {exc}"
        ) from exc
    finally:
        probe.close()

    if on_ready is not None:
        on_ready(f"http://{config.host}:{config.port}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
