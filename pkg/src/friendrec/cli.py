"""Command-line entry point: the full pipeline as subcommands.

Exit codes are stable: 0 success, 1 runtime failure (bad input file, port
in use...), 2 usage error, 3 cold-start user, 4 unknown user. Human
output goes to stdout, diagnostics to stderr; machine-readable artifacts
are only ever written to --out paths.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import evaluation as ev
from .data import bundled_edges_path
from .dataset import (
    BookCatalog,
    DEFAULT_SEED,
    DEFAULT_SPLIT_RATIO,
    EdgeListError,
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
    write_raw_csv,
)
from .recommender import UnknownUserError, cold_start_check, recommend
from .service import ServiceConfig, ServiceStartupError, run_server

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_COLD_START = 3
EXIT_NOT_FOUND = 4


def _catalog_from(args) -> BookCatalog:
    if getattr(args, "catalog", None):
        return load_catalog_file(args.catalog)
    return BookCatalog.default()


def _load_annotated_any(path: Path, catalog: BookCatalog, seed: int):
    """Load an annotated edge list; raw two-column input is annotated on the fly."""
    if detect_columns(path) == 3:
        return load_annotated_edges(path, catalog)
    print(f"input {path} is a raw edge list; annotating with seed {seed}", file=sys.stderr)
    return assign_books(load_edges(path), catalog, seed)


def cmd_ingest(args) -> int:
    edges = load_edges(args.edges)
    print(f"{len(edges)} rows")
    if args.out:
        write_raw_csv(edges, args.out)
        print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_annotate(args) -> int:
    catalog = _catalog_from(args)
    edges = load_edges(args.edges)
    annotated = assign_books(edges, catalog, args.seed)
    write_annotated_csv(annotated, args.out)
    print(f"annotated {len(annotated)} rows with seed {args.seed} -> {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    catalog = _catalog_from(args)
    edges = _load_annotated_any(args.edges, catalog, args.seed)
    dataset = encode_books(edges, catalog)
    parts = split(dataset, args.ratio, args.seed)
    k_min = args.kmin
    k_max = args.kmax
    if k_min is None or k_max is None:
        default_min, default_max = ev.default_k_range(len(parts.train))
        k_min = default_min if k_min is None else k_min
        k_max = default_max if k_max is None else k_max
    if not 1 <= k_min <= k_max <= len(parts.train):
        print(
            f"error: need 1 <= kmin <= kmax <= {len(parts.train)}, "
            f"got kmin={k_min}, kmax={k_max}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    report = ev.sweep(parts, k_min, k_max)
    print(report.as_table())
    chosen = next(e for e in report.entries if e.k == report.chosen_k)
    print(f"chosen K = {report.chosen_k} (error rate {chosen.error_rate:.3f}%)")
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
        print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_recommend(args) -> int:
    catalog = _catalog_from(args)
    edges = _load_annotated_any(args.edges, catalog, args.seed)
    profiles = build_profiles(edges, catalog)
    adjacency = build_adjacency(edges)
    if args.user not in profiles:
        print(f"error: unknown user {args.user}", file=sys.stderr)
        return EXIT_NOT_FOUND
    if cold_start_check(profiles, args.user):
        print(f"user {args.user} has no books read", file=sys.stderr)
        return EXIT_COLD_START
    results = recommend(profiles, adjacency, args.user, args.k, args.limit, catalog)
    for rec in results:
        books = ",".join(rec.shared_books) if rec.shared_books else "-"
        print(f"{rec.candidate}\t{rec.score:.6f}\t{rec.distance:.6f}\t{books}")
    return EXIT_OK


def cmd_serve(args) -> int:
    config = ServiceConfig(
        data_dir=Path(args.data_dir),
        edges_path=Path(args.edges),
        catalog_path=Path(args.catalog) if args.catalog else None,
        seed=args.seed,
        ratio=args.ratio,
        host=args.host,
        port=args.port,
        static_dir=Path(args.static_dir) if args.static_dir else None,
        train_delay_ms=int(os.environ.get("FRIENDREC_TRAIN_DELAY_MS", "0")),
    )
    run_server(config, on_ready=lambda url: print(f"friendrec service listening on {url}", flush=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="friendrec",
        description="Friend recommendation pipeline: ingest, annotate, evaluate, recommend, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    bundled = str(bundled_edges_path())

    p = sub.add_parser("ingest", help="parse and validate a raw edge list")
    p.add_argument("--edges", default=bundled, help="raw 2-column CSV (default: bundled)")
    p.add_argument("--out", default=None, help="write the validated list to this CSV")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("annotate", help="assign books to edges with a seeded shuffle")
    p.add_argument("--edges", default=bundled, help="raw 2-column CSV (default: bundled)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--catalog", default=None, help="catalog file, one label per line")
    p.add_argument("--out", required=True, help="write user,friend,book CSV here")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("evaluate", help="sweep K over a range and report accuracy")
    p.add_argument(
        "--data",
        dest="edges",
        default=bundled,
        help="annotated 3-column CSV, or raw 2-column to annotate on the fly",
    )
    p.add_argument("--kmin", type=int, default=None)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--ratio", type=float, default=DEFAULT_SPLIT_RATIO)
    p.add_argument("--catalog", default=None)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("recommend", help="rank candidate friends for one user")
    p.add_argument("--data", dest="edges", default=bundled)
    p.add_argument("--user", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--catalog", default=None)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("serve", help="run the HTTP JSON API")
    p.add_argument("--port", type=int, default=int(os.environ.get("PORT", "8080")))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=os.environ.get("DATA_DIR", "./data"))
    p.add_argument("--edges", default=bundled)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--ratio", type=float, default=DEFAULT_SPLIT_RATIO)
    p.add_argument("--catalog", default=None)
    p.add_argument("--static-dir", default=os.environ.get("STATIC_DIR"))
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EdgeListError, FileNotFoundError, ServiceStartupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except UnknownUserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
