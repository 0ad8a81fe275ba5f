import json
from pathlib import Path

import pytest

from friendrec.data import bundled_edges_path
from friendrec.dataset import BookCatalog, EdgeRecord, assign_books, write_annotated_csv

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def catalog():
    return BookCatalog.default()


@pytest.fixture(scope="session")
def bundled_path():
    return bundled_edges_path()


@pytest.fixture()
def mirrored_edges():
    """Small fixture with mirrored directed pairs and one unpaired row."""
    return [
        EdgeRecord(1, 0),
        EdgeRecord(0, 1),
        EdgeRecord(2, 3),
        EdgeRecord(3, 2),
        EdgeRecord(7, 0),
    ]


@pytest.fixture()
def annotated_fixture_path(tmp_path, catalog):
    """Annotated CSV for a compact 12-user friendship graph (seed 42)."""
    edges = []
    pairs = [(1, 0), (2, 0), (3, 1), (4, 2), (5, 3), (6, 4), (7, 5), (8, 6), (9, 7), (10, 8), (11, 9), (4, 0), (5, 1), (6, 2)]
    for u, v in pairs:
        edges.append(EdgeRecord(u, v))
        edges.append(EdgeRecord(v, u))
    annotated = assign_books(edges, catalog, 42)
    path = tmp_path / "fixture_annotated.csv"
    write_annotated_csv(annotated, path)
    return path


def load_golden(name: str):
    return json.loads((GOLDEN_DIR / name).read_text(encoding="utf-8"))


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {name}: {status}", flush=True)
