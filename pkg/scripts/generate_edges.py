#!/usr/bin/env python3
"""Generate the bundled synthetic social edge list (deterministic).

Shape mirrors a small social-network interaction export: a
preferential-attachment friendship graph over 80 users, where each
undirected friendship {u, v} appears as a variable number of repeated
directed row pairs "v,u" / "u,v" (interactions repeat), plus one final
unpaired row so the file holds exactly 4031 rows by 2 columns.

Repeated directed rows matter: they are what gives the edge classifier
signal once every copy of a pair carries the pair's one book label.

Re-running always reproduces the committed file byte for byte.

Usage:
    python scripts/generate_edges.py [--check] [--out PATH]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from friendrec.shuffling import SplitMix64  # noqa: E402

SEED = 20240611
CLIQUE_SIZE = 8          # users 0..7 start fully connected (28 friendships)
ATTACHMENTS = 3          # friendships added per subsequent user
N_USERS = 80
COPY_WEIGHTS = (2, 4, 6, 8, 10, 12, 16)  # directed-copy counts drawn per pair
TARGET_DIRECTED = 2015   # copies per direction; 2 * 2015 + 1 = 4031 rows
EXTRA_ROW = (7, 0)       # the odd row that breaks perfect mirroring

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "friendrec" / "data" / "social_edges.csv"


def build_rows() -> list[tuple[int, int]]:
    rng = SplitMix64(SEED)
    pairs: list[tuple[int, int]] = []
    endpoints: list[int] = []  # degree-weighted sampling pool

    def add_pair(u: int, v: int) -> None:
        pairs.append((u, v) if u < v else (v, u))
        endpoints.append(u)
        endpoints.append(v)

    for u in range(CLIQUE_SIZE):
        for v in range(u + 1, CLIQUE_SIZE):
            add_pair(u, v)
    for node in range(CLIQUE_SIZE, N_USERS):
        chosen: set[int] = set()
        while len(chosen) < ATTACHMENTS:
            candidate = endpoints[rng.below(len(endpoints))]
            if candidate != node and candidate not in chosen:
                chosen.add(candidate)
                add_pair(node, candidate)

    copies = [COPY_WEIGHTS[rng.below(len(COPY_WEIGHTS))] for _ in pairs]
    # nudge copy counts round-robin until they sum to the target exactly
    i = 0
    while sum(copies) != TARGET_DIRECTED:
        if sum(copies) < TARGET_DIRECTED:
            copies[i % len(copies)] += 1
        elif copies[i % len(copies)] > 1:
            copies[i % len(copies)] -= 1
        i += 1

    rows: list[tuple[int, int]] = []
    for (lo, hi), count in zip(pairs, copies):
        for _ in range(count):
            rows.append((hi, lo))
            rows.append((lo, hi))
    rows.append(EXTRA_ROW)
    return rows


def render(rows: list[tuple[int, int]]) -> str:
    return "\n".join(f"{u},{v}" for u, v in rows) + "\n"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT)
    parser.add_argument(
        "--check", action="store_true", help="verify the existing file instead of writing"
    )
    args = parser.parse_args()

    rows = build_rows()
    users = {u for row in rows for u in row}
    assert len(rows) == 2 * TARGET_DIRECTED + 1, len(rows)
    assert users == set(range(N_USERS)), "user ids must be contiguous from 0"
    assert all(u != v for u, v in rows), "self-loop generated"
    content = render(rows)

    if args.check:
        existing = args.out.read_text(encoding="utf-8")
        if existing != content:
            print(f"MISMATCH: {args.out} differs from generated content", file=sys.stderr)
            return 1
        print(f"OK: {args.out} matches ({len(rows)} rows, {len(users)} users)")
        return 0

    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(content, encoding="utf-8")
    print(f"wrote {args.out} ({len(rows)} rows, {len(users)} users)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
