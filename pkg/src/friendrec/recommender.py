"""Ranked friend recommendation by book-profile similarity.

Candidates are every profiled user except the query user and their
existing friends. Each candidate is scored as 1 / (1 + d) where d is the
Euclidean distance between incidence vectors, so identical profiles score
1.0 and scores decay monotonically with distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Mapping, Set, Tuple

from .dataset import BookCatalog, UserProfile
from .knn import euclidean


class UnknownUserError(ValueError):
    """Query user id absent from the profile map."""


@dataclass(frozen=True)
class Recommendation:
    """One ranked candidate with its score and the explaining signal."""

    candidate: int
    score: float
    distance: float
    shared_books: Tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate,
            "score": self.score,
            "distance": self.distance,
            "shared_books": list(self.shared_books),
        }


def score_from_distance(distance: float) -> float:
    return 1.0 / (1.0 + distance)


def shared_books(
    a: UserProfile, b: UserProfile, catalog: BookCatalog
) -> Tuple[str, ...]:
    """Labels both users have positive incidence for, in catalog order."""
    return tuple(
        catalog.labels[i]
        for i, (x, y) in enumerate(zip(a.incidence, b.incidence))
        if x > 0 and y > 0
    )


def cold_start_check(profiles: Mapping[int, UserProfile], query: int) -> bool:
    """True when the query user's incidence vector is all zero."""
    try:
        profile = profiles[query]
    except KeyError:
        raise UnknownUserError(f"unknown user {query}") from None
    return profile.is_cold()


def recommend(
    profiles: Mapping[int, UserProfile],
    adjacency: Mapping[int, Set[int]],
    query: int,
    k: int,
    limit: int,
    catalog: BookCatalog,
) -> List[Recommendation]:
    """Up to ``limit`` of the ``k`` nearest non-friend candidates.

    Candidates are ordered by (distance ascending, user id ascending),
    which equals (score descending, user id ascending) since the score is
    strictly decreasing in distance. More candidates than exist are never
    returned; zero candidates yield an empty list, not an error.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if limit < 1:
        raise ValueError(f"limit must be positive, got {limit}")
    try:
        query_profile = profiles[query]
    except KeyError:
        raise UnknownUserError(f"unknown user {query}") from None

    friends = adjacency.get(query, set())
    ranked: List[Tuple[float, int]] = []
    for uid, profile in profiles.items():
        if uid == query or uid in friends:
            continue
        ranked.append((euclidean(query_profile.incidence, profile.incidence), uid))
    ranked.sort()

    results = []
    for distance, uid in ranked[: min(k, limit)]:
        results.append(
            Recommendation(
                candidate=uid,
                score=score_from_distance(distance),
                distance=distance,
                shared_books=shared_books(query_profile, profiles[uid], catalog),
            )
        )
    return results
