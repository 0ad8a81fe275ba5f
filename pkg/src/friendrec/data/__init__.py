"""Bundled datasets shipped with the package."""

from importlib import resources
from pathlib import Path

BUNDLED_EDGES_NAME = "social_edges.csv"


def bundled_edges_path() -> Path:
    """Path to the bundled 4031-row directed social edge list."""
    return Path(resources.files(__package__) / BUNDLED_EDGES_NAME)
