import numpy as np
import pytest

from vdpc import pairwise_distances
from vdpc.cli import load_bundled

BUNDLED = ("flame", "aggregation", "r15", "compound", "jain", "pathbased")

# best-performing (pct, delta_t) per bundled dataset, as used by the
# reference expectations
BEST_PARAMS = {
    "flame": (5, 5.5),
    "aggregation": (4, 2.9),
    "r15": (5, 1.0),
    "compound": (1.9, 1.39),
    "jain": (50, 5.5),
    "pathbased": (0.4, 3.5),
}

_cache: dict = {}


@pytest.fixture(scope="session")
def datasets():
    if "ds" not in _cache:
        _cache["ds"] = {name: load_bundled(name) for name in BUNDLED}
    return _cache["ds"]


@pytest.fixture(scope="session")
def distances(datasets):
    if "cd" not in _cache:
        _cache["cd"] = {n: pairwise_distances(d) for n, d in datasets.items()}
    return _cache["cd"]


def random_points(rng: np.random.Generator, n: int, dim: int = 2) -> np.ndarray:
    """Clustered random point set with generic (tie-free) distances."""
    centers = rng.uniform(-10, 10, size=(rng.integers(1, 4), dim))
    pick = rng.integers(0, len(centers), size=n)
    return centers[pick] + rng.normal(0, rng.uniform(0.3, 2.0), size=(n, dim))
