"""Point-set ingestion and condensed pairwise-distance computation.

A dataset is an (N, D) array of feature vectors with optional integer
ground-truth labels.  Distances are stored condensed: the N(N-1)/2
pairwise Euclidean distances in row-major upper-triangular order,
together with an ascending-sorted copy ``u`` used for quantile lookups.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import DataError

__all__ = [
    "Dataset",
    "CondensedDistances",
    "load_points_csv",
    "load_condensed_matrix",
    "pairwise_distances",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """N feature vectors of uniform dimension with optional labels."""

    points: np.ndarray
    ground_truth: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise DataError("points must be a 2-D array of feature vectors")
        if len(pts) < 2:
            raise DataError("a dataset needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise DataError("points contain non-finite values")
        object.__setattr__(self, "points", _readonly(pts))
        if self.ground_truth is not None:
            gt = np.asarray(self.ground_truth)
            if gt.ndim != 1 or len(gt) != len(pts):
                raise DataError(
                    "ground truth length %d does not match %d points"
                    % (gt.size, len(pts))
                )
            object.__setattr__(
                self, "ground_truth", _readonly(gt.astype(np.int64))
            )

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class CondensedDistances:
    """Pairwise Euclidean distances in condensed upper-triangular form.

    ``d`` holds dist(i, j) for i < j at index i*n - i*(i+1)/2 + (j-i-1);
    ``u`` is the same multiset sorted ascending.
    """

    n: int
    d: np.ndarray
    u: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        d = np.asarray(self.d, dtype=np.float64).ravel()
        m = self.n * (self.n - 1) // 2
        if self.n < 2:
            raise DataError("need at least 2 points")
        if d.size != m:
            raise DataError(
                "expected %d pairwise distances for n=%d, got %d"
                % (m, self.n, d.size)
            )
        if not np.all(np.isfinite(d)):
            raise DataError("distances contain non-finite values")
        if d.size and d.min() < 0:
            raise DataError("distances must be non-negative")
        object.__setattr__(self, "d", _readonly(d))
        u = self.u
        if u is None:
            u = np.sort(d, kind="stable")
        else:
            u = np.asarray(u, dtype=np.float64).ravel()
            if u.size != d.size or np.any(np.diff(u) < 0):
                raise DataError("u must be the ascending sort of d")
        object.__setattr__(self, "u", _readonly(u))

    def index(self, i: int, j: int) -> int:
        """Condensed index of the (i, j) pair, i != j."""
        if i == j:
            raise IndexError("diagonal entries are not stored")
        if i > j:
            i, j = j, i
        return i * self.n - i * (i + 1) // 2 + (j - i - 1)

    def dist(self, i: int, j: int) -> float:
        """Symmetric distance accessor; dist(i, i) = 0 by convention."""
        if i == j:
            return 0.0
        return float(self.d[self.index(i, j)])

    @cached_property
    def square(self) -> np.ndarray:
        """Full symmetric n-by-n matrix view of the condensed data."""
        return _readonly(squareform(self.d))

    @property
    def max_distance(self) -> float:
        return float(self.u[-1])


def pairwise_distances(ds: Dataset) -> CondensedDistances:
    """Condensed Euclidean distances of a dataset, row-major order."""
    return CondensedDistances(n=ds.n, d=pdist(ds.points))


def load_points_csv(
    path: str | Path,
    has_header: bool = False,
    label_column: int | None = None,
    name: str | None = None,
) -> Dataset:
    """Parse a comma-separated point file into a dataset.

    Every row must hold the same number of finite numeric cells; the
    optional label column is stripped from the features and kept as
    integer ground truth.  Errors name the offending 1-based line.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    rows: list[list[float]] = []
    width = None
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if lineno == 1 and has_header:
                continue
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise DataError(
                    f"{path}: line {lineno}: expected {width} cells, "
                    f"got {len(cells)}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise DataError(
                    f"{path}: line {lineno}: non-numeric cell"
                ) from None
    if len(rows) < 2:
        raise DataError(f"{path}: need at least 2 data rows, got {len(rows)}")
    arr = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        bad = int(np.where(~np.isfinite(arr).all(axis=1))[0][0])
        raise DataError(
            f"{path}: line {bad + 1 + int(has_header)}: non-finite value"
        )
    gt = None
    if label_column is not None:
        col = label_column if label_column >= 0 else arr.shape[1] + label_column
        if not 0 <= col < arr.shape[1]:
            raise DataError(
                f"{path}: label column {label_column} outside 0..{arr.shape[1] - 1}"
            )
        labels = arr[:, col]
        if np.any(labels != np.round(labels)):
            raise DataError(f"{path}: label column holds non-integer values")
        gt = labels.astype(np.int64)
        arr = np.delete(arr, col, axis=1)
        if arr.shape[1] == 0:
            raise DataError(f"{path}: no feature columns left after labels")
    return Dataset(points=arr, ground_truth=gt, name=name or path.stem)


def load_condensed_matrix(path: str | Path, n: int) -> CondensedDistances:
    """Parse a plain-number file holding n(n-1)/2 pairwise distances.

    Values may be separated by any mix of whitespace and commas and are
    taken as distances directly, in row-major upper-triangular order.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    text = path.read_text(encoding="utf-8")
    tokens = [t for t in re.split(r"[\s,]+", text) if t]
    try:
        values = np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError:
        raise DataError(f"{path}: non-numeric entry") from None
    expected = n * (n - 1) // 2
    if values.size != expected:
        raise DataError(
            f"{path}: expected {expected} values for n={n}, got {values.size}"
        )
    return CondensedDistances(n=n, d=values)
