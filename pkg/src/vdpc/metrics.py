"""External clustering evaluation: adjusted Rand index and normalized
mutual information.

Labels are compared as partitions of the same index set; any integer
values are accepted and noise markers (negative labels) count as a
regular cluster of their own, so a labeling that leaves points as noise
is penalized exactly as if it had put them in one extra cluster.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

__all__ = ["adjusted_rand_index", "normalized_mutual_information", "contingency"]


def _as_codes(labels) -> np.ndarray:
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ParameterError("labels must be one-dimensional")
    _, codes = np.unique(arr, return_inverse=True)
    return codes


def contingency(labels_a, labels_b) -> np.ndarray:
    """Cross-tabulation of two labelings of the same points."""
    a, b = _as_codes(labels_a), _as_codes(labels_b)
    if len(a) != len(b):
        raise ParameterError(
            "labelings disagree in length: %d vs %d" % (len(a), len(b))
        )
    if len(a) == 0:
        raise ParameterError("labelings must be non-empty")
    r, c = int(a.max()) + 1, int(b.max()) + 1
    table = np.zeros((r, c), dtype=np.int64)
    np.add.at(table, (a, b), 1)
    return table


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-adjusted pair-counting agreement in [-1, 1]."""
    table = contingency(labels_a, labels_b)
    n = table.sum()

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_ij = comb2(table.astype(np.float64)).sum()
    sum_a = comb2(table.sum(axis=1).astype(np.float64)).sum()
    sum_b = comb2(table.sum(axis=0).astype(np.float64)).sum()
    total = comb2(float(n))
    expected = sum_a * sum_b / total if total > 0 else 0.0
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 0.0
    return float((sum_ij - expected) / (max_index - expected))


def normalized_mutual_information(labels_a, labels_b) -> float:
    """Mutual information over the arithmetic mean of the entropies.

    Two constant labelings agree perfectly (1.0); a constant labeling
    against a varying one carries no information (0.0).
    """
    table = contingency(labels_a, labels_b).astype(np.float64)
    n = table.sum()
    pa = table.sum(axis=1) / n
    pb = table.sum(axis=0) / n

    def entropy(p):
        p = p[p > 0]
        return float(-(p * np.log(p)).sum())

    ha, hb = entropy(pa), entropy(pb)
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    pj = table / n
    outer = np.outer(pa, pb)
    mask = pj > 0
    mi = float((pj[mask] * np.log(pj[mask] / outer[mask])).sum())
    return mi / ((ha + hb) / 2.0)
