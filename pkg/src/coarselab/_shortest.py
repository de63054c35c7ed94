"""Small min-plus helpers shared by the metric constructions.

Hand-rolled rather than csgraph because several constructions need
zero-weight edges, whose encoding in sparse/dense graph inputs is easy
to get wrong.  Windows are a few hundred points, so cubic closures are
cheap.
"""

from __future__ import annotations

import numpy as np


def minplus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(min, +) matrix product, row-chunked to bound memory."""
    n, k = a.shape
    k2, m = b.shape
    assert k == k2
    out = np.empty((n, m))
    chunk = max(1, int(4e6) // max(1, k * m) + 1)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        out[lo:hi] = np.min(a[lo:hi, :, None] + b[None, :, :], axis=1)
    return out


def closure(w: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths of a weighted digraph given as a dense
    matrix with ``inf`` for missing edges.  Floyd-Warshall; the diagonal
    is clamped to 0 (empty paths are allowed)."""
    d = np.array(w, dtype=float)
    np.fill_diagonal(d, np.minimum(np.diagonal(d), 0.0))
    n = d.shape[0]
    for k in range(n):
        col = d[:, k][:, None]
        row = d[k, :][None, :]
        np.minimum(d, col + row, out=d)
    return d
