"""Distances between finite sets of reals."""

import numpy as np

from ..errors import EmptyAfterWindow


def restrict(values, window):
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if window is None:
        return v
    lo, hi = window
    return v[(v >= lo) & (v <= hi)]


def directed_distances(a, b):
    """For every point of `a`, its distance to the nearest point of sorted `b`."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    i = np.searchsorted(b, a)
    right = b[np.clip(i, 0, len(b) - 1)]
    left = b[np.clip(i - 1, 0, len(b) - 1)]
    return np.minimum(np.abs(a - right), np.abs(a - left))


def hausdorff_distance(set_a, set_b, window=None):
    """Hausdorff distance between two finite sets, both restricted to `window`.

    >>> hausdorff_distance([0, 5], [1, 4], window=(0, 5))
    1.0
    """
    a = restrict(set_a, window)
    b = restrict(set_b, window)
    if a.size == 0 or b.size == 0:
        raise EmptyAfterWindow(f"empty set after restricting to window {window}")
    return float(max(directed_distances(a, b).max(), directed_distances(b, a).max()))
