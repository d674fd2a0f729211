"""Exponential envelope fits for decaying oscillatory profiles."""

import numpy as np

from ..errors import DegenerateFit, InsufficientSamples

ENVELOPE_WINDOW = 5


def envelope_indices(amplitudes, width=ENVELOPE_WINDOW):
    """Indices of samples that are the maximum of |u| over the centred window of
    `width` points. Samples too close to either end for a full window are not
    candidates, since a truncated window makes any decaying edge a maximum.

    Falls back to every index when fewer than three such maxima exist, which is
    the case for monotone profiles.
    """
    a = np.abs(np.asarray(amplitudes, dtype=float))
    n = a.size
    half = width // 2
    if n >= width:
        windows = np.lib.stride_tricks.sliding_window_view(a, width)
        idx = half + np.flatnonzero(a[half:n - half] >= windows.max(axis=1))
    else:
        idx = np.arange(0)
    # plateaus produce runs of equal maxima; keep every point, they fit the same line
    if idx.size < 3:
        idx = np.arange(n)
    return idx


def fit_exponential_envelope(positions, amplitudes, width=ENVELOPE_WINDOW):
    """Least-squares fit of log|u| ~ rate * x + intercept over the envelope.

    Returns (rate, intercept); a decaying profile has rate < 0.
    """
    x = np.asarray(positions, dtype=float)
    u = np.abs(np.asarray(amplitudes, dtype=float))
    if x.shape != u.shape:
        raise ValueError("positions and amplitudes must have the same shape")
    keep = u > 0
    x, u = x[keep], u[keep]
    if x.size < 3:
        raise InsufficientSamples(f"need at least 3 positive samples, got {x.size}")
    idx = envelope_indices(u, width)
    xs, ys = x[idx], np.log(u[idx])
    if np.ptp(xs) == 0:
        raise DegenerateFit("all envelope positions coincide")
    rate, intercept = np.polyfit(xs, ys, 1)
    return float(rate), float(intercept)
