"""Floquet-Bloch spectra of periodic approximants.

A period cell [0, T) is sampled at N points and the operator -d^2/dx^2 + V
(or the pencil -d^2/dx^2 = lambda rho) is discretised by central differences
with the quasi-periodicity u(T) = exp(i alpha T) u(0) folded into the corner
entries.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GridTooCoarse
from .numerics import (
    cyclic_tridiagonal_eigenvalues,
    hausdorff_distance,
)
from .potentials import Laminate, laminate_coefficient, periodic_approximant

MIN_POINTS = 8
DEFAULT_POINTS_PER_UNIT = 40
DEFAULT_ALPHA_COUNT = 64
DEFAULT_WINDOW = (0.0, 30.0)


@dataclass(frozen=True)
class BlochProblem:
    potential: np.ndarray
    period: float
    alpha: float = 0.0
    weight: np.ndarray = None

    def __post_init__(self):
        v = np.asarray(self.potential, dtype=float)
        object.__setattr__(self, "potential", v)
        if self.period <= 0:
            raise ConfigError(f"period must be positive, got {self.period}")
        if v.ndim != 1 or v.size < MIN_POINTS:
            raise GridTooCoarse(f"need at least {MIN_POINTS} grid points, got {v.size}")
        if self.weight is not None:
            w = np.asarray(self.weight, dtype=float)
            if w.shape != v.shape:
                raise ConfigError("weight and potential must have the same length")
            object.__setattr__(self, "weight", w)

    @property
    def n(self):
        return self.potential.size

    @property
    def h(self):
        return self.period / self.n


def assemble_bloch(problem):
    """Hermitian N x N Bloch matrix of -u'' + V u at quasi-momentum alpha."""
    n, h = problem.n, problem.h
    if n < MIN_POINTS:
        raise GridTooCoarse(f"need at least {MIN_POINTS} grid points, got {n}")
    c = 1.0 / h**2
    m = np.zeros((n, n), dtype=np.complex128)
    idx = np.arange(n)
    m[idx, idx] = 2 * c + problem.potential
    m[idx[1:], idx[:-1]] = -c
    m[idx[:-1], idx[1:]] = -c
    phase = np.exp(1j * problem.alpha * problem.period)
    m[n - 1, 0] += -c * phase
    m[0, n - 1] += -c * np.conj(phase)
    return m


def bloch_eigenvalues(problem, window=None):
    """Bloch eigenvalues, from the cyclic tridiagonal structure of
    `assemble_bloch` without forming the dense matrix."""
    n, h = problem.n, problem.h
    c = 1.0 / h**2
    corner = -c * np.exp(1j * problem.alpha * problem.period)
    return cyclic_tridiagonal_eigenvalues(2 * c + problem.potential, np.full(n - 1, -c),
                                          corner, problem.weight, window)


def alpha_grid(period, count):
    """Uniform samples of [0, 2 pi / T], endpoints included."""
    if count < 2:
        raise ConfigError(f"alpha_count must be >= 2, got {count}")
    return np.linspace(0.0, 2 * np.pi / period, count)


@dataclass
class BandDiagram:
    alphas: np.ndarray
    bands: np.ndarray
    period: float
    level: str = ""
    h: float = None
    meta: dict = field(default_factory=dict)

    @property
    def n_bands(self):
        return self.bands.shape[1]

    def samples(self, window=None):
        """All eigenvalue samples as a flat sorted array, optionally windowed."""
        v = np.sort(self.bands.ravel())
        if window is not None:
            v = v[(v >= window[0]) & (v <= window[1])]
        return v


@dataclass
class GapSet:
    intervals: list
    window: tuple = None

    def __post_init__(self):
        self.intervals = [(float(lo), float(hi)) for lo, hi in self.intervals]
        for lo, hi in self.intervals:
            if not lo < hi:
                raise ConfigError(f"gap ({lo}, {hi}) is empty")
        self.intervals.sort()
        for (a, b), (c, d) in zip(self.intervals, self.intervals[1:]):
            if c < b:
                raise ConfigError("gaps overlap")

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def contains(self, value, margin=0.0):
        return any(lo + margin < value < hi - margin for lo, hi in self.intervals)

    def containing(self, value):
        for gap in self.intervals:
            if gap[0] < value < gap[1]:
                return gap
        return None


def _solve_all(problems, threads):
    if threads <= 1:
        return [bloch_eigenvalues(p) for p in problems]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(bloch_eigenvalues, problems))


def periodic_samples(coefficient, period, points_per_unit):
    n = int(round(points_per_unit * period))
    if n < MIN_POINTS:
        raise GridTooCoarse(f"need at least {MIN_POINTS} grid points, got {n}")
    h = period / n
    x = h * np.arange(n)
    return x, coefficient.sample(x, h), h


def band_diagram(field_, approx, alpha_count=DEFAULT_ALPHA_COUNT, n_bands=None,
                 points_per_unit=DEFAULT_POINTS_PER_UNIT, generalized=False, threads=1):
    """Band diagram of the period-q approximant F(x, (p/q) x).

    With `generalized` the field is the weight rho in -u'' = lambda rho u and
    the potential is zero; otherwise it is the Schrodinger potential.
    """
    coef = periodic_approximant(field_, approx)
    period = float(coef.period)
    _, values, h = periodic_samples(coef, period, points_per_unit)
    if generalized:
        problems = [BlochProblem(np.zeros_like(values), period, a, values)
                    for a in alpha_grid(period, alpha_count)]
    else:
        problems = [BlochProblem(values, period, a) for a in alpha_grid(period, alpha_count)]
    return _diagram(problems, n_bands, threads, f"{approx.p}/{approx.q}", h)


def _diagram(problems, n_bands, threads, level, h):
    if n_bands is not None and n_bands < 1:
        raise ConfigError(f"n_bands must be >= 1, got {n_bands}")
    spectra = _solve_all(problems, threads)
    keep = spectra[0].size if n_bands is None else min(n_bands, spectra[0].size)
    bands = np.array([s[:keep] for s in spectra])
    alphas = np.array([p.alpha for p in problems])
    return BandDiagram(alphas, bands, problems[0].period, level, h)


def laminate_weight(laminate, x, h):
    """Weight 1/c^2 averaged over the two half-cells around each grid point."""
    coef = laminate_coefficient(laminate, periodize=True)
    return 0.5 * (coef(x - h / 2) ** -2.0 + coef(x + h / 2) ** -2.0)


def laminate_band_diagram(laminate, alpha_count=DEFAULT_ALPHA_COUNT, n_bands=None,
                          points_per_unit=DEFAULT_POINTS_PER_UNIT, threads=1):
    """Bands of -u'' = omega^2 c^-2 u for the periodically repeated laminate word.

    Eigenvalues are omega^2.
    """
    period = laminate.total_length
    n = int(round(points_per_unit * period))
    if n < MIN_POINTS:
        raise GridTooCoarse(f"need at least {MIN_POINTS} grid points, got {n}")
    h = period / n
    x = h * np.arange(n)
    w = laminate_weight(laminate, x, h)
    problems = [BlochProblem(np.zeros(n), period, a, w) for a in alpha_grid(period, alpha_count)]
    return _diagram(problems, n_bands, threads, f"word length {len(laminate.word.letters)}", h)


def _refined_extremes(alphas, band):
    """Band min and max with a 3-point parabolic correction at interior extrema."""
    out = []
    for sign in (1.0, -1.0):
        f = sign * band
        j = int(np.argmin(f))
        best = f[j]
        if 0 < j < len(f) - 1:
            a, b, c = f[j - 1], f[j], f[j + 1]
            curv = a - 2 * b + c
            if curv > 0:
                best = min(best, b - (a - c) ** 2 / (8 * curv))
        out.append(sign * best)
    return out[0], out[1]


def default_merge_tol(window, h):
    """Five times the leading central-difference eigenvalue error lambda^2 h^2 / 12."""
    mid = 0.5 * (window[0] + window[1])
    return 5 * mid**2 * h**2 / 12


def band_ranges(bd):
    return [_refined_extremes(bd.alphas, bd.bands[:, b]) for b in range(bd.n_bands)]


def extract_gaps(bd, window=DEFAULT_WINDOW, merge_tol=None):
    """Complement within `window` of the union of band ranges."""
    lo_w, hi_w = window
    if not lo_w < hi_w:
        raise ConfigError(f"window must satisfy lo < hi, got {window}")
    if merge_tol is None:
        merge_tol = default_merge_tol(window, bd.h) if bd.h else 0.0
    ranges = sorted(band_ranges(bd))
    gaps = []
    cursor = lo_w
    for lo, hi in ranges:
        if lo > cursor:
            gaps.append((cursor, min(lo, hi_w)))
        cursor = max(cursor, hi)
        if cursor >= hi_w:
            break
    # nothing is reported above the highest computed band: those bands are unknown
    gaps = [(a, b) for a, b in gaps if b - a > merge_tol and a < hi_w]
    return GapSet(gaps, (lo_w, hi_w))


def intersect_gaps(gapsets):
    """Intervals lying in a gap of every set."""
    current = list(gapsets[0].intervals)
    for gs in gapsets[1:]:
        nxt = []
        for a, b in current:
            for c, d in gs.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    nxt.append((lo, hi))
        current = nxt
    return GapSet(current, gapsets[0].window)


def shared_gaps(field_, approximants, window=DEFAULT_WINDOW, **kwargs):
    """Gaps common to the band diagrams of all listed approximants."""
    sets = []
    for a in approximants:
        bd = band_diagram(field_, a, **kwargs)
        sets.append(extract_gaps(bd, window))
    return intersect_gaps(sets)


@dataclass
class ConvergenceTable:
    denominators: list
    distances: list
    constant: float
    slope: float


def convergence_study(field_, levels, window=(0.0, 20.0), alpha_count=DEFAULT_ALPHA_COUNT,
                      points_per_unit=DEFAULT_POINTS_PER_UNIT, generalized=False, threads=1):
    """Hausdorff distances between consecutive approximant spectra.

    Each spectrum is the finite set of band samples inside `window`. Returns
    the distance d_l between levels l and l+1, the constant C of the
    least-squares fit d_l ~ C / q_l and the log-log slope of d_l against q_l.
    """
    if len(levels) < 3:
        raise ConfigError("convergence_study needs at least 3 levels")
    spectra = []
    for a in levels:
        bd = band_diagram(field_, a, alpha_count, None, points_per_unit, generalized, threads)
        spectra.append(bd.samples())
    qs = [a.q for a in levels[:-1]]
    dists = [hausdorff_distance(s, t, window) for s, t in zip(spectra, spectra[1:])]
    inv = 1.0 / np.array(qs, dtype=float)
    d = np.array(dists)
    constant = float(inv @ d / (inv @ inv))
    if np.all(d > 0):
        slope = float(np.polyfit(np.log(qs), np.log(d), 1)[0])
    else:
        slope = float("nan")
    return ConvergenceTable(qs, dists, constant, slope)


def free_dispersion(alpha, period, count):
    """The `count` lowest exact free Bloch eigenvalues (alpha + 2 pi m / T)^2."""
    span = count // 2 + 2
    m = np.arange(-span, span + 1)
    return np.sort((alpha + 2 * np.pi * m / period) ** 2)[:count]


__all__ = [
    "BandDiagram",
    "BlochProblem",
    "ConvergenceTable",
    "GapSet",
    "Laminate",
    "alpha_grid",
    "assemble_bloch",
    "band_diagram",
    "bloch_eigenvalues",
    "convergence_study",
    "extract_gaps",
    "free_dispersion",
    "intersect_gaps",
    "laminate_band_diagram",
    "shared_gaps",
]
