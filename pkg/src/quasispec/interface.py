"""Localized modes of reflected quasiperiodic operators.

The reflected coefficient a(|x|) is discretised on the symmetric grid
x_i = -L + i h with central differences. The result is a real symmetric
tridiagonal pencil (K, diag(w)), so eigenvalues in a window come from Sturm
bisection and eigenvectors from inverse iteration, at O(n) cost per step.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GridTooCoarse, TruncationSuspect
from .numerics import fit_exponential_envelope, tridiagonal_eigenvalues, tridiagonal_eigenvectors
from .supercell import GapSet, shared_gaps

BOUNDARIES = ("dirichlet", "neumann")
BOUNDARY_RATIO = 1e-3
BOUNDARY_ZONE = 0.05
CENTRAL_FRACTION = 0.5
FLAT_RATE = -1e-3
FIT_START = 1.0
FIT_STOP = 0.6
WINDOW_INFLATION = 0.05


@dataclass(frozen=True)
class InterfaceProblem:
    """-u'' + V(|x|) u = lam u, or -u'' = lam rho(|x|) u when `generalized`, on [-L, L].

    `coefficient` is the reflected potential or weight.
    """

    coefficient: object
    L: float = 34.0
    h: float = 0.005
    boundary: str = "dirichlet"
    generalized: bool = False

    def __post_init__(self):
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.L <= 0 or self.h <= 0:
            raise ConfigError("L and h must be positive")

    @property
    def half_points(self):
        return int(round(self.L / self.h))


def grid(p):
    n = p.half_points
    if n < 4:
        raise GridTooCoarse(f"half-width L = {p.L} holds fewer than 4 steps of h = {p.h}")
    h = p.L / n
    x = -p.L + h * np.arange(2 * n + 1)
    x[n] = 0.0
    if p.boundary == "dirichlet":
        x = x[1:-1]
    return x, h


def tridiagonal_pencil(p):
    """Diagonal d, off-diagonal e of K and the diagonal weight w."""
    x, h = grid(p)
    n = x.size
    c = 1.0 / h**2
    d = np.full(n, 2 * c)
    e = np.full(n - 1, -c)
    values = p.coefficient(x)
    if p.generalized:
        w = values.astype(float).copy()
    else:
        d = d + values
        w = np.ones(n)
    if p.boundary == "neumann":
        # mirror ghost u_{-1} = u_1, symmetrised by halving the boundary rows
        d[0] *= 0.5
        d[-1] *= 0.5
        w[0] *= 0.5
        w[-1] *= 0.5
    return x, d, e, w


def solve_interface(p, window, with_vectors=True):
    """Eigenvalues of the truncated problem in `window` and, optionally, the
    eigenvectors sampled on the grid (columns, unit max-norm).

    Returns (x, eigenvalues, vectors).
    """
    lo, hi = window
    if not lo < hi:
        raise ConfigError(f"window must satisfy lo < hi, got {window}")
    x, d, e, w = tridiagonal_pencil(p)
    r = 1.0 / np.sqrt(w)
    ds = d * r * r
    es = e * r[:-1] * r[1:]
    lam = tridiagonal_eigenvalues(ds, es, window=(lo, hi))
    if not with_vectors:
        return x, lam, None
    vecs = tridiagonal_eigenvectors(ds, es, lam) * r[:, None]
    vecs /= np.max(np.abs(vecs), axis=0, keepdims=True)
    return x, lam, vecs


def central_fraction(x, u, L):
    """Share of the squared norm carried by |x| < L / 4."""
    u2 = np.abs(u) ** 2
    return float(u2[np.abs(x) < L / 4].sum() / u2.sum())


def boundary_ratio(x, u, L):
    """max |u| over the outer 5 % of the domain relative to max |u|."""
    a = np.abs(u)
    return float(a[np.abs(x) >= (1 - BOUNDARY_ZONE) * L].max() / a.max())


@dataclass
class InterfaceMode:
    eigenvalue: float
    x: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    rate: float
    rate_left: float
    rate_right: float
    gap: tuple
    margin: float
    parity: str


def half_axis_rates(x, u, L, start=FIT_START, stop=FIT_STOP):
    """Envelope decay rates fitted on [start, stop L] and its mirror image."""
    right = (x >= start) & (x <= stop * L)
    left = (x <= -start) & (x >= -stop * L)
    rate_r, _ = fit_exponential_envelope(x[right], u[right])
    rate_l, _ = fit_exponential_envelope(-x[left], u[left])
    return rate_l, rate_r


def parity(u, tol=1e-6):
    scale = np.max(np.abs(u))
    if np.max(np.abs(u - u[::-1])) <= tol * scale:
        return "even"
    if np.max(np.abs(u + u[::-1])) <= tol * scale:
        return "odd"
    return "mixed"


def classify_modes(x, eigenvalues, vectors, gaps, L):
    """In-gap candidates that decay away from the interface on both sides."""
    out = []
    for k, lam in enumerate(eigenvalues):
        gap = gaps.containing(lam)
        if gap is None:
            continue
        u = vectors[:, k]
        rl, rr = half_axis_rates(x, u, L)
        if rl >= FLAT_RATE or rr >= FLAT_RATE:
            continue
        margin = float(min(lam - gap[0], gap[1] - lam))
        out.append(InterfaceMode(float(lam), x, u, 0.5 * (rl + rr), rl, rr, gap, margin,
                                 parity(u)))
    return out


def check_truncation(x, eigenvalues, vectors, gaps, L):
    """Raise TruncationSuspect if a centrally localized in-gap mode is not small
    near the ends of the domain."""
    for k, lam in enumerate(eigenvalues):
        if gaps.containing(lam) is None:
            continue
        u = vectors[:, k]
        if central_fraction(x, u, L) > CENTRAL_FRACTION:
            ratio = boundary_ratio(x, u, L)
            if ratio > BOUNDARY_RATIO:
                raise TruncationSuspect(
                    f"mode at {lam:.6g} keeps {ratio:.2e} of its peak near x = +-L; enlarge L")


def compare_decay(mode, estimate):
    rate = mode.rate if isinstance(mode, InterfaceMode) else float(mode)
    return abs(rate - estimate) / abs(estimate)


def certification_gaps(field_, approximants, window, generalized=False, points_per_unit=40):
    """Gaps shared by the listed approximants.

    In one dimension band edges sit at alpha = 0 and alpha = pi / T, so the
    three samples 0, pi / T, 2 pi / T give the exact band ranges.
    """
    return shared_gaps(field_, approximants, window, alpha_count=3,
                       points_per_unit=points_per_unit, generalized=generalized)


def search_windows(gaps, inflation=WINDOW_INFLATION):
    """The gaps, each widened by `inflation` of its width, merged where they overlap."""
    wide = sorted((a - inflation * (b - a), b + inflation * (b - a)) for a, b in gaps)
    out = [list(wide[0])]
    for a, b in wide[1:]:
        if a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [tuple(w) for w in out]


def find_interface_modes(p, gaps, windows=None):
    """Solve, check truncation and classify in one call."""
    if not isinstance(gaps, GapSet):
        gaps = GapSet(list(gaps))
    if len(gaps) == 0:
        return []
    windows = search_windows(gaps.intervals) if windows is None else windows
    modes = []
    for window in windows:
        x, lam, vecs = solve_interface(p, window)
        if lam.size == 0:
            continue
        check_truncation(x, lam, vecs, gaps, p.L)
        modes.extend(classify_modes(x, lam, vecs, gaps, p.L))
    return modes
