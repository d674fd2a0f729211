"""Transfer matrices, the Fibonacci trace map and super band gaps.

Layers are modelled by u'' + (omega / c)^2 u = 0, so a tile of length l and
wavespeed c propagates (u, u') by

    [[cos kl, sin(kl) / k], [-k sin kl, cos kl]],   k = omega / c.

The transfer matrix of a word w_1 ... w_k is T(w_k) ... T(w_1). For the
Fibonacci words W_1 = a, W_2 = ab, W_{n+1} = W_n W_{n-1} the traces
x_n = tr T(W_n) obey x_{n+1} = x_n x_{n-1} - x_{n-2}.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .contfrac import RationalApproximant
from .errors import ConfigError, NotInGap
from .tiling import fibonacci_word

SATURATION = 1e300
DEFAULT_EPS = 1e-3
DEFAULT_N_MAX = 40
SEED_GENERATIONS = 3
DET_TOL = 1e-8


def tile_transfer(length, wavespeed, omega):
    """2x2 transfer matrix of one homogeneous tile; the omega -> 0 limit is a shear."""
    if length <= 0 or wavespeed <= 0:
        raise ConfigError("tile length and wavespeed must be positive")
    if omega < 0:
        raise ConfigError(f"omega must be >= 0, got {omega}")
    k = omega / wavespeed
    kl = k * length
    c, s = np.cos(kl), np.sin(kl)
    # sin(kl)/k -> l as k -> 0
    sk = length if k == 0 else s / k
    return np.array([[c, sk], [-k * s, c]])


def _tile_arrays(length, wavespeed, omegas):
    k = omegas / wavespeed
    kl = k * length
    c, s = np.cos(kl), np.sin(kl)
    sk = np.where(k == 0, length, s / np.where(k == 0, 1.0, k))
    out = np.empty(omegas.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = sk
    out[..., 1, 0] = -k * s
    out[..., 1, 1] = c
    return out


def word_transfer(tiles, word, omegas):
    """Transfer matrices of `word` at every omega, shape (len(omegas), 2, 2)."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    mats = {c: _tile_arrays(*tiles[c], omegas) for c in set(word)}
    out = np.broadcast_to(np.eye(2), omegas.shape + (2, 2)).copy()
    for c in word:
        out = mats[c] @ out
    return out


@dataclass(frozen=True)
class TraceSequence:
    """Traces x_1 ... x_{n_max} at one frequency; x_1..x_3 come from direct
    matrix products, the rest from the recursion."""

    omega: float
    values: np.ndarray

    @property
    def n_max(self):
        return self.values.size


def _saturate(x):
    return np.clip(x, -SATURATION, SATURATION)


def trace_table(tiles, omegas, n_max=DEFAULT_N_MAX):
    """Array of shape (len(omegas), n_max) with x_n(omega) in column n - 1."""
    if n_max < SEED_GENERATIONS:
        raise ConfigError(f"n_max must be >= {SEED_GENERATIONS}, got {n_max}")
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    x = np.empty((omegas.size, n_max))
    for n in range(1, SEED_GENERATIONS + 1):
        m = word_transfer(tiles, fibonacci_word(n).letters, omegas)
        x[:, n - 1] = m[:, 0, 0] + m[:, 1, 1]
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(SEED_GENERATIONS, n_max):
            # x_{n+1} = x_n x_{n-1} - x_{n-2}, with 1-based n
            nxt = x[:, n - 1] * x[:, n - 2] - x[:, n - 3]
            x[:, n] = _saturate(np.nan_to_num(nxt, nan=SATURATION, posinf=SATURATION,
                                              neginf=-SATURATION))
    return x


def trace_sequence(tiles, omega, n_max=DEFAULT_N_MAX):
    return TraceSequence(float(omega), trace_table(tiles, [omega], n_max)[0])


@dataclass(frozen=True)
class SuperBandGapCertificate:
    lo: float
    hi: float
    N: int
    criterion: str
    eps: float = None


def _theorem_index(a):
    """Smallest 1-based N with |x_N| > 2, |x_{N+1}| >= |x_N|, |x_{N+2}| >= |x_{N+1}|."""
    for i in range(a.size - 2):
        if a[i] > 2 and a[i + 1] >= a[i] and a[i + 2] >= a[i + 1]:
            return i + 1
    return None


def _corollary_index(a, eps):
    """Smallest 1-based n with |x_n|, |x_{n+1}| > 2 + eps."""
    for i in range(a.size - 1):
        if a[i] > 2 + eps and a[i + 1] > 2 + eps:
            return i + 1
    return None


def certify_super_band_gap(ts, eps=DEFAULT_EPS):
    """Certificate that ts.omega lies in a super band gap S_N, or None.

    N is the smallest index passing the three-condition growth test; the
    two-consecutive-values test is the fallback when that test does not
    fire within the sequence.
    """
    if eps <= 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    a = np.abs(np.asarray(ts.values))
    if a.size < 3:
        raise ConfigError("trace sequence needs at least 3 values")
    nt = _theorem_index(a)
    if nt is not None:
        return SuperBandGapCertificate(ts.omega, ts.omega, nt, "theorem")
    nc = _corollary_index(a, eps)
    if nc is not None:
        return SuperBandGapCertificate(ts.omega, ts.omega, nc, "corollary", eps)
    return None


@dataclass
class TraceScan:
    omegas: np.ndarray
    traces: np.ndarray
    certified: np.ndarray
    indices: np.ndarray
    gaps: list


def scan_super_band_gaps(tiles, omega_window, resolution=2000, eps=DEFAULT_EPS,
                         n_max=DEFAULT_N_MAX):
    """Certify a uniform omega grid and merge certified runs into intervals.

    Each interval carries the largest per-sample N in it, so the whole run
    lies in S_N.
    """
    if resolution < 100:
        raise ConfigError(f"resolution must be >= 100, got {resolution}")
    lo, hi = omega_window
    if not 0 <= lo < hi:
        raise ConfigError(f"omega window must satisfy 0 <= lo < hi, got {omega_window}")
    omegas = np.linspace(lo, hi, resolution)
    table = trace_table(tiles, omegas, n_max)
    certified = np.zeros(resolution, dtype=bool)
    indices = np.zeros(resolution, dtype=np.int64)
    crit = []
    for i, w in enumerate(omegas):
        cert = certify_super_band_gap(TraceSequence(w, table[i]), eps)
        crit.append(cert)
        if cert is not None:
            certified[i] = True
            indices[i] = cert.N
    gaps = []
    i = 0
    while i < resolution:
        if not certified[i]:
            i += 1
            continue
        j = i
        while j + 1 < resolution and certified[j + 1]:
            j += 1
        run = crit[i:j + 1]
        kinds = {c.criterion for c in run}
        kind = "theorem" if kinds == {"theorem"} else "corollary"
        gaps.append(SuperBandGapCertificate(
            float(omegas[i]), float(omegas[j]), int(indices[i:j + 1].max()), kind,
            eps if kind == "corollary" else None))
        i = j + 1
    return TraceScan(omegas, table, certified, indices, gaps)


def eventually_above_two(values):
    """Direct check: the 1-based index after which every |x_n| > 2, or None."""
    a = np.abs(np.asarray(values))
    bad = np.flatnonzero(a <= 2)
    if bad.size == 0:
        return 1
    if bad[-1] >= a.size - 2:
        return None  # need at least two values beyond the last failure
    return int(bad[-1]) + 2


@njit(cache=True, nogil=True)
def _rk4_monodromy(ms, ns, cre, cim, c0, ratio, y1, y2, period, steps):
    """Monodromy over [0, period] of y' = [[0, 1], [a(x), 0]] y where
    a(x) = c0 + sum 2 Re(c exp(2 pi i (m (x + y1) + n (ratio x + y2))))."""
    h = period / steps
    m00, m01, m10, m11 = 1.0, 0.0, 0.0, 1.0
    two_pi = 2.0 * np.pi

    def coef(x):
        s = c0
        for j in range(ms.shape[0]):
            ph = two_pi * (ms[j] * (x + y1) + ns[j] * (ratio * x + y2))
            s += 2.0 * (cre[j] * np.cos(ph) - cim[j] * np.sin(ph))
        return s

    x = 0.0
    for _ in range(steps):
        a0 = coef(x)
        a1 = coef(x + 0.5 * h)
        a2 = coef(x + h)
        # columns of the fundamental matrix evolve independently
        for col in range(2):
            u = m00 if col == 0 else m01
            v = m10 if col == 0 else m11
            k1u, k1v = v, a0 * u
            k2u, k2v = v + 0.5 * h * k1v, a1 * (u + 0.5 * h * k1u)
            k3u, k3v = v + 0.5 * h * k2v, a1 * (u + 0.5 * h * k2u)
            k4u, k4v = v + h * k3v, a2 * (u + h * k3u)
            u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
            v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
            if col == 0:
                m00, m10 = u, v
            else:
                m01, m11 = u, v
        x += h
    out = np.empty((2, 2))
    out[0, 0] = m00
    out[0, 1] = m01
    out[1, 0] = m10
    out[1, 1] = m11
    return out


def _half_modes(modes, scale):
    """Split Fourier modes into the constant term and one representative per
    conjugate pair, multiplied by `scale`."""
    c0 = scale * modes.get((0, 0), 0j).real
    rows = [(m, n, c) for (m, n), c in sorted(modes.items())
            if m > 0 or (m == 0 and n > 0)]
    ms = np.array([r[0] for r in rows], dtype=float)
    ns = np.array([r[1] for r in rows], dtype=float)
    cre = np.array([scale * r[2].real for r in rows])
    cim = np.array([scale * r[2].imag for r in rows])
    return ms, ns, cre, cim, c0


def smooth_monodromy(field_, approx, lam, generalized=False, h=0.005):
    """Transfer matrix over one period q of -u'' + V u = lam u (or -u'' = lam rho u
    with rho the field when `generalized`), by RK4 with step h/4."""
    q = approx.q
    steps = int(round(4 * q / h))
    if generalized:
        ms, ns, cre, cim, c0 = _half_modes(field_.modes, -lam)
    else:
        ms, ns, cre, cim, c0 = _half_modes(field_.modes, 1.0)
        c0 -= lam
    m = _rk4_monodromy(ms, ns, cre, cim, c0, approx.p / q, *field_.offset, float(q), steps)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det - 1.0) > DET_TOL and det > 0:
        m = m / np.sqrt(det)
    return m


def small_multiplier(m):
    """Modulus of the smaller eigenvalue of a unit-determinant 2x2 matrix."""
    t = abs(m[0, 0] + m[1, 1])
    if t <= 2:
        return 1.0
    return float(t / 2 - np.sqrt(t * t / 4 - 1))


def decay_rate_estimate(source, lam, approximants, generalized=False, h=0.005):
    """min_k log|mu_k| / q_k over the listed approximants, with mu_k the smaller
    eigenvalue of the period-cell transfer matrix at lam.

    `source` is a CoefficientField (with RationalApproximant levels) or a
    dict of laminate tiles (with Fibonacci generations as levels, lam = omega).
    Levels whose trace has modulus <= 2 carry no decay and are skipped;
    NotInGap is raised when that leaves nothing.
    """
    rates = level_decay_rates(source, lam, approximants, generalized, h)
    finite = [r for r in rates if r is not None]
    if not finite:
        raise NotInGap(f"lambda = {lam} lies in a band of every listed approximant")
    return min(finite)


def level_decay_rates(source, lam, approximants, generalized=False, h=0.005):
    """Per-level log|mu_k| / q_k, or None where |trace| <= 2."""
    out = []
    for a in approximants:
        if isinstance(source, dict):
            word = fibonacci_word(int(a)).letters
            m = word_transfer(source, word, [lam])[0]
            q = len(word)
        else:
            if not isinstance(a, RationalApproximant):
                raise ConfigError("smooth fields need RationalApproximant levels")
            m = smooth_monodromy(source, a, lam, generalized, h)
            q = a.q
        mu = small_multiplier(m)
        out.append(None if mu >= 1.0 else float(np.log(mu) / q))
    return out


def in_band(field_, approx, lam, generalized=False, h=0.005):
    """Bloch condition: lam is in a band of the approximant iff |trace| <= 2."""
    m = smooth_monodromy(field_, approx, lam, generalized, h)
    return abs(m[0, 0] + m[1, 1]) <= 2.0
