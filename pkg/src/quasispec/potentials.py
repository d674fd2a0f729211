"""Coefficient functions: quasiperiodic slices of torus fields, their periodic
approximants, reflected variants and piecewise-constant laminates."""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .contfrac import GOLDEN, ContinuedFraction, RationalApproximant, tag_value
from .errors import ConfigError, EmptyWord, UnknownLetter
from .tiling import TilingWord

HERMITIAN_TOL = 1e-12
KINDS = ("quasiperiodic-slice", "periodic", "reflected", "laminate")
DEFAULT_TILES = {"a": (1.0, 1.0), "b": (1.0, 2.0)}


def theta_value(theta):
    if isinstance(theta, RationalApproximant):
        return theta.p / theta.q
    if isinstance(theta, (str, Fraction)):
        return tag_value(theta)
    return float(theta)


@dataclass(frozen=True)
class CoefficientField:
    """Real doubly 1-periodic field F(x, y) = sum_{m,n} c_mn exp(2 pi i (m x + n y)),
    with a slope theta and a torus offset (y1, y2) defining the slice
    f(x) = F(x + y1, theta x + y2).
    """

    modes: dict = field(hash=False)
    theta: object = GOLDEN
    offset: tuple = (0.0, 0.0)
    name: str = "fourier"

    def __post_init__(self):
        modes = {}
        for (m, n), c in self.modes.items():
            c = complex(c)
            if c != 0:
                modes[(int(m), int(n))] = c
        for (m, n), c in modes.items():
            partner = modes.get((-m, -n), 0.0)
            if abs(c - np.conj(partner)) > HERMITIAN_TOL:
                raise ConfigError(
                    f"Fourier coefficients are not Hermitian symmetric at ({m}, {n}); "
                    "the field would not be real")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "offset", (float(self.offset[0]), float(self.offset[1])))

    @property
    def theta_value(self):
        return theta_value(self.theta)

    def with_theta(self, theta):
        return CoefficientField(self.modes, theta, self.offset, self.name)

    def with_offset(self, offset):
        return CoefficientField(self.modes, self.theta, offset, self.name)

    def shifted(self, c, name=None):
        """Field F + c."""
        modes = dict(self.modes)
        modes[(0, 0)] = modes.get((0, 0), 0.0) + c
        return CoefficientField(modes, self.theta, self.offset, name or self.name)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for (m, n), c in sorted(self.modes.items()):
            if m < 0 or (m == 0 and n < 0):
                continue  # counted with its conjugate partner
            phase = 2 * np.pi * (m * x + n * y)
            if m == 0 and n == 0:
                out = out + c.real
            else:
                out = out + 2 * (c.real * np.cos(phase) - c.imag * np.sin(phase))
        return out

    def slice(self, x, theta=None):
        """f(x) = F(x + y1, theta x + y2); `theta` overrides the field's slope."""
        t = self.theta_value if theta is None else theta_value(theta)
        x = np.asarray(x, dtype=float)
        y1, y2 = self.offset
        return self(np.mod(x + y1, 1.0), np.mod(t * x + y2, 1.0))

    def lipschitz_y(self):
        """Upper bound on |dF/dy|."""
        return float(sum(2 * np.pi * abs(n) * abs(c) for (m, n), c in self.modes.items()))

    def is_constant(self):
        return all(m == 0 and n == 0 for m, n in self.modes)

    def mean(self):
        return self.modes.get((0, 0), 0j).real


def sin2d(theta=GOLDEN, offset=(0.0, 0.0)):
    """F(x, y) = sin 2 pi x + sin 2 pi y."""
    modes = {(1, 0): -0.5j, (-1, 0): 0.5j, (0, 1): -0.5j, (0, -1): 0.5j}
    return CoefficientField(modes, theta, offset, "sin2d")


def constant_field(c, theta=GOLDEN):
    return CoefficientField({(0, 0): c}, theta, (0.0, 0.0), "constant")


def fourier_field(coeffs, theta=GOLDEN, offset=(0.0, 0.0)):
    """Field from [[m, n, re, im], ...] rows."""
    modes = {}
    for row in coeffs:
        if len(row) != 4:
            raise ConfigError(f"fourier rows must be [m, n, re, im], got {row}")
        m, n, re, im = row
        if int(m) != m or int(n) != n:
            raise ConfigError(f"mode indices must be integers, got {m}, {n}")
        modes[(int(m), int(n))] = modes.get((int(m), int(n)), 0) + complex(re, im)
    return CoefficientField(modes, theta, offset, "fourier")


def parse_theta(spec):
    """Slope from config: "golden", "sqrt2", {"cf": [...]}, {"rational": [p, q]} or a number."""
    if isinstance(spec, str):
        if spec in ("golden", "sqrt2"):
            return spec
        raise ConfigError(f"unknown theta tag {spec!r}")
    if isinstance(spec, dict):
        if set(spec) == {"rational"}:
            p, q = spec["rational"]
            if q <= 0:
                raise ConfigError("rational theta needs a positive denominator")
            fr = Fraction(int(p), int(q))
            return RationalApproximant(fr.numerator, fr.denominator)
        if set(spec) == {"cf"}:
            cf = ContinuedFraction(spec["cf"], complete=True)
            v = cf.value()
            return RationalApproximant(v.numerator, v.denominator)
        raise ConfigError(f"theta object must have a single key 'rational' or 'cf': {spec}")
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return float(spec)
    raise ConfigError(f"cannot interpret theta {spec!r}")


def field_from_config(spec, theta="golden", offset=(0.0, 0.0)):
    if spec == "sin2d":
        return sin2d(theta, offset)
    if spec == "sin2d+3":
        return sin2d(theta, offset).shifted(3.0, "sin2d+3")
    if isinstance(spec, dict) and set(spec) == {"fourier"}:
        return fourier_field(spec["fourier"], theta, offset)
    if isinstance(spec, dict) and set(spec) == {"constant"}:
        return CoefficientField({(0, 0): float(spec["constant"])}, theta, offset, "constant")
    raise ConfigError(f"unknown field {spec!r}")


@dataclass(frozen=True)
class Coefficient1D:
    """A real coefficient on the line with its kind and, if periodic, its period."""

    kind: str
    period: object
    evaluator: object = field(compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown coefficient kind {self.kind!r}")
        if self.period is not None and not self.period > 0:
            raise ConfigError("period must be positive")

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    def sample(self, x, h=None):
        """Grid samples; laminates are averaged over x - h/2 and x + h/2 so that
        a grid point on a tile boundary sees the mean of the two tiles."""
        x = np.asarray(x, dtype=float)
        if self.kind == "laminate" and h is not None:
            return 0.5 * (self(x - h / 2) + self(x + h / 2))
        return self(x)


def quasiperiodic_slice(field_):
    return Coefficient1D("quasiperiodic-slice", None, field_.slice)


def periodic_approximant(field_, approx):
    """f_l(x) = F(x + y1, (p/q) x + y2), which has period q."""
    if isinstance(approx, (tuple, list)):
        approx = RationalApproximant(*approx)
    ratio = approx.p / approx.q
    period = 1 if field_.is_constant() else approx.q
    return Coefficient1D("periodic", period, lambda x: field_.slice(x, ratio))


def reflect(c):
    """x -> c(|x|)."""
    return Coefficient1D("reflected", None, lambda x: c(np.abs(x)))


@dataclass(frozen=True)
class Laminate:
    """Tiles map letter -> (length, value) with value the wavespeed of the layer."""

    tiles: dict = field(hash=False)
    word: TilingWord = TilingWord("a")

    def __post_init__(self):
        tiles = {}
        for k, (length, value) in self.tiles.items():
            if not (length > 0 and value > 0):
                raise ConfigError(f"tile {k!r} needs positive length and value")
            tiles[k] = (float(length), float(value))
        object.__setattr__(self, "tiles", tiles)
        if isinstance(self.word, str):
            object.__setattr__(self, "word", TilingWord(self.word))
        missing = set(self.word.letters) - set(tiles)
        if missing:
            raise UnknownLetter(f"word uses letters {sorted(missing)} without tiles")

    @property
    def lengths(self):
        return np.array([self.tiles[c][0] for c in self.word.letters])

    @property
    def values(self):
        return np.array([self.tiles[c][1] for c in self.word.letters])

    @property
    def total_length(self):
        return float(self.lengths.sum())


def laminate_coefficient(lam, periodize=True):
    """Piecewise-constant coefficient laid left to right from 0."""
    if not lam.word.letters:
        raise EmptyWord("laminate word is empty")
    edges = np.concatenate([[0.0], np.cumsum(lam.lengths)])
    values = lam.values
    total = edges[-1]

    def evaluate(x):
        if periodize:
            x = np.mod(x, total)
        idx = np.searchsorted(edges, x, side="right") - 1
        return values[np.clip(idx, 0, len(values) - 1)]

    return Coefficient1D("laminate", total if periodize else None, evaluate)
