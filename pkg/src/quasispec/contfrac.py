"""Continued fractions and their rational convergents.

Convergents are indexed from k = 0, so for the golden ratio the sequence is
1/1, 2/1, 3/2, 5/3, 8/5, ... and the denominators are Fibonacci numbers.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, NotEnoughElements, PrecisionExhausted

FLOAT_MAX_ELEMENTS = 15
FLOAT_RESIDUAL_TOL = 1e-12

EXACT_TAGS = ("golden", "sqrt2")
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class ContinuedFraction:
    """Elements a_0; a_1, a_2, ... of a continued fraction.

    `complete` is true when the list is the whole (finite) expansion of a
    rational number, in which case it is kept in canonical form.
    """

    elements: tuple
    exact_tag: object = None
    complete: bool = False

    def __post_init__(self):
        els = tuple(int(a) for a in self.elements)
        if not els:
            raise ConfigError("a continued fraction needs at least one element")
        if any(a < 1 for a in els[1:]):
            raise ConfigError(f"elements after the first must be >= 1, got {list(els)}")
        if self.complete and len(els) > 1 and els[-1] == 1:
            els = els[:-2] + (els[-2] + 1,)
        object.__setattr__(self, "elements", els)

    def __len__(self):
        return len(self.elements)

    def value(self):
        """Value of the truncated fraction as an exact Fraction."""
        v = Fraction(self.elements[-1])
        for a in reversed(self.elements[:-1]):
            v = a + 1 / v
        return v


@dataclass(frozen=True)
class RationalApproximant:
    """Convergent p/q with its index and the bound 1/(q_k q_{k+1}) on |x - p/q|.

    error_bound is None when the next denominator is not known, and 0 for the
    final convergent of a complete (rational) expansion.
    """

    p: int
    q: int
    index: int = 0
    error_bound: float = None

    def __post_init__(self):
        if self.q <= 0:
            raise ConfigError(f"denominator must be positive, got {self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise ConfigError(f"{self.p}/{self.q} is not in lowest terms")

    @property
    def value(self):
        return self.p / self.q

    def __str__(self):
        return f"{self.p}/{self.q}"


def tag_value(tag):
    """Floating-point value of an exact tag ("golden", "sqrt2" or a Fraction)."""
    if tag == "golden":
        return GOLDEN
    if tag == "sqrt2":
        return math.sqrt(2.0)
    if isinstance(tag, Fraction):
        return float(tag)
    raise ConfigError(f"unknown exact tag {tag!r}")


def _rational_elements(fr, k_max):
    els = []
    num, den = fr.numerator, fr.denominator
    while den != 0 and len(els) < k_max:
        a = num // den
        els.append(a)
        num, den = den, num - a * den
    return els, den == 0


def cf_elements(x, k_max):
    """First `k_max` elements of the continued fraction of `x`.

    `x` is a float, a Fraction, or one of the exact tags "golden" and "sqrt2".
    Exact inputs are expanded symbolically; floats stop once the fractional
    part is below 1e-12 and refuse to go past 15 elements.

    >>> cf_elements(1.5, 5).elements
    (1, 2)
    >>> cf_elements("golden", 4).elements
    (1, 1, 1, 1)
    """
    if k_max < 1:
        raise ConfigError(f"k_max must be >= 1, got {k_max}")
    if isinstance(x, str):
        if x == "golden":
            return ContinuedFraction((1,) * k_max, "golden")
        if x == "sqrt2":
            return ContinuedFraction((1,) + (2,) * (k_max - 1), "sqrt2")
        raise ConfigError(f"unknown exact tag {x!r}; expected one of {EXACT_TAGS}")
    if isinstance(x, (Fraction, int)):
        fr = Fraction(x)
        els, done = _rational_elements(fr, k_max)
        return ContinuedFraction(els, fr, complete=done)
    x = float(x)
    if not math.isfinite(x):
        raise ConfigError(f"cannot expand non-finite value {x}")
    els = []
    r = x
    while True:
        a = math.floor(r)
        els.append(a)
        frac = r - a
        if frac < FLOAT_RESIDUAL_TOL:
            return ContinuedFraction(els, complete=True)
        if len(els) == k_max:
            return ContinuedFraction(els)
        if len(els) >= FLOAT_MAX_ELEMENTS:
            raise PrecisionExhausted(
                f"double precision supports at most {FLOAT_MAX_ELEMENTS} elements; "
                "use an exact tag or a Fraction")
        r = 1.0 / frac


def convergents(cf, count):
    """The first `count` convergents p_k/q_k of `cf`.

    >>> [str(c) for c in convergents(cf_elements("sqrt2", 5), 4)]
    ['1/1', '3/2', '7/5', '17/12']
    """
    els = cf.elements
    if count < 1 or count > len(els):
        raise NotEnoughElements(f"requested {count} convergents from {len(els)} elements")
    p_prev, p = 1, els[0]
    q_prev, q = 0, 1
    pq = [(p, q)]
    for a in els[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        pq.append((p, q))
    out = []
    for k in range(count):
        pk, qk = pq[k]
        if k + 1 < len(pq):
            bound = 1.0 / (qk * pq[k + 1][1])
        elif cf.complete:
            bound = 0.0
        else:
            bound = None
        out.append(RationalApproximant(pk, qk, k, bound))
    return out


def golden_approximants(count):
    """Golden-ratio convergents 1/1, 2/1, 3/2, 5/3, ... with error bounds."""
    return convergents(cf_elements("golden", count + 1), count)


def approximant_with_denominator(tag, q, k_max=60):
    """The convergent of `tag` whose denominator is `q`."""
    for c in convergents(cf_elements(tag, k_max), k_max - 1):
        if c.q == q:
            return c
        if c.q > q:
            break
    raise ConfigError(f"{q} is not a convergent denominator of {tag!r}")
