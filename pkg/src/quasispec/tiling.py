"""Substitution rules, the words they generate and their substitution matrices."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GenerationTooLarge, NotPrimitive, UnknownLetter

MAX_WORD_LENGTH = 10**7
PISOT_TOL = 1e-12


@dataclass(frozen=True)
class SubstitutionRule:
    """Letterwise substitution on a finite alphabet of single characters."""

    alphabet: tuple
    images: dict = field(hash=False)

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        if len(set(alphabet)) != len(alphabet) or not alphabet:
            raise ConfigError(f"alphabet must be nonempty and without repeats: {alphabet}")
        if any(not isinstance(a, str) or len(a) != 1 for a in alphabet):
            raise ConfigError("letters must be single characters")
        images = dict(self.images)
        if set(images) != set(alphabet):
            raise ConfigError("every letter needs exactly one image")
        for letter, img in images.items():
            if not img:
                raise ConfigError(f"image of {letter!r} is empty")
            bad = set(img) - set(alphabet)
            if bad:
                raise UnknownLetter(f"image of {letter!r} uses letters {sorted(bad)}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "images", images)

    @classmethod
    def from_config(cls, cfg):
        return cls(tuple(cfg["alphabet"]), dict(cfg["images"]))


FIBONACCI = SubstitutionRule(("a", "b"), {"a": "ab", "b": "a"})


@dataclass(frozen=True)
class TilingWord:
    letters: str
    generation: int = 0


def letter_counts(word, alphabet):
    letters = word.letters if isinstance(word, TilingWord) else word
    return np.array([letters.count(a) for a in alphabet], dtype=np.int64)


def substitute(rule, seed, steps):
    """Apply `rule` letterwise `steps` times.

    >>> substitute(FIBONACCI, TilingWord("a"), 3).letters
    'abaab'
    """
    if steps < 0:
        raise ConfigError(f"steps must be >= 0, got {steps}")
    if isinstance(seed, str):
        seed = TilingWord(seed)
    bad = set(seed.letters) - set(rule.alphabet)
    if bad:
        raise UnknownLetter(f"seed contains letters {sorted(bad)} outside {rule.alphabet}")
    counts = letter_counts(seed, rule.alphabet)
    m = substitution_matrix(rule)
    lengths = m.sum(axis=1)
    word = seed.letters
    for _ in range(steps):
        # predict the next length from counts before building the string
        if int(counts @ lengths) > MAX_WORD_LENGTH:
            raise GenerationTooLarge(
                f"word would exceed {MAX_WORD_LENGTH} letters; track counts instead")
        word = "".join(rule.images[c] for c in word)
        counts = counts @ m
    return TilingWord(word, seed.generation + steps)


def substitution_matrix(rule):
    """M[i, j] = number of occurrences of letter j in the image of letter i.

    With this orientation the letter-count row vector of a word w satisfies
    counts(rho(w)) = counts(w) @ M.
    """
    n = len(rule.alphabet)
    m = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(rule.alphabet):
        m[i] = letter_counts(rule.images[a], rule.alphabet)
    return m


def compose(rule, other):
    """The rule w -> rule(other(w))."""
    images = {a: "".join(rule.images[c] for c in other.images[a]) for a in rule.alphabet}
    return SubstitutionRule(rule.alphabet, images)


def count_vector(rule, seed, steps):
    """Letter counts after `steps` substitutions, without building the word."""
    counts = letter_counts(seed, rule.alphabet)
    return counts @ np.linalg.matrix_power(substitution_matrix(rule), steps)


def is_primitive(m, k_cap=None):
    """True iff some power m^k with k <= k_cap is entrywise positive.

    The default cap n^2 - 2n + 2 is Wielandt's bound, beyond which no
    primitive matrix can still have a zero entry.
    """
    m = np.asarray(m)
    n = m.shape[0]
    if k_cap is None:
        k_cap = n * n - 2 * n + 2
    if k_cap < 1:
        raise ConfigError(f"k_cap must be >= 1, got {k_cap}")
    pattern = (m > 0).astype(np.int64)
    power = pattern.copy()
    for _ in range(k_cap):
        if np.all(power > 0):
            return True
        power = ((power @ pattern) > 0).astype(np.int64)
    return False


def perron_frobenius(m):
    """Dominant eigenvalue of a primitive matrix and whether it is a Pisot number."""
    m = np.asarray(m)
    if not is_primitive(m):
        raise NotPrimitive("substitution matrix is not primitive")
    ev = np.linalg.eigvals(m.astype(float))
    order = np.argsort(-np.abs(ev))
    dominant = float(ev[order[0]].real)
    others = np.abs(ev[order[1:]])
    is_pisot = dominant > 1.0 and bool(np.all(others < 1.0 - PISOT_TOL))
    return dominant, is_pisot


def fibonacci_word(n):
    """Fibonacci word W_n with W_1 = "a", W_2 = "ab" and W_{n+1} = W_n W_{n-1}."""
    if n < 1:
        raise ConfigError(f"generation must be >= 1, got {n}")
    return substitute(FIBONACCI, TilingWord("a", 1), n - 1)


PARITIES = ("all", "even", "odd")


def generations_with_parity(n_max, parity="all"):
    """Generation indices 0..n_max restricted to the requested parity.

    Which subsequence of generations defines a limiting tiling is a convention
    choice (even-numbered, odd-numbered or all), so it is left to the caller.
    """
    if parity not in PARITIES:
        raise ConfigError(f"generation parity must be one of {PARITIES}, got {parity!r}")
    start, step = {"all": (0, 1), "even": (0, 2), "odd": (1, 2)}[parity]
    return list(range(start, n_max + 1, step))
