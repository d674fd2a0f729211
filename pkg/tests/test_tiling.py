import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasispec.errors import ConfigError, GenerationTooLarge, NotPrimitive, UnknownLetter
from quasispec.tiling import (
    FIBONACCI,
    SubstitutionRule,
    TilingWord,
    compose,
    count_vector,
    fibonacci_word,
    generations_with_parity,
    is_primitive,
    letter_counts,
    perron_frobenius,
    substitute,
    substitution_matrix,
)

GOLDEN = (1 + 5**0.5) / 2
SILVER = SubstitutionRule(("a", "b"), {"a": "aab", "b": "a"})


class TestSubstitute:
    def test_fibonacci_generations(self):
        words = [substitute(FIBONACCI, "a", n).letters for n in range(5)]
        assert words == ["a", "ab", "aba", "abaab", "abaababa"]

    def test_generation_tracked(self):
        assert substitute(FIBONACCI, TilingWord("a", 1), 4).generation == 5

    def test_lengths_are_fibonacci(self):
        a, b = 1, 2
        for n in range(2, 20):
            assert len(fibonacci_word(n).letters) == b
            a, b = b, a + b

    def test_concatenation_recursion(self):
        for n in range(2, 12):
            assert (fibonacci_word(n + 1).letters
                    == fibonacci_word(n).letters + fibonacci_word(n - 1).letters)

    def test_prefix_property(self):
        big = fibonacci_word(18).letters
        for n in range(1, 18):
            assert big.startswith(fibonacci_word(n).letters)

    def test_unknown_letter_in_seed(self):
        with pytest.raises(UnknownLetter):
            substitute(FIBONACCI, "abc", 1)

    def test_unknown_letter_in_image(self):
        with pytest.raises(UnknownLetter):
            SubstitutionRule(("a", "b"), {"a": "ac", "b": "a"})

    def test_too_large(self):
        with pytest.raises(GenerationTooLarge):
            substitute(FIBONACCI, "a", 40)

    def test_bad_rules(self):
        with pytest.raises(ConfigError):
            SubstitutionRule(("a", "a"), {"a": "a"})
        with pytest.raises(ConfigError):
            SubstitutionRule(("a", "b"), {"a": "ab"})
        with pytest.raises(ConfigError):
            SubstitutionRule(("a",), {"a": ""})

    def test_from_config(self):
        rule = SubstitutionRule.from_config({"alphabet": ["a", "b"],
                                             "images": {"a": "ab", "b": "a"}})
        assert rule == FIBONACCI


class TestMatrix:
    def test_fibonacci(self):
        np.testing.assert_array_equal(substitution_matrix(FIBONACCI), [[1, 1], [1, 0]])

    def test_silver(self):
        np.testing.assert_array_equal(substitution_matrix(SILVER), [[2, 1], [1, 0]])

    def test_square_of_fibonacci(self):
        np.testing.assert_array_equal(substitution_matrix(compose(FIBONACCI, FIBONACCI)),
                                      [[2, 1], [1, 1]])

    def test_counts(self):
        for n in range(12):
            word = substitute(FIBONACCI, "a", n)
            np.testing.assert_array_equal(count_vector(FIBONACCI, "a", n),
                                          letter_counts(word, FIBONACCI.alphabet))

    def test_period_doubling(self):
        rule = SubstitutionRule(("a", "b"), {"a": "ab", "b": "aa"})
        np.testing.assert_array_equal(substitution_matrix(rule), [[1, 1], [2, 0]])


def images_on(draw, alphabet):
    return {a: "".join(draw(st.lists(st.sampled_from(alphabet), min_size=1, max_size=4)))
            for a in alphabet}


@st.composite
def rules(draw):
    alphabet = draw(st.lists(st.sampled_from("abcd"), min_size=1, max_size=4, unique=True))
    return SubstitutionRule(tuple(alphabet), images_on(draw, alphabet))


@st.composite
def rule_pairs(draw):
    r1 = draw(rules())
    return r1, SubstitutionRule(r1.alphabet, images_on(draw, r1.alphabet))


@settings(max_examples=100, deadline=None)
@given(rule_pairs())
def test_composition_multiplies_matrices(pair):
    r1, r2 = pair
    m = substitution_matrix(compose(r1, r2))
    np.testing.assert_array_equal(m, substitution_matrix(r2) @ substitution_matrix(r1))


@settings(max_examples=100, deadline=None)
@given(rules(), st.integers(0, 4))
def test_counts_follow_matrix(rule, steps):
    seed = rule.alphabet[0]
    word = substitute(rule, seed, steps)
    np.testing.assert_array_equal(letter_counts(word, rule.alphabet),
                                  count_vector(rule, seed, steps))


class TestPrimitivity:
    @pytest.mark.parametrize("m,expected", [
        ([[1, 1], [1, 0]], True),
        ([[1, 0], [0, 1]], False),
        ([[0, 1], [1, 0]], False),
        ([[1, 1], [0, 1]], False),
        ([[0, 1, 0], [0, 0, 1], [1, 1, 0]], True),
    ])
    def test_cases(self, m, expected):
        assert is_primitive(m) is expected

    def test_wielandt_bound_is_sharp(self):
        n = 4
        m = np.zeros((n, n), dtype=int)
        for i in range(n - 1):
            m[i, i + 1] = 1
        m[n - 1, 0] = m[n - 1, 1] = 1
        assert is_primitive(m)
        assert not is_primitive(m, k_cap=n * n - 2 * n + 1)


class TestPerronFrobenius:
    def test_golden(self):
        lam, pisot = perron_frobenius([[1, 1], [1, 0]])
        assert abs(lam - GOLDEN) < 1e-12
        assert pisot

    def test_silver(self):
        lam, pisot = perron_frobenius(substitution_matrix(SILVER))
        assert abs(lam - (1 + 2**0.5)) < 1e-12
        assert pisot

    def test_period_doubling_not_pisot(self):
        lam, pisot = perron_frobenius([[1, 1], [2, 0]])
        assert abs(lam - 2) < 1e-12
        assert not pisot

    def test_thue_morse(self):
        # conjugate eigenvalue 0, so the integer 2 counts as Pisot
        lam, pisot = perron_frobenius([[1, 1], [1, 1]])
        assert abs(lam - 2) < 1e-12
        assert pisot

    def test_not_primitive(self):
        with pytest.raises(NotPrimitive):
            perron_frobenius(np.eye(2))

    def test_growth_rate(self):
        counts = [count_vector(FIBONACCI, "a", n).sum() for n in (24, 25)]
        assert abs(counts[1] / counts[0] - perron_frobenius(substitution_matrix(FIBONACCI))[0]) < 1e-9


class TestGenerationParity:
    @pytest.mark.parametrize("parity, expected", [("all", [0, 1, 2, 3, 4, 5]),
                                                  ("even", [0, 2, 4]), ("odd", [1, 3, 5])])
    def test_subsequences(self, parity, expected):
        assert generations_with_parity(5, parity) == expected

    def test_unknown(self):
        with pytest.raises(ConfigError):
            generations_with_parity(5, "second")
