import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasispec.errors import (
    DegenerateFit,
    DimensionZero,
    EmptyAfterWindow,
    InsufficientSamples,
    IterationLimit,
    NonHermitianInput,
    NonPositiveWeight,
)
from quasispec.numerics import (
    banded_hermitian_eigenvalues,
    cyclic_tridiagonal_eigenvalues,
    block_tridiagonal_inertia,
    fit_exponential_envelope,
    generalized_hermitian_eigenvalues,
    hausdorff_distance,
    hermitian_eigenvalues,
    inverse_iteration,
    tridiagonal_eigenvalues,
    tridiagonal_eigenvectors,
    tridiagonal_form,
)
from quasispec.numerics import eigen

from conftest import random_hermitian


def charpoly(m):
    """Faddeev-LeVerrier coefficients of det(lambda I - m), highest degree first."""
    n = m.shape[0]
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(m)
    for k in range(1, n + 1):
        mk = m @ mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(m @ mk) / k)
    return np.array(coeffs).real


def bisection_roots(coeffs, lo, hi, samples=20001):
    """Real roots of a polynomial with only real roots, by sign changes and bisection."""
    x = np.linspace(lo, hi, samples)
    p = np.polyval(coeffs, x)
    roots = []
    for i in np.flatnonzero(np.sign(p[:-1]) != np.sign(p[1:])):
        a, b = x[i], x[i + 1]
        for _ in range(100):
            mid = 0.5 * (a + b)
            if np.sign(np.polyval(coeffs, mid)) == np.sign(np.polyval(coeffs, a)):
                a = mid
            else:
                b = mid
        roots.append(0.5 * (a + b))
    return np.array(roots)


def periodic_laplacian(n, phase=1.0):
    m = 2 * np.eye(n, dtype=complex) - np.eye(n, k=1) - np.eye(n, k=-1)
    m[n - 1, 0] -= phase
    m[0, n - 1] -= np.conj(phase)
    return m


class TestHermitianEigenvalues:
    def test_identity(self):
        np.testing.assert_allclose(hermitian_eigenvalues(np.eye(3)), [1, 1, 1], atol=1e-14)

    def test_pauli_x(self):
        np.testing.assert_allclose(hermitian_eigenvalues([[0, 1], [1, 0]]), [-1, 1], atol=1e-14)

    def test_random_4x4_against_characteristic_polynomial(self, rng):
        for _ in range(5):
            m = random_hermitian(rng, 4)
            bound = np.abs(m).sum(axis=1).max() + 1
            roots = bisection_roots(charpoly(m), -bound, bound)
            assert roots.size == 4
            np.testing.assert_allclose(hermitian_eigenvalues(m), roots, atol=1e-9)

    @pytest.mark.parametrize("n", [1, 2, 3, 10, 57, 150])
    def test_random_dense_against_lapack(self, rng, n):
        m = random_hermitian(rng, n)
        np.testing.assert_allclose(hermitian_eigenvalues(m), np.linalg.eigvalsh(m),
                                   atol=1e-11 * max(1, np.abs(m).max() * n))

    def test_bloch_chain_takes_band_route(self, rng):
        n = 200
        m = periodic_laplacian(n, np.exp(0.7j)) + np.diag(rng.normal(size=n))
        perm = eigen._band_ordering(m)
        assert eigen.bandwidth(m[np.ix_(perm, perm)]) <= 2
        np.testing.assert_allclose(hermitian_eigenvalues(m), np.linalg.eigvalsh(m), atol=1e-12)

    def test_banded_matrix(self, rng):
        n, b = 120, 4
        m = np.zeros((n, n), dtype=complex)
        for k in range(b + 1):
            m += np.diag(rng.normal(size=n - k) + 1j * rng.normal(size=n - k), -k)
        m = m + m.conj().T
        np.testing.assert_allclose(hermitian_eigenvalues(m), np.linalg.eigvalsh(m), atol=1e-11)

    def test_window_matches_full_solve(self, rng):
        m = random_hermitian(rng, 40)
        full = hermitian_eigenvalues(m)
        part = hermitian_eigenvalues(m, window=(-2.0, 3.0))
        np.testing.assert_allclose(part, full[(full >= -2) & (full < 3)], atol=1e-11)

    def test_sorted_and_real(self, rng):
        ev = hermitian_eigenvalues(random_hermitian(rng, 30))
        assert ev.dtype == float
        assert np.all(np.diff(ev) >= 0)

    def test_non_hermitian_rejected(self):
        with pytest.raises(NonHermitianInput):
            hermitian_eigenvalues([[0, 1], [0, 0]])

    def test_non_square_rejected(self):
        with pytest.raises(NonHermitianInput):
            hermitian_eigenvalues(np.zeros((2, 3)))

    def test_empty_rejected(self):
        with pytest.raises(DimensionZero):
            hermitian_eigenvalues(np.zeros((0, 0)))

    def test_asymmetry_tolerance(self):
        m = np.array([[1.0, 2.0], [2.0 + 5e-13, 1.0]])
        hermitian_eigenvalues(m)
        with pytest.raises(NonHermitianInput):
            hermitian_eigenvalues(np.array([[1.0, 2.0], [2.0 + 1e-10, 1.0]]))

    def test_iteration_limit(self, monkeypatch):
        from quasispec.numerics import _kernels
        monkeypatch.setattr(_kernels, "tql_eigenvalues", lambda d, e: 0)
        with pytest.raises(IterationLimit):
            tridiagonal_eigenvalues(np.ones(3), np.ones(2))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(0, 2**31 - 1))
def test_trace_invariant(n, seed):
    m = random_hermitian(np.random.default_rng(seed), n)
    ev = hermitian_eigenvalues(m)
    assert abs(ev.sum() - np.trace(m).real) <= 1e-9 * max(1.0, np.abs(ev).sum())


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
def test_two_by_two_closed_form(a, d, br, bi):
    m = np.array([[a, br + 1j * bi], [br - 1j * bi, d]])
    mean, rad = (a + d) / 2, np.sqrt(((a - d) / 2) ** 2 + br**2 + bi**2)
    np.testing.assert_allclose(hermitian_eigenvalues(m), [mean - rad, mean + rad], atol=1e-12)


class TestBandedStorage:
    @pytest.mark.parametrize("n,b", [(5, 1), (12, 2), (40, 3), (90, 6), (30, 12)])
    def test_against_lapack(self, rng, n, b):
        m = np.zeros((n, n), dtype=complex)
        for k in range(1, b + 1):
            m += np.diag(rng.normal(size=n - k) + 1j * rng.normal(size=n - k), -k)
        m = m + m.conj().T + np.diag(rng.normal(size=n))
        ab = np.array([np.concatenate([np.diagonal(m, -k), np.zeros(k)]) for k in range(b + 1)])
        np.testing.assert_allclose(banded_hermitian_eigenvalues(ab), np.linalg.eigvalsh(m),
                                   atol=1e-12 * n)

    def test_interleaved_order_has_bandwidth_two(self):
        for n in (3, 8, 9):
            pos = eigen.cyclic_order(n)
            assert sorted(pos) == list(range(n))
            assert abs(pos[0] - pos[-1]) <= 2
            assert np.all(np.abs(np.diff(pos)) <= 2)

    @pytest.mark.parametrize("n", [3, 4, 7, 8, 64, 301])
    def test_cyclic_against_dense(self, rng, n):
        d = rng.normal(size=n)
        off = rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)
        corner = 1.3 * np.exp(0.8j)
        w = rng.uniform(0.5, 2.0, n)
        m = np.diag(d).astype(complex)
        m[np.arange(1, n), np.arange(n - 1)] += off
        m[n - 1, 0] += corner
        m = m + np.tril(m, -1).conj().T
        r = 1 / np.sqrt(w)
        np.testing.assert_allclose(cyclic_tridiagonal_eigenvalues(d, off, corner, w),
                                   np.linalg.eigvalsh(m * r[:, None] * r[None, :]), atol=1e-12)
        full = np.linalg.eigvalsh(m)
        part = cyclic_tridiagonal_eigenvalues(d, off, corner, window=(-0.5, 0.5))
        np.testing.assert_allclose(part, full[(full >= -0.5) & (full < 0.5)], atol=1e-12)

    def test_periodic_laplacian(self):
        n, phase = 50, np.exp(0.9j)
        got = cyclic_tridiagonal_eigenvalues(np.full(n, 2.0), -np.ones(n - 1), -phase)
        np.testing.assert_allclose(got, hermitian_eigenvalues(periodic_laplacian(n, phase)),
                                   atol=1e-12)

    def test_rejects_complex_diagonal(self):
        with pytest.raises(NonHermitianInput):
            banded_hermitian_eigenvalues(np.array([[1j, 1.0], [0.5, 0.0]]))


class TestTridiagonal:
    def test_form_preserves_spectrum(self, rng):
        m = random_hermitian(rng, 25)
        d, e = tridiagonal_form(m)
        assert e.shape == (24,)
        t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
        np.testing.assert_allclose(np.linalg.eigvalsh(t), np.linalg.eigvalsh(m), atol=1e-11)

    def test_eigenvectors(self, rng):
        d, e = rng.normal(size=50), rng.normal(size=49)
        lam = tridiagonal_eigenvalues(d, e)[[0, 10, 49]]
        v = tridiagonal_eigenvectors(d, e, lam)
        t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
        assert np.linalg.norm(t @ v - v * lam) < 1e-10

    def test_inverse_iteration(self, rng):
        m = random_hermitian(rng, 20)
        ev = np.linalg.eigvalsh(m)
        v = inverse_iteration(m, ev[3])
        assert np.linalg.norm(m @ v - ev[3] * v) < 1e-9


class TestGeneralized:
    def test_unit_weight(self):
        np.testing.assert_allclose(generalized_hermitian_eigenvalues(np.eye(4), np.ones(4)),
                                   np.ones(4))

    def test_diagonal(self):
        np.testing.assert_allclose(
            generalized_hermitian_eigenvalues(np.diag([4.0, 9.0]), [1.0, 9.0]), [1, 4])

    def test_weight_scaling(self):
        lap = periodic_laplacian(5)
        np.testing.assert_allclose(generalized_hermitian_eigenvalues(lap, 2 * np.ones(5)),
                                   hermitian_eigenvalues(lap) / 2, atol=1e-13)

    def test_ones_equals_standard(self, rng):
        m = random_hermitian(rng, 12)
        np.testing.assert_allclose(generalized_hermitian_eigenvalues(m, np.ones(12)),
                                   hermitian_eigenvalues(m), atol=1e-12)

    def test_against_scipy_pencil(self, rng):
        from scipy.linalg import eigh
        m = random_hermitian(rng, 15)
        w = rng.uniform(0.5, 3.0, 15)
        np.testing.assert_allclose(generalized_hermitian_eigenvalues(m, w),
                                   eigh(m, np.diag(w), eigvals_only=True), atol=1e-10)

    @pytest.mark.parametrize("w", [[1.0, 0.0], [1.0, -2.0], [1.0]])
    def test_bad_weights(self, w):
        with pytest.raises(NonPositiveWeight):
            generalized_hermitian_eigenvalues(np.eye(2), w)


class TestBlockInertia:
    def test_against_dense(self, rng):
        nb, s = 6, 5
        diag = [random_hermitian(rng, s) for _ in range(nb)]
        coup = [rng.normal(size=(s, s)) + 1j * rng.normal(size=(s, s)) for _ in range(nb - 1)]
        full = np.zeros((nb * s, nb * s), dtype=complex)
        for j, b in enumerate(diag):
            full[j * s:(j + 1) * s, j * s:(j + 1) * s] = b
        for j, c in enumerate(coup):
            full[(j + 1) * s:(j + 2) * s, j * s:(j + 1) * s] = c
            full[j * s:(j + 1) * s, (j + 1) * s:(j + 2) * s] = c.conj().T
        ev = np.linalg.eigvalsh(full)
        for sigma in (-5.0, -0.3, 0.0, 2.2, 8.0):
            assert block_tridiagonal_inertia(diag, coup, sigma) == np.count_nonzero(ev < sigma)


class TestHausdorff:
    def test_equal_sets(self):
        assert hausdorff_distance([1, 2, 3], [1, 2, 3]) == 0

    def test_points(self):
        assert hausdorff_distance([0], [1], window=(-10, 10)) == 1

    def test_exhaustive_example(self):
        a, b = [0, 5], [1, 4]
        brute = max(max(min(abs(x - y) for y in b) for x in a),
                    max(min(abs(x - y) for x in a) for y in b))
        assert hausdorff_distance(a, b, window=(0, 5)) == brute == 1

    def test_window_applies(self):
        assert hausdorff_distance([0, 100], [0.5], window=(-1, 1)) == 0.5

    def test_empty_after_window(self):
        with pytest.raises(EmptyAfterWindow):
            hausdorff_distance([5], [0], window=(-1, 1))

    @settings(max_examples=200, deadline=None)
    @given(*[st.lists(st.floats(-5, 5), min_size=1, max_size=6) for _ in range(3)])
    def test_metric_properties(self, a, b, c):
        dab = hausdorff_distance(a, b)
        assert dab == hausdorff_distance(b, a)
        assert dab >= 0
        assert (dab == 0) == (set(a) == set(b))
        assert hausdorff_distance(a, c) <= dab + hausdorff_distance(b, c) + 1e-12


class TestEnvelopeFit:
    def test_exact_exponential(self):
        x = np.arange(11.0)
        rate, _ = fit_exponential_envelope(x, np.exp(-0.5 * x))
        assert abs(rate + 0.5) < 1e-6

    def test_constant(self):
        rate, _ = fit_exponential_envelope(np.arange(10.0), np.full(10, 3.0))
        assert abs(rate) < 1e-12

    def test_modulated(self):
        x = np.linspace(0, 30, 3001)
        rate, _ = fit_exponential_envelope(x, np.exp(-0.3 * x) * (2 + np.cos(7 * x)))
        assert abs(rate + 0.3) < 0.02

    def test_oscillating_sign(self):
        x = np.linspace(0, 40, 8001)
        rate, _ = fit_exponential_envelope(x, np.exp(-0.1 * x) * np.cos(3 * x))
        assert abs(rate + 0.1) < 1e-3

    def test_too_few(self):
        with pytest.raises(InsufficientSamples):
            fit_exponential_envelope([0, 1], [1, 1])

    def test_zero_amplitudes_do_not_count(self):
        with pytest.raises(InsufficientSamples):
            fit_exponential_envelope([0, 1, 2], [1, 0, 1])

    def test_degenerate(self):
        with pytest.raises(DegenerateFit):
            fit_exponential_envelope([1, 1, 1], [1, 2, 3])
