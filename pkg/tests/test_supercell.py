import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasispec.contfrac import RationalApproximant, golden_approximants
from quasispec.errors import ConfigError, GridTooCoarse
from quasispec.potentials import DEFAULT_TILES, Laminate, constant_field, sin2d
from quasispec.supercell import (
    BlochProblem,
    GapSet,
    alpha_grid,
    assemble_bloch,
    band_diagram,
    bloch_eigenvalues,
    extract_gaps,
    free_dispersion,
    intersect_gaps,
    laminate_band_diagram,
    shared_gaps,
)
from quasispec.tiling import fibonacci_word


def discrete_free(alpha, period, n):
    h = period / n
    m = np.arange(n)
    return np.sort(4 / h**2 * np.sin((alpha * period + 2 * np.pi * m) / (2 * n)) ** 2)


class TestBlochMatrix:
    def test_hermitian_and_corners(self):
        p = BlochProblem(np.zeros(10), 2.0, alpha=0.7)
        m = assemble_bloch(p)
        np.testing.assert_allclose(m, m.conj().T)
        c = 1 / p.h**2
        assert abs(m[9, 0] + c * np.exp(1.4j)) < 1e-9

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0, 2 * np.pi), st.integers(8, 60), st.floats(0.5, 5))
    def test_free_circulant_exact(self, alpha, n, period):
        ev = bloch_eigenvalues(BlochProblem(np.zeros(n), period, alpha))
        expected = discrete_free(alpha, period, n)
        np.testing.assert_allclose(ev, expected, atol=1e-9 * expected.max())

    def test_free_continuum_dispersion(self):
        period, n = 2.0, 400
        for alpha in np.linspace(0, np.pi / period, 5):
            ev = bloch_eigenvalues(BlochProblem(np.zeros(n), period, alpha))[:8]
            exact = free_dispersion(alpha, period, 8)
            assert np.all(np.abs(ev - exact) <= 1e-3 * np.maximum(exact, 1.0))

    def test_constant_shift(self, rng):
        v = rng.normal(size=40)
        a = bloch_eigenvalues(BlochProblem(v, 3.0, 0.4))
        b = bloch_eigenvalues(BlochProblem(v + 2.5, 3.0, 0.4))
        np.testing.assert_allclose(b, a + 2.5, atol=1e-10)

    def test_time_reversal(self, rng):
        v = rng.normal(size=30)
        a = bloch_eigenvalues(BlochProblem(v, 3.0, 0.4))
        b = bloch_eigenvalues(BlochProblem(v, 3.0, -0.4))
        c = bloch_eigenvalues(BlochProblem(v, 3.0, 2 * np.pi / 3.0 - 0.4))
        np.testing.assert_allclose(a, b, atol=1e-10)
        np.testing.assert_allclose(a, c, atol=1e-10)

    def test_weight_scaling(self):
        free = bloch_eigenvalues(BlochProblem(np.zeros(20), 1.0, 0.3))
        weighted = bloch_eigenvalues(BlochProblem(np.zeros(20), 1.0, 0.3, np.full(20, 4.0)))
        np.testing.assert_allclose(weighted, free / 4, atol=1e-10)

    def test_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            BlochProblem(np.zeros(5), 1.0)

    def test_alpha_grid(self):
        g = alpha_grid(2.0, 5)
        assert g[0] == 0 and abs(g[-1] - np.pi) < 1e-15 and g.size == 5
        with pytest.raises(ConfigError):
            alpha_grid(1.0, 1)


class TestBandDiagram:
    def test_constant_field_bands(self):
        bd = band_diagram(constant_field(1.5), RationalApproximant(3, 2), alpha_count=9,
                          n_bands=4, points_per_unit=200)
        assert bd.period == 1.0
        for a, row in zip(bd.alphas, bd.bands):
            exact = free_dispersion(a, 1.0, 4) + 1.5
            assert np.all(np.abs(row - exact) <= 1e-3 * exact)

    def test_periodicity_in_alpha(self):
        bd = band_diagram(sin2d(), RationalApproximant(3, 2), alpha_count=5, n_bands=6)
        np.testing.assert_allclose(bd.bands[0], bd.bands[-1], atol=1e-9)

    def test_richardson_ratio(self):
        a = RationalApproximant(3, 2)
        lam = [band_diagram(sin2d(), a, alpha_count=2, n_bands=6, points_per_unit=ppu).bands[0]
               for ppu in (20, 40, 80)]
        ratio = (lam[0] - lam[1]) / (lam[1] - lam[2])
        assert np.all(np.abs(ratio - 4) < 0.8)

    def test_band_count_grows_with_level(self):
        counts = []
        for a in golden_approximants(7)[2:]:
            bd = band_diagram(sin2d(), a, alpha_count=2, points_per_unit=20)
            counts.append(np.count_nonzero(bd.bands[0] < 15.0))
        assert counts == sorted(counts)
        assert counts[-1] > counts[0]

    def test_bands_narrow_as_level_grows(self):
        widths, counts = [], []
        for a in golden_approximants(6)[2:]:
            bd = band_diagram(sin2d(), a, alpha_count=17, n_bands=20, points_per_unit=40)
            keep = bd.bands.max(axis=0) < 20.0
            widths.append(np.ptp(bd.bands[:, keep], axis=0).mean())
            counts.append(int(keep.sum()))
        assert counts == sorted(counts) and len(set(counts)) == len(counts)
        assert all(w1 > w2 for w1, w2 in zip(widths, widths[1:]))

    def test_bands_are_lipschitz_in_alpha(self):
        # Hellmann-Feynman: |dE/dalpha| <= 2 sqrt(E - min V), min V = -2 for sin2d
        bd = band_diagram(sin2d(), RationalApproximant(8, 5), alpha_count=33, n_bands=12,
                          points_per_unit=40)
        keep = bd.bands.max(axis=0) < 20.0
        b = bd.bands[:, keep]
        slope = np.abs(np.diff(b, axis=0)).max(axis=0) / np.diff(bd.alphas)[0]
        assert np.all(slope <= 2 * np.sqrt(b.max(axis=0) + 2.0))

    def test_laminate_homogeneous(self):
        tiles = {"a": (1.0, 2.0), "b": (1.0, 2.0)}
        bd = laminate_band_diagram(Laminate(tiles, "ab"), alpha_count=3, n_bands=3,
                                   points_per_unit=200)
        for a, row in zip(bd.alphas, bd.bands):
            exact = 4 * free_dispersion(a, 2.0, 3)
            assert np.all(np.abs(row - exact) <= 1e-3 * np.maximum(exact, 1))

    def test_laminate_has_gaps(self):
        bd = laminate_band_diagram(Laminate(DEFAULT_TILES, fibonacci_word(3)), alpha_count=3,
                                   n_bands=8, points_per_unit=40)
        assert len(extract_gaps(bd, window=(0, 10))) >= 1


class TestGaps:
    def test_free_has_no_gaps(self):
        bd = band_diagram(constant_field(0.0), RationalApproximant(3, 2), alpha_count=17,
                          n_bands=10, points_per_unit=60)
        assert len(extract_gaps(bd, window=(0.5, 200))) == 0

    def test_lowest_gap_of_sin2d(self):
        bd = band_diagram(sin2d(), RationalApproximant(3, 2), alpha_count=33, n_bands=20)
        gaps = extract_gaps(bd, window=(-5, 30))
        lowest = bd.bands[:, 0].min()
        assert gaps.intervals[0][0] == -5 and abs(gaps.intervals[0][1] - lowest) < 1e-3
        # every band sample avoids every gap
        for v in bd.samples():
            assert not gaps.contains(v)

    def test_gapset_validation(self):
        with pytest.raises(ConfigError):
            GapSet([(1, 1)])
        with pytest.raises(ConfigError):
            GapSet([(0, 2), (1, 3)])
        g = GapSet([(2, 3), (0, 1)])
        assert g.intervals[0] == (0, 1)
        assert g.containing(2.5) == (2, 3) and g.containing(1.5) is None
        assert g.contains(0.5) and not g.contains(0.5, margin=0.6)

    def test_intersection(self):
        out = intersect_gaps([GapSet([(0, 2), (3, 5)]), GapSet([(1, 4)])])
        assert out.intervals == [(1, 2), (3, 4)]

    def test_shared_gaps_contained(self):
        levels = golden_approximants(5)[2:5]
        shared = shared_gaps(sin2d(), levels, window=(0, 20), alpha_count=3)
        assert len(shared) >= 1
        for a in levels:
            bd = band_diagram(sin2d(), a, alpha_count=9)
            for v in bd.samples((0, 20)):
                assert not shared.contains(v)

    def test_bad_window(self):
        bd = band_diagram(sin2d(), RationalApproximant(3, 2), alpha_count=3, n_bands=3)
        with pytest.raises(ConfigError):
            extract_gaps(bd, window=(2, 1))
