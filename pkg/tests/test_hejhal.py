import math

import mpmath
import numpy as np
import pytest

from kuznetsov.analysis import hejhal
from kuznetsov.errors import DomainError
from kuznetsov.io import spectra
from kuznetsov.io.spectra import Normalization

FIRST_ODD = 9.53369526135355755
FIRST_EVEN = 13.7797513518907389


def reference_kbessel(kappa, x):
    with mpmath.workdps(40):
        value = mpmath.besselk(1j * kappa, x) * mpmath.exp(mpmath.pi * kappa / 2)
        return float(mpmath.re(value))


@pytest.fixture(scope="module")
def solver():
    return hejhal.HejhalSolver()


class TestKBessel:
    @pytest.mark.parametrize("kappa, x", [(9.5337, 3.0), (9.5337, 9.0), (27.0, 5.0), (27.0, 27.0), (13.78, 13.0)])
    def test_oscillatory_region(self, kappa, x):
        assert abs(hejhal.kbessel_scaled(kappa, x) - reference_kbessel(kappa, x)) < 1e-10

    @pytest.mark.parametrize("kappa, x", [(9.5337, 25.0), (27.0, 60.0), (0.5, 2.0), (3.9, 40.0)])
    def test_decaying_region(self, kappa, x):
        assert hejhal.kbessel_scaled(kappa, x) == pytest.approx(reference_kbessel(kappa, x), rel=1e-9)

    def test_array_matches_scalar(self):
        x = np.array([[30.0, 2.0], [11.0, 7.5]])
        values = hejhal.kbessel_scaled(12.0, x)
        assert values.shape == (2, 2)
        for index in np.ndindex(x.shape):
            assert values[index] == pytest.approx(hejhal.kbessel_scaled(12.0, x[index]), abs=1e-13)

    def test_even_in_order(self):
        assert hejhal.kbessel_scaled(-5.0, 4.0) == hejhal.kbessel_scaled(5.0, 4.0)

    def test_rejects_nonpositive_argument(self):
        with pytest.raises(DomainError):
            hejhal.kbessel_scaled(5.0, np.array([1.0, 0.0]))


class TestPullback:
    def test_inversion(self):
        x, y = hejhal.pullback(0.0, 0.5)
        assert (float(x), float(y)) == pytest.approx((0.0, 2.0))

    def test_translation_after_inversion(self):
        x, y = hejhal.pullback(0.3, 0.4)
        assert (float(x), float(y)) == pytest.approx((-0.2, 1.6))

    def test_lands_in_fundamental_domain(self):
        rng = np.random.default_rng(5)
        x, y = hejhal.pullback(rng.uniform(-3, 3, 200), rng.uniform(0.01, 1.0, 200))
        assert np.all(np.abs(x) <= 0.5)
        assert np.all(x * x + y * y >= 1.0 - 1e-12)

    def test_fixes_points_of_the_domain(self):
        x, y = hejhal.pullback([0.1, -0.4], [1.2, 3.0])
        assert x.tolist() == pytest.approx([0.1, -0.4])
        assert y.tolist() == pytest.approx([1.2, 3.0])

    def test_rejects_lower_half_plane(self):
        with pytest.raises(DomainError):
            hejhal.pullback(0.1, -1.0)


class TestCollocation:
    def test_points_lie_above_the_horocycle(self):
        grid = hejhal.collocation(0.45, 30)
        assert grid.points == 30
        assert grid.x[0] == pytest.approx(1 / 120)
        assert np.all((grid.x > 0) & (grid.x < 0.5))
        assert np.all(grid.y_pull > 0.45)

    def test_rejects_height_inside_the_domain(self):
        with pytest.raises(DomainError):
            hejhal.collocation(0.9, 30)


class TestSolver:
    def test_rejects_bad_heights(self):
        with pytest.raises(DomainError):
            hejhal.HejhalSolver(heights=(0.5, 0.5))
        with pytest.raises(DomainError):
            hejhal.HejhalSolver(heights=(0.5, 0.87))

    def test_rejects_bad_parity(self, solver):
        with pytest.raises(DomainError):
            solver.coefficients(FIRST_ODD, 0)

    def test_truncation_grows_with_kappa(self, solver):
        low, high = solver.terms(5.0), solver.terms(25.0)
        assert low >= 10
        assert high > low
        assert 2 * math.pi * high * 0.45 >= 25.0

    def test_defect_vanishes_at_eigenvalue(self, solver):
        assert abs(solver.defect(FIRST_ODD, -1)) < 1e-7
        assert solver.defect(FIRST_ODD - 0.01, -1) * solver.defect(FIRST_ODD + 0.01, -1) < 0

    def test_coefficients_are_hecke(self, solver):
        c = solver.coefficients(FIRST_ODD, -1)[0]
        assert c[0] == 1.0
        assert abs(c[1] * c[2] - c[5]) < 1e-7
        assert abs(c[1] ** 2 - 1.0 - c[3]) < 1e-7
        assert all(abs(c[p - 1]) < 2.0 for p in (2, 3, 5, 7))

    @pytest.mark.slow
    def test_search_finds_first_odd_form(self, solver):
        (found,) = solver.search(9.4, 9.7)
        assert found.epsilon == -1
        assert found.kappa == pytest.approx(FIRST_ODD, abs=1e-7)
        assert found.discrepancy < 1e-6

    @pytest.mark.slow
    def test_search_finds_first_even_form(self, solver):
        (found,) = solver.search(13.7, 13.85)
        assert found.epsilon == 1
        assert found.kappa == pytest.approx(FIRST_EVEN, abs=1e-7)

    @pytest.mark.slow
    def test_nothing_below_first_form(self, solver):
        assert solver.search(4.0, 9.4) == []


class TestNorm:
    @pytest.fixture(scope="class")
    def first(self, solver):
        return solver.refine(FIRST_ODD - 0.01, FIRST_ODD + 0.01, -1)

    def test_refined(self, first):
        assert first is not None
        assert first.kappa == pytest.approx(FIRST_ODD, abs=1e-7)

    def test_stable_under_more_nodes(self, solver, first):
        norm = solver.petersson_norm(first)
        finer = solver.petersson_norm(first, nodes=96, cusp_nodes=320)
        assert norm > 0.0
        assert norm == pytest.approx(finer, rel=1e-8)

    def test_kuznetsov_weight(self, solver, first):
        alpha = hejhal.kuznetsov_weight(solver, first)
        norm = solver.petersson_norm(first)
        assert alpha == pytest.approx(1.0 / (2.0 * norm), rel=1e-12)


class TestTabulate:
    @pytest.mark.slow
    def test_dataset_of_one_form(self):
        data = hejhal.tabulate(9.4, 9.7)
        (rec,) = data.forms
        assert rec.epsilon == -1
        assert rec.normalization is Normalization.KUZNETSOV_ALPHA
        assert rec.t(4) == pytest.approx(rec.t(2) ** 2 - 1)
        assert set(rec.hecke) == set(range(2, 11))
        assert data.manifest.source == "hejhal"
        assert data.manifest.kappa_max == 9.7
        assert data.manifest.N == 10
        assert data.manifest.precision < 1e-5
        assert spectra.validate(data).passed

    def test_rejects_unchecked_primes(self):
        with pytest.raises(DomainError):
            hejhal.tabulate(9.4, 9.7, hecke_limit=11)
