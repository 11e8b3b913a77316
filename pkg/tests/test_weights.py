import math

import numpy as np
import pytest

from kuznetsov.analysis.weights import TestWeight, WeightKind, bump, gaussian_weight
from kuznetsov.errors import DomainError


class TestGaussian:
    def test_values_on_axis(self):
        f = gaussian_weight(3.0)
        assert f(2j) == pytest.approx(math.exp(-4.0 / 9.0))
        assert f.kind is WeightKind.SPECTRAL
        assert f.decay_rate == math.inf

    def test_even(self):
        assert gaussian_weight(2.0).check() < 1e-12

    def test_cutoff_makes_weight_negligible(self):
        f = gaussian_weight(2.0)
        assert abs(f(1j * f.cutoff)) < 1e-19

    def test_rejects_scale(self):
        with pytest.raises(DomainError):
            gaussian_weight(0.0)


class TestBump:
    def test_peak_and_support(self):
        phi = bump(1.0, 2.0)
        assert phi(math.sqrt(2.0)) == pytest.approx(math.exp(-1.0))
        assert phi(1.0) == 0.0
        assert phi(2.0) == 0.0
        assert phi(0.5) == 0.0
        assert phi.support == (1.0, 2.0)

    def test_vanishes_off_support(self):
        assert bump(1.0, 2.0).check(np.random.default_rng(1), 64) == 0.0

    def test_vectorized(self):
        phi = bump(1.0, 4.0)
        xs = np.array([0.5, 1.5, 2.0, 3.5, 5.0])
        assert np.allclose(phi(xs), [phi(float(x)) for x in xs])
        assert isinstance(phi(2.0), float)

    def test_symmetric_in_log(self):
        phi = bump(1.0, 4.0)
        assert phi(1.5) == pytest.approx(phi(4.0 / 1.5), rel=1e-14)

    @pytest.mark.parametrize("lo, hi", [(0.0, 1.0), (2.0, 1.0), (1.0, 1.0)])
    def test_rejects_support(self, lo, hi):
        with pytest.raises(DomainError):
            bump(lo, hi)


class TestTestWeight:
    def test_geometric_needs_support(self):
        with pytest.raises(DomainError):
            TestWeight(WeightKind.GEOMETRIC, lambda x: x, name="bad")

    def test_spectral_needs_cutoff(self):
        with pytest.raises(DomainError):
            TestWeight(WeightKind.SPECTRAL, lambda nu: nu, name="bad")

    def test_kind_from_string(self):
        weight = TestWeight("spectral", lambda nu: np.cos(nu), name="cos", cutoff=5.0)
        assert weight.kind is WeightKind.SPECTRAL

    def test_odd_weight_detected(self):
        weight = TestWeight(WeightKind.SPECTRAL, lambda nu: nu * np.exp(nu * nu), name="odd", cutoff=6.0)
        assert weight.check() > 1e-3
