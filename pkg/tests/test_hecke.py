import numpy as np
import pytest

from kuznetsov.analysis import hecke, lie
from kuznetsov.analysis.group import iwasawa_decompose, random_element
from kuznetsov.errors import DomainError


@pytest.fixture
def point():
    return random_element(np.random.default_rng(7))


class TestHeckeOperator:
    def test_identity(self, point):
        f = lie.phi_function(1, 0.4j)
        assert hecke.hecke_operator(f, 1, point) == pytest.approx(f.at(iwasawa_decompose(point)), rel=1e-12)

    @pytest.mark.parametrize("p", [0, 2])
    @pytest.mark.parametrize("n", [2, 6, 12])
    def test_eisenstein_eigenvalue(self, point, p, n):
        nu = 0.3 + 1.7j
        f = lie.phi_function(p, nu)
        expected = hecke.eisenstein_hecke_eigenvalue(nu, n) * f.at(iwasawa_decompose(point))
        assert abs(hecke.hecke_operator(f, n, point) - expected) < 1e-12 * abs(expected)

    def test_rejects_zero_index(self, point):
        with pytest.raises(DomainError):
            hecke.hecke_operator(lie.phi_function(0, 0.5j), 0, point)


class TestRelations:
    def test_eisenstein_eigenvalues_are_hecke(self):
        t = {n: hecke.eisenstein_hecke_eigenvalue(2.1j, n).real for n in range(1, 37)}
        for m, n in [(2, 3), (2, 4), (4, 6), (6, 6)]:
            assert hecke.hecke_relation_residual(t, m, n) < 1e-12

    def test_multiplicative_extension(self):
        t = hecke.multiplicative_extension({2: 0.5, 3: -1.2, 5: 0.1, 7: 1.9}, 10)
        assert t[4] == pytest.approx(0.5**2 - 1)
        assert t[8] == pytest.approx(0.5 * (0.5**2 - 1) - 0.5)
        assert t[6] == pytest.approx(-0.6)
        assert hecke.hecke_relation_residual(t, 2, 4) < 1e-14

    def test_detects_broken_relation(self):
        t = hecke.multiplicative_extension({2: 0.5, 3: -1.2, 5: 0.1}, 6)
        t[6] += 1e-3
        assert hecke.hecke_relation_residual(t, 2, 3) == pytest.approx(1e-3)

    def test_missing_value(self):
        with pytest.raises(DomainError):
            hecke.hecke_relation_residual({2: 0.1}, 2, 3)

    def test_missing_prime(self):
        with pytest.raises(DomainError):
            hecke.multiplicative_extension({2: 0.5}, 3)

    def test_bound_constant(self):
        assert hecke.bound_constant({1: 1.0, 4: -4.0}, 0.5) == pytest.approx(2.0)
