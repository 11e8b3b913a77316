import cmath
import math

import mpmath
import numpy as np
import pytest

from kuznetsov.analysis import jacquet, specfun
from kuznetsov.analysis.group import IwasawaCoords
from kuznetsov.errors import DomainError, PoleError


def closed_form_p0(nu, y):
    """A phi_0(a[y]) = 2 pi^(1/2 + nu) / Gamma(1/2 + nu) sqrt(y) K_nu(2 pi y)."""
    prefactor = 2.0 * cmath.exp((0.5 + nu) * math.log(math.pi)) * specfun.rgamma(0.5 + nu)
    return prefactor * math.sqrt(y) * specfun.bessel("K", nu, 2.0 * math.pi * y)


def relative(a, b):
    return abs(a - b) / abs(b)


class TestProfile:
    @pytest.mark.parametrize("nu", [0.5j, 3j, 0.25])
    @pytest.mark.parametrize("y", [0.1, 1.0, 5.0])
    def test_p0_closed_form(self, nu, y):
        value = jacquet.jacquet_profile(0, nu, 1, [y])[0]
        assert relative(value, closed_form_p0(nu, y)) < 1e-8

    def test_vectorized_matches_scalar(self):
        ys = [0.05, 0.3, 1.0, 2.5, 6.0]
        vector = jacquet.jacquet_profile(2, 1.2j, -1, ys)
        for y, value in zip(ys, vector):
            assert relative(value, jacquet.jacquet_profile(2, 1.2j, -1, [y])[0]) < 1e-9

    @pytest.mark.parametrize("y", [0.2, 0.8])
    def test_wedge_and_hairpin_agree(self, y):
        wedge = jacquet.jacquet_profile(1, 0.7j, 1, [y], route="wedge")[0]
        hairpin = jacquet.jacquet_profile(1, 0.7j, 1, [y], route="hairpin")[0]
        assert relative(wedge, hairpin) < 1e-8

    @pytest.mark.parametrize("p, nu, y", [(1, 0.4j, 0.7), (0, 1j, 1.3), (-2, 0.3, 0.5)])
    def test_line_route_cross_check(self, p, nu, y):
        line = jacquet.jacquet_profile(p, nu, 1, [y], route="line")[0]
        contour = jacquet.jacquet_profile(p, nu, 1, [y])[0]
        assert relative(line, contour) < 1e-8

    @pytest.mark.parametrize("y", [0.3, 1.0, 4.0])
    def test_lowest_discrete_vector(self, y):
        k = 6
        expected = (-1) ** k * (2 * math.pi) ** (2 * k) * y**k * math.exp(-2 * math.pi * y) / math.gamma(2 * k)
        value = jacquet.jacquet_profile(k, k - 0.5, 1, [y])[0]
        assert relative(value, expected) < 1e-12

    def test_residue_matches_contour(self):
        nu = 2.5
        residue = jacquet.jacquet_profile(4, nu, 1, [0.6], route="residue")[0]
        wedge = jacquet.jacquet_profile(4, nu, 1, [0.6], route="wedge")[0]
        assert relative(wedge, residue) < 1e-8

    def test_discrete_vanishes_on_negative_side(self):
        assert np.all(jacquet.jacquet_profile(5, 2.5, -1, [0.1, 1.0]) == 0)

    def test_x_and_theta_dependence(self):
        at = IwasawaCoords(0.3, 0.9, 0.4)
        value = jacquet.jacquet_phi(2, 0.5j, -1, at)
        profile = jacquet.jacquet_profile(2, 0.5j, -1, [0.9])[0]
        assert value == pytest.approx(profile * cmath.exp(4j * 0.4) * cmath.exp(-2j * math.pi * 0.3), rel=1e-12)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"p": 0, "nu": -0.7, "delta": 1, "ys": [1.0]},
            {"p": 0, "nu": 0.5j, "delta": 0, "ys": [1.0]},
            {"p": 0, "nu": 0.5j, "delta": 1, "ys": [0.0]},
            {"p": 0, "nu": 0.5j, "delta": 1, "ys": [1.0], "route": "residue"},
            {"p": 0, "nu": 0.5j, "delta": 1, "ys": [1.0], "route": "bogus"},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(DomainError):
            jacquet.jacquet_profile(**kwargs)

    def test_route_choice(self):
        assert jacquet.route_for(0.05, 0, 3j) == "wedge"
        assert jacquet.route_for(5.0, 0, 3j) == "hairpin"
        assert jacquet.route_for(5.0, 6, 5.5) == "residue"


class TestWhittaker:
    @pytest.mark.parametrize("mu, arg", [(0.25, 3.0), (0.6j, 1.0), (2j, 10.0)])
    def test_alpha_zero(self, mu, arg):
        expected = math.sqrt(arg / math.pi) * specfun.bessel("K", mu, arg / 2.0)
        assert relative(jacquet.whittaker_w(0, mu, arg), expected) < 1e-8

    @pytest.mark.parametrize("alpha, mu, arg", [(1, 0.5j, 2.0), (-2, 1.5j, 0.7), (3, 0.3, 4.0)])
    def test_against_mpmath(self, alpha, mu, arg):
        expected = complex(mpmath.whitw(alpha, mu, arg))
        assert relative(jacquet.whittaker_w(alpha, mu, arg), expected) < 1e-8

    def test_even_in_mu(self):
        assert jacquet.whittaker_w(1, -0.3, 2.0) == pytest.approx(jacquet.whittaker_w(1, 0.3, 2.0), rel=1e-12)

    def test_real_on_principal_series(self):
        value = jacquet.whittaker_w(2, 1.1j, 3.0)
        assert abs(value.imag) < 1e-8 * abs(value)

    def test_pole(self):
        with pytest.raises(PoleError):
            jacquet.whittaker_w(-3, 2.5, 1.0)


class TestOde:
    @pytest.mark.parametrize("p, nu, n, y", [(0, 0.3j, 1, 1.0), (2, 1j, -1, 0.5), (1, 2j, 2, 0.4)])
    def test_residual(self, p, nu, n, y):
        assert jacquet.whittaker_ode_residual(p, nu, n, y) < 1e-6

    def test_discrete_residual(self):
        assert jacquet.whittaker_ode_residual(6, 5.5, 1, 1.0) < 1e-8

    def test_zero_index(self):
        with pytest.raises(DomainError):
            jacquet.whittaker_ode_residual(0, 0.5j, 0, 1.0)


class TestLadder:
    def test_formula(self):
        assert jacquet.ladder_norm_ratio(1, 2j, "+") == pytest.approx(4 * (4 + 2.25))
        assert jacquet.ladder_norm_ratio(1, 2j, "-") == pytest.approx(4 * (4 + 0.25))

    def test_symmetry(self):
        assert jacquet.ladder_norm_ratio(3, 0.5j, "+") == jacquet.ladder_norm_ratio(-3, 0.5j, "-")

    def test_rejects_non_unitary(self):
        with pytest.raises(DomainError):
            jacquet.ladder_norm_ratio(0, 0.3)


class TestNearOrigin:
    @pytest.mark.parametrize("alpha, mu", [(0, 0.4j), (1, 1.3j), (-1, 0.2)])
    def test_small_argument(self, alpha, mu):
        arg = 1e-4
        expected = complex(mpmath.whitw(alpha, mu, arg))
        c1, c2 = jacquet.near_origin_coefficients(alpha, mu)
        # the two terms can cancel, so measure against their sizes
        scale = abs(c1 * arg ** (mu + 0.5)) + abs(c2 * arg ** (0.5 - mu))
        assert abs(jacquet.whittaker_near_origin(alpha, mu, arg) - expected) < 1e-3 * scale

    def test_jacquet_coefficients(self):
        y = 1e-5
        d1, d2 = jacquet.jacquet_near_origin_coefficients(1, 0.8j, 1)
        first, second = d1 * y ** (0.5 + 0.8j), d2 * y ** (0.5 - 0.8j)
        value = jacquet.jacquet_profile(1, 0.8j, 1, [y])[0]
        assert abs(first + second - value) < 1e-3 * (abs(first) + abs(second))

    def test_degenerate_mu(self):
        with pytest.raises(DomainError):
            jacquet.near_origin_coefficients(0, 0.01j)


class TestEnvelope:
    @pytest.mark.parametrize("p, nu", [(0, 1j), (1, 1j), (-2, 0.5j)])
    def test_constants_are_moderate(self, p, nu):
        fit = jacquet.bound_envelope(p, nu)
        assert 0.0 < fit.small_y < 10.0
        assert 0.0 < fit.large_y < 10.0

    def test_rapid_decay(self):
        value = abs(jacquet.jacquet_profile(1, 1j, 1, [20.0])[0])
        assert value < 1e-40
