import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from kuznetsov.analysis import specfun
from kuznetsov.analysis.specfun import QuadratureSpec, Scheme, SeriesKind, SpectralParam
from kuznetsov.errors import DomainError, EnvelopeError, PoleError


def _fd_second(f, x, h):
    """Fourth order central first and second derivatives."""
    fm2, fm1, f0, fp1, fp2 = (f(x + j * h) for j in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    return f0, d1, d2


class TestGamma:
    def test_values(self):
        assert specfun.gamma(1) == pytest.approx(1.0, abs=1e-15)
        assert specfun.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_reflection_on_critical_line(self):
        t = 2.0
        value = abs(specfun.gamma(0.5 + 1j * t)) ** 2
        assert abs(value - math.pi / math.cosh(math.pi * t)) / value < 1e-12

    @pytest.mark.parametrize("z", [0, -1, -7])
    def test_pole(self, z):
        with pytest.raises(PoleError):
            specfun.gamma(z)
        with pytest.raises(PoleError):
            specfun.digamma(z)

    def test_recurrence_on_random_grid(self):
        rng = np.random.default_rng(7)
        for z in rng.uniform(0.1, 10, 40) + 1j * rng.uniform(-10, 10, 40):
            ratio = specfun.gamma(z + 1) / (z * specfun.gamma(z))
            assert abs(ratio - 1) < 1e-12

    def test_rgamma_is_entire(self):
        assert abs(specfun.rgamma(-3)) < 1e-15
        assert specfun.rgamma(2.5) == pytest.approx(1 / specfun.gamma(2.5).real, rel=1e-14)


class TestBessel:
    def test_j0_near_origin(self):
        assert specfun.bessel("J", 0, 1e-12) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("order", [1.4j, -1.4j, 0.3 + 2j])
    @pytest.mark.parametrize("x", [0.8, 2.3, 11.0])
    def test_bessel_equation_complex_order(self, order, x):
        f = lambda t: specfun.bessel("J", order, t)  # noqa: E731
        j0, d1, d2 = _fd_second(f, x, 1e-3 * x)
        terms = (x * x * d2, x * d1, (x * x - order * order) * j0)
        residual = abs(sum(terms)) / sum(abs(t) for t in terms)
        assert residual < 1e-8

    def test_k_against_integral_representation(self):
        nu, x = 0.3, 1.7
        expected, _ = sp_integrate.quad(lambda t: math.exp(-x * math.cosh(t)) * math.cosh(nu * t), 0, np.inf, epsabs=1e-14)
        assert abs(specfun.bessel("K", nu, x) - expected) < 1e-10

    def test_complex_order_matches_real_route(self):
        value = specfun.bessel("I", 0.25 + 1e-300j, 3.0)
        assert value == pytest.approx(specfun.bessel("I", 0.25, 3.0), rel=1e-12)

    def test_vectorized(self):
        xs = np.array([0.5, 1.0, 2.0])
        values = specfun.bessel("K", 0.7j, xs)
        assert values.shape == (3,)
        assert values[1] == pytest.approx(specfun.bessel("K", 0.7j, 1.0), rel=1e-14)

    def test_envelope(self):
        with pytest.raises(EnvelopeError):
            specfun.bessel("J", 80, 1.0)
        with pytest.raises(EnvelopeError):
            specfun.bessel("J", 1, 500.0)
        with pytest.raises(DomainError):
            specfun.bessel("J", 1, -1.0)
        with pytest.raises(DomainError):
            specfun.bessel("Y", 1, 1.0)


class TestZeta:
    def test_classical_values(self):
        assert specfun.zeta(2) == pytest.approx(math.pi**2 / 6, rel=1e-14)
        assert specfun.zeta(0) == pytest.approx(-0.5, rel=1e-14)

    def test_first_zero(self):
        assert abs(specfun.zeta(0.5 + 14.134725j)) < 1e-5

    def test_pole(self):
        with pytest.raises(PoleError):
            specfun.zeta(1)

    @pytest.mark.parametrize("t", [3.0, 7.5, 20.0])
    def test_functional_equation(self, t):
        s = 0.5 + 1j * t
        chi = 2**s * math.pi ** (s - 1) * np.sin(math.pi * s / 2) * specfun.gamma(1 - s)
        assert abs(chi * specfun.zeta(1 - s) / specfun.zeta(s) - 1) < 1e-8


class TestDivisors:
    def test_sigma(self):
        assert specfun.sigma(0, 6) == pytest.approx(4)
        assert specfun.sigma(0.7j, 1) == pytest.approx(1)
        assert specfun.sigma(1, 12) == pytest.approx(28)

    def test_divisors(self):
        assert specfun.divisors(12) == [1, 2, 3, 4, 6, 12]
        assert specfun.factorize(360) == {2: 3, 3: 2, 5: 1}

    def test_rejects_zero(self):
        with pytest.raises(DomainError):
            specfun.sigma(1, 0)


class TestIntegrate:
    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_gaussian(self, scheme):
        result = specfun.integrate(lambda x: math.exp(-x * x), (-np.inf, np.inf), QuadratureSpec(scheme=scheme))
        measured = abs(result.value - math.sqrt(math.pi))
        assert measured < 1e-12
        assert measured <= 3 * result.error

    def test_fourier_residue_oracle(self):
        result = specfun.integrate(lambda x: 1 / (x * x + 1), (-np.inf, np.inf), weight=("exp", 2 * math.pi))
        expected = math.pi * math.exp(-2 * math.pi)
        assert abs(result.value - expected) < 1e-10
        assert abs(result.value - expected) <= 3 * result.error + 1e-15

    def test_contour_shift_agrees_with_real_line(self):
        omega = 2.0
        f = lambda x: 1 / (1 + x * x) ** 2  # noqa: E731
        expected = math.pi * (1 + omega) * math.exp(-omega) / 2
        plain = specfun.integrate(f, (-np.inf, np.inf), weight=("exp", omega))
        shifted = specfun.integrate(
            f, (-np.inf, np.inf), QuadratureSpec().with_shift(0.5), weight=("exp", omega), strip=(-1.0, 1.0)
        )
        assert abs(plain.value - expected) < 1e-8
        assert abs(shifted.value - plain.value) < 1e-8

    def test_shift_needs_strip(self):
        spec = QuadratureSpec().with_shift(0.5)
        with pytest.raises(DomainError):
            specfun.integrate(lambda x: 1 / (1 + x * x), (-np.inf, np.inf), spec)
        with pytest.raises(DomainError):
            specfun.integrate(lambda x: 1 / (1 + x * x), (-np.inf, np.inf), spec, strip=(-0.2, 0.2))

    def test_half_line_sine(self):
        # int_1^inf sin(t) / t dt
        result = specfun.integrate(lambda t: 1 / t, (1.0, np.inf), weight=("sin", 1.0))
        si_tail = math.pi / 2 - 0.946083070367183
        assert abs(result.value - si_tail) < 1e-9

    def test_empty_domain(self):
        with pytest.raises(DomainError):
            specfun.integrate(lambda t: t, (1.0, 1.0))

    def test_log_grids(self):
        u, w = specfun.gauss_legendre_panels(10, 3)
        assert np.sum(w) == pytest.approx(13 * math.log(2), rel=1e-14)
        assert np.sum(w * u) == pytest.approx(8 - 2**-10, rel=1e-13)
        u, w = specfun.trapezoid_log_grid(40, 6, 10)
        assert abs(np.sum(w * u**2 * np.exp(-u)) - 1.0) < 1e-10


class TestSpectralParam:
    @pytest.mark.parametrize(
        "nu, kind",
        [(2j, SeriesKind.PRINCIPAL), (5.5, SeriesKind.DISCRETE), (0.2, SeriesKind.COMPLEMENTARY)],
    )
    def test_classification(self, nu, kind):
        param = SpectralParam.from_nu(nu)
        assert param.kind is kind
        assert param.nu == nu

    def test_rejects_non_unitary(self):
        with pytest.raises(DomainError):
            SpectralParam.from_nu(0.3 + 1j)
        with pytest.raises(DomainError):
            SpectralParam.discrete(0)

    def test_modular_bounds(self):
        SpectralParam.principal(9.5337).check_modular()
        with pytest.raises(DomainError):
            SpectralParam.principal(2.0).check_modular()
        with pytest.raises(DomainError):
            SpectralParam.discrete(5).check_modular()

    def test_quadrature_spec_bounds(self):
        with pytest.raises(DomainError):
            QuadratureSpec(abs_tol=1e-16)
        assert QuadratureSpec(scheme="double-exponential").scheme is Scheme.DOUBLE_EXPONENTIAL
