"""Special functions and quadrature.

Everything numeric in the package goes through this module: complex Gamma, Bessel functions of
complex order, the Riemann zeta function, divisor sums and a quadrature front end that knows
about oscillatory weights and contour shifts.

Real-order Bessel functions and the Gamma family come from :mod:`scipy.special`, complex-order
Bessel functions and zeta from :mod:`mpmath`. Integrals use :func:`scipy.integrate.quad`
(QUADPACK, including the QAWO/QAWF Fourier routines) or mpmath's tanh-sinh rule.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import mpmath
import numpy as np
from scipy import integrate as sp_integrate
from scipy import special as sp

from kuznetsov import config
from kuznetsov.errors import DomainError, EnvelopeError, PoleError, QuadratureError

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]
Domain = Tuple[float, float]
Weight = Tuple[str, float]

MIN_MAASS_KAPPA = 3.815
MIN_HOLOMORPHIC_K = 6


def e(x):
    """The additive character e(x) = exp(2 pi i x); works on scalars and arrays."""
    return np.exp(2j * np.pi * np.asarray(x)) if np.ndim(x) else complex(np.exp(2j * np.pi * x))


@dataclass(frozen=True)
class ComplexValue:
    """A finite complex number, as written to reports."""

    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError(f"non-finite complex value ({self.re}, {self.im})")

    @classmethod
    def of(cls, z: Number) -> "ComplexValue":
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


class SeriesKind(str, Enum):
    PRINCIPAL = "principal"
    DISCRETE = "discrete"
    COMPLEMENTARY = "complementary"


@dataclass(frozen=True)
class SpectralParam:
    """
    Spectral parameter of an irreducible representation.

    ``value`` holds kappa for the principal series (nu = i kappa), the integer k for the discrete
    series (nu = k - 1/2) and nu itself for the complementary series (real, |nu| < 1/2).
    """

    kind: SeriesKind
    value: float

    def __post_init__(self):
        object.__setattr__(self, "kind", SeriesKind(self.kind))
        if not math.isfinite(self.value):
            raise DomainError("spectral parameter must be finite")
        if self.kind is SeriesKind.DISCRETE and (self.value != int(self.value) or self.value < 1):
            raise DomainError(f"discrete series needs an integer k >= 1, got {self.value}")
        if self.kind is SeriesKind.COMPLEMENTARY and not abs(self.value) < 0.5:
            raise DomainError(f"complementary series needs |nu| < 1/2, got {self.value}")

    @classmethod
    def principal(cls, kappa: float) -> "SpectralParam":
        return cls(SeriesKind.PRINCIPAL, float(kappa))

    @classmethod
    def discrete(cls, k: int) -> "SpectralParam":
        return cls(SeriesKind.DISCRETE, int(k))

    @classmethod
    def complementary(cls, nu: float) -> "SpectralParam":
        return cls(SeriesKind.COMPLEMENTARY, float(nu))

    @classmethod
    def from_nu(cls, nu: Number) -> "SpectralParam":
        """Classify a complex nu; raises :class:`DomainError` if it belongs to no unitary series."""
        nu = complex(nu)
        if nu.real == 0.0:
            return cls.principal(nu.imag)
        if nu.imag == 0.0:
            if abs(nu.real) < 0.5:
                return cls.complementary(nu.real)
            k = nu.real + 0.5
            if k == int(k) and k >= 1:
                return cls.discrete(int(k))
        raise DomainError(f"nu = {nu} is not the parameter of a unitary representation")

    @property
    def nu(self) -> complex:
        if self.kind is SeriesKind.PRINCIPAL:
            return complex(0.0, self.value)
        if self.kind is SeriesKind.DISCRETE:
            return complex(self.value - 0.5, 0.0)
        return complex(self.value, 0.0)

    @property
    def k(self) -> int:
        if self.kind is not SeriesKind.DISCRETE:
            raise DomainError("only discrete series parameters carry a weight k")
        return int(self.value)

    def check_modular(self) -> None:
        """Bounds satisfied by the representations occurring for the full modular group."""
        if self.kind is SeriesKind.PRINCIPAL and not abs(self.value) > MIN_MAASS_KAPPA:
            raise DomainError(f"kappa = {self.value} is below the first Maass eigenvalue bound")
        if self.kind is SeriesKind.DISCRETE and self.value < MIN_HOLOMORPHIC_K:
            raise DomainError(f"no holomorphic cusp forms of weight {2 * int(self.value)}")
        if self.kind is SeriesKind.COMPLEMENTARY:
            raise DomainError("the modular group has no complementary series")


class Scheme(str, Enum):
    ADAPTIVE_GAUSS = "adaptive-gauss"
    DOUBLE_EXPONENTIAL = "double-exponential"


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Tolerance and contour policy of a numerical integral.

    ``contour_shift`` moves a real-line integral to the line Im(xi) = contour_shift. Integrals
    taking a shift must be given the analyticity strip of the integrand.
    """

    scheme: Scheme = Scheme.ADAPTIVE_GAUSS
    abs_tol: float = config.QUAD_ABS_TOL
    rel_tol: float = config.QUAD_REL_TOL
    max_panels: int = config.QUAD_MAX_PANELS
    contour_shift: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        for name in ("abs_tol", "rel_tol"):
            value = getattr(self, name)
            if not 1e-14 <= value <= 1e-2:
                raise DomainError(f"{name} = {value} outside [1e-14, 1e-2]")
        if self.max_panels < 1:
            raise DomainError("max_panels must be positive")
        if not math.isfinite(self.contour_shift):
            raise DomainError("contour_shift must be finite")

    def with_shift(self, shift: float) -> "QuadratureSpec":
        return replace(self, contour_shift=float(shift))

    def tolerance(self, value: Number) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float

    def __complex__(self) -> complex:
        return complex(self.value)

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value + other.value, self.error + other.error)

    def scaled(self, factor: Number) -> "QuadratureResult":
        return QuadratureResult(self.value * factor, self.error * abs(factor))


# ------------------------------------------------------------------------------------------------
# Gamma family
# ------------------------------------------------------------------------------------------------


def is_pole(z: Number) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def gamma(z: Number) -> complex:
    """Gamma function; raises :class:`PoleError` at non-positive integers."""
    if is_pole(z):
        raise PoleError(f"Gamma has a pole at {z}")
    return complex(sp.gamma(complex(z)))


def loggamma(z: Number) -> complex:
    """Principal branch of log Gamma."""
    if is_pole(z):
        raise PoleError(f"log Gamma has a pole at {z}")
    return complex(sp.loggamma(complex(z)))


def rgamma(z: Number) -> complex:
    """1/Gamma(z), entire."""
    return complex(sp.rgamma(complex(z)))


def digamma(z: Number) -> complex:
    if is_pole(z):
        raise PoleError(f"digamma has a pole at {z}")
    return complex(sp.psi(complex(z)))


# ------------------------------------------------------------------------------------------------
# Bessel functions
# ------------------------------------------------------------------------------------------------

_REAL_BESSEL = {"J": sp.jv, "I": sp.iv, "K": sp.kv}
_COMPLEX_BESSEL = {"J": mpmath.besselj, "I": mpmath.besseli, "K": mpmath.besselk}


def _check_envelope(order: complex, x) -> None:
    if abs(order) > config.BESSEL_MAX_ORDER:
        raise EnvelopeError(f"Bessel order {order} beyond |order| <= {config.BESSEL_MAX_ORDER}")
    xmax = float(np.max(x))
    if xmax > config.BESSEL_MAX_ARG:
        raise EnvelopeError(f"Bessel argument {xmax} beyond {config.BESSEL_MAX_ARG}")
    if float(np.min(x)) <= 0.0:
        raise DomainError("Bessel argument must be positive")


def bessel(kind: str, order: Number, x):
    """
    Bessel function J, I or K of complex order at positive real argument(s).

    Parameters
    ----------
    kind : str
        One of ``"J"``, ``"I"``, ``"K"``.
    order : complex
        Order of the function, ``|order| <= BESSEL_MAX_ORDER``.
    x : float or numpy.ndarray
        Positive argument(s), at most ``BESSEL_MAX_ARG``.

    Returns
    -------
    complex or numpy.ndarray
        Value(s) with the shape of ``x``.
    """
    kind = kind.upper()
    if kind not in _REAL_BESSEL:
        raise DomainError(f"unknown Bessel kind {kind!r}")
    order = complex(order)
    _check_envelope(order, x)

    if order.imag == 0.0:
        values = _REAL_BESSEL[kind](order.real, np.asarray(x, dtype=float))
        return values.astype(complex) if np.ndim(x) else complex(values)

    func = _COMPLEX_BESSEL[kind]
    mp_order = mpmath.mpc(order.real, order.imag)
    if np.ndim(x):
        flat = [complex(func(mp_order, float(v))) for v in np.ravel(x)]
        return np.asarray(flat, dtype=complex).reshape(np.shape(x))
    return complex(func(mp_order, float(x)))


def hankel(kind: int, order: Number, z: complex) -> complex:
    """Hankel function H^(1) or H^(2) at a complex argument (used for rotated oscillatory tails)."""
    func = mpmath.hankel1 if kind == 1 else mpmath.hankel2
    order = complex(order)
    return complex(func(mpmath.mpc(order.real, order.imag), mpmath.mpc(z.real, z.imag)))


# ------------------------------------------------------------------------------------------------
# Zeta and divisors
# ------------------------------------------------------------------------------------------------


def zeta(s: Number) -> complex:
    """Riemann zeta function, continued to the whole plane."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    return complex(mpmath.zeta(mpmath.mpc(s.real, s.imag)))


def factorize(n: int) -> dict:
    """Prime factorization by trial division, as {prime: exponent}."""
    if n < 1:
        raise DomainError(f"cannot factorize {n}")
    factors = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def divisors(n: int) -> list:
    divs = [1]
    for prime, power in factorize(n).items():
        divs = [d * prime**j for d in divs for j in range(power + 1)]
    return sorted(divs)


def sigma(exponent: Number, n: int) -> complex:
    """Divisor sum sum_{d | n} d^exponent."""
    if n < 1:
        raise DomainError(f"sigma needs n >= 1, got {n}")
    logs = np.log(np.asarray(divisors(n), dtype=float))
    return complex(np.sum(np.exp(complex(exponent) * logs)))


# ------------------------------------------------------------------------------------------------
# Quadrature
# ------------------------------------------------------------------------------------------------


class _Parts:
    """Memoized real and imaginary parts of a complex integrand, for real-valued integrators."""

    def __init__(self, f: Callable):
        self.f = f
        self.cache = {}

    def __call__(self, t: float) -> complex:
        try:
            return self.cache[t]
        except KeyError:
            value = self.cache[t] = complex(self.f(t))
            return value

    def real(self, t: float) -> float:
        return self(t).real

    def imag(self, t: float) -> float:
        return self(t).imag

    def is_real(self) -> bool:
        return all(v.imag == 0.0 for v in self.cache.values())


def _quad(fun: Callable, lo: float, hi: float, spec: QuadratureSpec, **kwargs) -> Tuple[float, float]:
    if np.isinf(hi) and "weight" in kwargs:
        kwargs.setdefault("limlst", max(50, spec.max_panels // 10))
    out = sp_integrate.quad(
        fun, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_panels, full_output=1, **kwargs
    )
    value, err = out[0], out[1]
    if len(out) > 3:
        if not err <= spec.tolerance(value) or not math.isfinite(value):
            raise QuadratureError(f"quadrature on [{lo}, {hi}] failed: {out[3]}", err)
        logger.debug("quad on [%g, %g] warned (%s) but met tolerance: err=%.3g", lo, hi, out[3], err)
    return value, err


def _quad_complex(parts: _Parts, lo: float, hi: float, spec: QuadratureSpec, **kwargs) -> QuadratureResult:
    re, re_err = _quad(parts.real, lo, hi, spec, **kwargs)
    if parts.is_real():
        return QuadratureResult(complex(re, 0.0), re_err)
    im, im_err = _quad(parts.imag, lo, hi, spec, **kwargs)
    return QuadratureResult(complex(re, im), math.hypot(re_err, im_err))


def _fourier(f: Callable, lo: float, hi: float, omega: float, spec: QuadratureSpec, kind: str) -> QuadratureResult:
    """Integral of f(t) w(omega t) over [lo, hi], lo finite, omega >= 0, w in cos/sin/exp."""
    parts = _Parts(f)
    if omega == 0.0:
        if kind == "sin":
            return QuadratureResult(0j, 0.0)
        return _quad_complex(parts, lo, hi, spec)
    if kind in ("cos", "sin"):
        return _quad_complex(parts, lo, hi, spec, weight=kind, wvar=omega)
    cos = _quad_complex(parts, lo, hi, spec, weight="cos", wvar=omega)
    sin = _quad_complex(parts, lo, hi, spec, weight="sin", wvar=omega)
    return QuadratureResult(cos.value + 1j * sin.value, cos.error + sin.error)


def _weighted(f: Callable, lo: float, hi: float, spec: QuadratureSpec, kind: str, omega: float) -> QuadratureResult:
    if np.isinf(lo) and np.isinf(hi):
        return _weighted(f, lo, 0.0, spec, kind, omega) + _weighted(f, 0.0, hi, spec, kind, omega)
    if np.isinf(lo):
        # t -> -t turns (-inf, hi] into [-hi, inf) and flips the frequency
        return _weighted(lambda t: f(-t), -hi, np.inf, spec, kind, -omega)
    if omega >= 0.0:
        return _fourier(f, lo, hi, omega, spec, kind)
    if kind == "cos":
        return _fourier(f, lo, hi, -omega, spec, kind)
    if kind == "sin":
        return _fourier(f, lo, hi, -omega, spec, kind).scaled(-1.0)
    conj = _fourier(lambda t: complex(f(t)).conjugate(), lo, hi, -omega, spec, kind)
    return QuadratureResult(conj.value.conjugate(), conj.error)


_MP_WEIGHTS = {"cos": mpmath.cos, "sin": mpmath.sin, "exp": mpmath.expj}


def _tanh_sinh(f: Callable, lo: float, hi: float, spec: QuadratureSpec, weight: Optional[Weight]) -> QuadratureResult:
    if weight is not None and (np.isinf(lo) or np.isinf(hi)):
        raise DomainError("Fourier integrals over infinite ranges need the adaptive-gauss scheme")

    def integrand(t):
        value = complex(f(float(t)))
        result = mpmath.mpc(value.real, value.imag)
        if weight is not None:
            result *= _MP_WEIGHTS[weight[0]](weight[1] * t)
        return result

    bounds = [mpmath.mpf(lo), mpmath.mpf(hi)]
    value, err = mpmath.quad(integrand, bounds, error=True, method="tanh-sinh")
    value = complex(value)
    err = max(float(err), 10.0 * np.finfo(float).eps * abs(value))
    if not err <= spec.tolerance(value):
        raise QuadratureError(f"tanh-sinh on [{lo}, {hi}] reached only {err:.3g}", err)
    return QuadratureResult(value, err)


def integrate(
    f: Callable[[float], Number],
    domain: Domain,
    spec: Optional[QuadratureSpec] = None,
    *,
    weight: Optional[Weight] = None,
    strip: Optional[Tuple[float, float]] = None,
) -> QuadratureResult:
    """
    Integrate a complex function of a real variable.

    With a nonzero ``spec.contour_shift`` the integral runs along the horizontal line
    ``t + i*shift``; the weight, if any, is then evaluated at the complex point as well, so that
    ``weight=("exp", w)`` contributes the decay factor ``exp(-w*shift)``.

    Parameters
    ----------
    f : callable
        Integrand; receives a float (or a complex number when shifted).
    domain : tuple of float
        Integration bounds, possibly infinite.
    spec : QuadratureSpec, optional
        Scheme and tolerances.
    weight : tuple, optional
        ``("cos", w)``, ``("sin", w)`` or ``("exp", w)`` for cos(wt), sin(wt), exp(iwt).
    strip : tuple of float, optional
        Open interval of imaginary parts where f is analytic; required by a contour shift.

    Returns
    -------
    QuadratureResult
        Value and a posteriori error estimate.
    """
    spec = spec or QuadratureSpec()
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise DomainError(f"empty integration domain [{lo}, {hi}]")
    if weight is not None and weight[0] not in _MP_WEIGHTS:
        raise DomainError(f"unknown weight {weight[0]!r}")

    integrand, factor = f, 1.0
    shift = spec.contour_shift
    if shift != 0.0:
        if strip is None:
            raise DomainError("a contour shift needs the analyticity strip of the integrand")
        if not strip[0] < shift < strip[1]:
            raise DomainError(f"contour shift {shift} outside the analyticity strip {strip}")
        if weight is not None and weight[0] != "exp":
            raise DomainError("only exponential weights can be carried along a shifted contour")
        integrand = lambda t: f(t + 1j * shift)  # noqa: E731
        if weight is not None:
            factor = math.exp(-weight[1] * shift)

    if spec.scheme is Scheme.DOUBLE_EXPONENTIAL:
        result = _tanh_sinh(integrand, lo, hi, spec, weight)
    elif weight is not None:
        result = _weighted(integrand, lo, hi, spec, *weight)
    else:
        result = _quad_complex(_Parts(integrand), lo, hi, spec)
    return result.scaled(factor)


def gauss_legendre_panels(lo_exp: int, hi_exp: int, order: int = config.PANEL_NODES):
    """
    Nodes and weights for integrals over [2^-lo_exp, 2^hi_exp] against du/u.

    Each dyadic panel [2^j, 2^(j+1)] gets ``order`` Gauss-Legendre nodes in the variable log u.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * math.log(2.0)
    starts = np.arange(-lo_exp, hi_exp) * math.log(2.0)
    t = (starts[:, None] + half * (x[None, :] + 1.0)).ravel()
    weights = np.tile(half * w, len(starts))
    return np.exp(t), weights


def trapezoid_log_grid(lo_exp: int, hi_exp: int, nodes_per_unit: int):
    """Uniform trapezoid nodes in log u over [2^-lo_exp, 2^hi_exp] against du/u, with an even number of steps."""
    t_lo, t_hi = -lo_exp * math.log(2.0), hi_exp * math.log(2.0)
    count = int(math.ceil((t_hi - t_lo) * nodes_per_unit))
    count -= count % 2
    t = np.linspace(t_lo, t_hi, count + 1)
    h = t[1] - t[0]
    weights = np.full(t.shape, h)
    weights[[0, -1]] = 0.5 * h
    return np.exp(t), weights
