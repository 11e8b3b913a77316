"""Jacquet integrals of the vectors phi_p and the Whittaker functions they produce.

The Jacquet operator sends phi_p(g; nu) = y^(nu + 1/2) e^(2 i p theta) to

    A^delta phi_p(n[x] a[y] k[theta]) = e^(2 i p theta) e(delta x) y^(1/2 - nu) I_q(y),    q = delta p,

    I_q(y) = int_R e(y xi) (xi + i)^(q - nu - 1/2) (xi - i)^(-q - nu - 1/2) d xi,

with principal logarithms of xi + i and of 1 + i xi = i (xi - i). Only I_q needs quadrature. It is
evaluated along one of several contours, all exponentially convergent:

* ``wedge``: two rays xi = +-t + i(c + c t) rising from the point i c, c = min(1/2, 1/(|nu|+|p|+1));
* ``hairpin``: around the branch cut i[1, oo), for large y where the wedge cancels badly;
* ``residue``: a finite sum when nu = k - 1/2 makes the integrand meromorphic;
* ``line``: the integrated-by-parts integrand on the line Im xi = c with a Fourier quadrature.

``auto`` picks between the first three for each y.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad_vec

from kuznetsov import config
from kuznetsov.analysis import specfun
from kuznetsov.analysis.group import IwasawaCoords
from kuznetsov.analysis.lie import FiniteDifferenceSpec
from kuznetsov.analysis.specfun import QuadratureSpec
from kuznetsov.errors import DomainError, PoleError, QuadratureError

logger = logging.getLogger(__name__)

ROUTES = ("auto", "wedge", "hairpin", "residue", "line")
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhiVector:
    """phi_p(g; nu) = y^(nu + 1/2) e^(2 i p theta)."""

    p: int
    nu: complex

    def __call__(self, coords: IwasawaCoords) -> complex:
        return cmath.exp((self.nu + 0.5) * math.log(coords.y) + 2j * self.p * coords.theta)


def contour_height(p: int, nu: complex) -> float:
    return min(0.5, 1.0 / (abs(nu) + abs(p) + 1.0))


def discrete_weight(nu: complex) -> Optional[int]:
    """k when nu = k - 1/2 with k >= 1, else None."""
    nu = complex(nu)
    k = nu.real + 0.5
    if nu.imag == 0.0 and k >= 1.0 and k == int(k):
        return int(k)
    return None


def _check(p: int, nu: complex, delta: int) -> complex:
    if delta not in (1, -1):
        raise DomainError(f"delta must be +1 or -1, got {delta}")
    if int(p) != p:
        raise DomainError(f"weight index p must be an integer, got {p}")
    nu = complex(nu)
    if not nu.real > -0.5:
        raise DomainError(f"Jacquet integral needs Re(nu) > -1/2, got {nu}; continue through the Mellin transform")
    return nu


def _vector_quad(integrand, size: int, spec: QuadratureSpec) -> np.ndarray:
    """Integrate a complex vector function over [0, 1] with one shared adaptive partition."""

    def stacked(v):
        values = integrand(v)
        return np.concatenate([values.real, values.imag])

    result, err, info = quad_vec(
        stacked, 0.0, 1.0, epsabs=spec.abs_tol, epsrel=spec.rel_tol, norm="max", limit=spec.max_panels, full_output=True
    )
    status = getattr(info, "status", 0)
    if status != 0 and not err <= spec.tolerance(np.max(np.abs(result))):
        raise QuadratureError(f"vector quadrature stopped with status {status}", err)
    logger.debug("quad_vec: %d components, %d evaluations, err=%.3g", size, getattr(info, "neval", -1), err)
    return result[:size] + 1j * result[size:]


def _logs(xi, a_exp: complex, b_exp: complex):
    return a_exp * np.log(xi + 1j) + b_exp * np.log(1.0 + 1j * xi) - 0.5j * math.pi * b_exp


def _wedge(ys: np.ndarray, a_exp: complex, b_exp: complex, c: float, slope: float, spec: QuadratureSpec) -> np.ndarray:
    """I_q(y) along xi = +-t + i(c + slope t), t = sinh(s)."""
    s_max = np.arcsinh(np.maximum(1.0, config.DECAY_CUTOFF / (TWO_PI * ys * slope)))

    def integrand(v):
        s = v * s_max
        t = np.sinh(s)
        total = 0j
        for sign in (1.0, -1.0):
            xi = sign * t + 1j * (c + slope * t)
            exponent = 1j * TWO_PI * ys * sign * t - TWO_PI * ys * slope * t + _logs(xi, a_exp, b_exp)
            total = total + (1.0 + 1j * sign * slope) * np.exp(exponent)
        return total * np.cosh(s) * s_max

    return np.exp(-TWO_PI * ys * c) * _vector_quad(integrand, len(ys), spec)


def _hairpin(ys: np.ndarray, a_exp: complex, b_exp: complex, spec: QuadratureSpec) -> np.ndarray:
    """I_q(y) along the legs xi = +-r + i e^s and the lower half circle |xi - i| = r."""
    radius = np.minimum(1.0, max(1.0, -b_exp.real) / (TWO_PI * ys))
    s_max = np.log1p(config.DECAY_CUTOFF / (TWO_PI * ys))

    def integrand(v):
        s = v * s_max
        legs = 0j
        for sign in (1.0, -1.0):
            xi = sign * radius + 1j * np.exp(s)
            exponent = 1j * TWO_PI * ys * sign * radius - TWO_PI * ys * np.expm1(s) + _logs(xi, a_exp, b_exp) + s
            legs = legs + sign * 1j * np.exp(exponent)
        w = radius * np.exp(1j * math.pi * (1.0 + v))
        arc = 1j * w * np.exp(1j * TWO_PI * ys * w + _logs(1j + w, a_exp, b_exp))
        return legs * s_max + arc * math.pi

    return np.exp(-TWO_PI * ys) * _vector_quad(integrand, len(ys), spec)


def _falling(m: int, count: int) -> float:
    value = 1.0
    for j in range(count):
        value *= m - j
    return value


def _residue(ys: np.ndarray, q: int, k: int) -> np.ndarray:
    """I_q(y) for nu = k - 1/2: 2 pi i times the residue at xi = i."""
    m, order = q - k, q + k
    if order <= 0:
        return np.zeros(len(ys), dtype=complex)
    total = np.zeros(len(ys), dtype=complex)
    for j in range(order):
        derivative = _falling(m, order - 1 - j) * (2j) ** (m - (order - 1 - j))
        total += math.comb(order - 1, j) * (1j * TWO_PI * ys) ** j * derivative
    return TWO_PI * 1j * np.exp(-TWO_PI * ys) * total / math.factorial(order - 1)


def _line(y: float, q: int, nu: complex, c: float, spec: QuadratureSpec) -> complex:
    """A^delta phi_p(a[y]) from the integrated-by-parts integrand on Im xi = c."""
    a_exp = q - nu - 1.5
    b_exp = -q - nu - 1.5

    def integrand(xi):
        logs = a_exp * cmath.log(xi + 1j) + b_exp * cmath.log(1.0 + 1j * xi) - 0.5j * math.pi * b_exp
        return ((1.0 + 2.0 * nu) * xi + 2j * q) * cmath.exp(logs)

    result = specfun.integrate(
        integrand, (-np.inf, np.inf), spec.with_shift(c), weight=("exp", TWO_PI * y), strip=(-1.0, 1.0)
    )
    return cmath.exp((-0.5 - nu) * math.log(y)) * result.value / (TWO_PI * 1j)


def _hairpin_mask(ys: np.ndarray, nu: complex, c: float) -> np.ndarray:
    return TWO_PI * ys * (1.0 - c) > 0.5 * math.pi * abs(nu.imag) + config.HAIRPIN_MARGIN


def route_for(y: float, p: int, nu: complex, spec: Optional[QuadratureSpec] = None) -> str:
    """The contour ``auto`` would use at y."""
    nu = complex(nu)
    if discrete_weight(nu) is not None:
        return "residue"
    c = (spec.contour_shift if spec and spec.contour_shift else 0.0) or contour_height(p, nu)
    return "hairpin" if bool(_hairpin_mask(np.array([y]), nu, c)[0]) else "wedge"


def jacquet_profile(
    p: int, nu: complex, delta: int, ys: Sequence[float], spec: Optional[QuadratureSpec] = None, route: str = "auto"
) -> np.ndarray:
    """
    Values A^delta phi_p(a[y]) for many y at once.

    Parameters
    ----------
    p : int
        Weight index of phi_p.
    nu : complex
        Spectral parameter, ``Re(nu) > -1/2``.
    delta : int
        Sign of the character, +1 or -1.
    ys : sequence of float
        Positive arguments.
    spec : QuadratureSpec, optional
        Tolerances; a nonzero ``contour_shift`` replaces the default contour height.
    route : str
        One of ``ROUTES``.

    Returns
    -------
    numpy.ndarray
        Complex values, one per y.
    """
    spec = spec or QuadratureSpec()
    nu = _check(p, nu, delta)
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if not np.all(ys > 0.0):
        raise DomainError("Jacquet profile needs positive arguments")
    if route not in ROUTES:
        raise DomainError(f"unknown route {route!r}")

    q = delta * int(p)
    c = spec.contour_shift or contour_height(p, nu)
    if not 0.0 < c < 1.0:
        raise DomainError(f"contour height {c} outside the strip (0, 1)")
    k = discrete_weight(nu)
    if route == "residue" and k is None:
        raise DomainError("the residue route needs nu = k - 1/2")
    if route == "auto" and k is not None:
        route = "residue"

    if route == "line":
        return np.array([_line(y, q, nu, c, spec) for y in ys])

    if route == "residue":
        values = _residue(ys, q, k)
    else:
        a_exp, b_exp = q - nu - 0.5, -q - nu - 0.5
        if route == "auto":
            hairpin = _hairpin_mask(ys, nu, c)
        else:
            hairpin = np.full(ys.shape, route == "hairpin")
        values = np.empty(ys.shape, dtype=complex)
        if np.any(~hairpin):
            values[~hairpin] = _wedge(ys[~hairpin], a_exp, b_exp, c, contour_height(p, nu), spec)
        if np.any(hairpin):
            values[hairpin] = _hairpin(ys[hairpin], a_exp, b_exp, spec)
    return values * np.exp((0.5 - nu) * np.log(ys))


def jacquet_phi(
    p: int, nu: complex, delta: int, at: IwasawaCoords, spec: Optional[QuadratureSpec] = None, route: str = "auto"
) -> complex:
    """A^delta phi_p at a point of G; the x and theta dependence is applied exactly."""
    value = jacquet_profile(p, nu, delta, [at.y], spec, route)[0]
    return complex(value * cmath.exp(2j * p * at.theta) * specfun.e(delta * at.x))


def whittaker_w(alpha: int, mu: complex, arg: float, spec: Optional[QuadratureSpec] = None) -> complex:
    """
    W_{alpha, mu}(arg) for integer alpha, through the Jacquet integral.

    Raises :class:`PoleError` when alpha + mu + 1/2 is a non-positive integer.
    """
    if int(alpha) != alpha:
        raise DomainError("only integer alpha is supported")
    if not arg > 0.0:
        raise DomainError("Whittaker argument must be positive")
    mu = complex(mu)
    if mu.real < 0.0:
        mu = -mu
    if specfun.is_pole(alpha + mu + 0.5):
        raise PoleError(f"Gamma(alpha + mu + 1/2) has a pole at alpha={alpha}, mu={mu}")
    p, delta = abs(int(alpha)), 1 if alpha >= 0 else -1
    value = jacquet_profile(p, mu, delta, [arg / (2.0 * TWO_PI)], spec)[0]
    return complex((-1) ** p * cmath.exp((-mu - 0.5) * math.log(math.pi)) * specfun.gamma(alpha + mu + 0.5) * value)


def whittaker_ode_residual(
    p: int,
    nu: complex,
    n: int,
    y: float,
    fd: Optional[FiniteDifferenceSpec] = None,
    spec: Optional[QuadratureSpec] = None,
) -> float:
    """
    Normalized residual of the Whittaker equation satisfied by Fourier coefficients.

    b(y) = W_{delta p, nu}(4 pi |n| y), delta = sgn n, should solve
    -y^2 b'' + ((2 pi n y)^2 - 4 pi n p y - (1/4 - nu^2)) b = 0. All stencil values come from one
    quadrature over a common contour, so that quadrature error cancels in the differences.
    """
    if n == 0:
        raise DomainError("Fourier index n must be nonzero")
    if not y > 0.0:
        raise DomainError("y must be positive")
    fd = fd or FiniteDifferenceSpec(step=config.WHITTAKER_FD_STEP)
    nu = complex(nu)
    delta = 1 if n > 0 else -1
    h = fd.step * y
    offsets, weights = (-2, -1, 0, 1, 2), (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)
    if fd.order == 2:
        offsets, weights = (-1, 0, 1), (1.0, -2.0, 1.0)
    points = np.array([y + j * h for j in offsets]) * abs(n)
    route = route_for(abs(n) * y, p, nu, spec)
    values = jacquet_profile(p, nu, delta, points, spec, route)
    b = values[offsets.index(0)]
    second = sum(w * v for w, v in zip(weights, values)) / h**2

    terms = (
        -y * y * second,
        (TWO_PI * n * y) ** 2 * b,
        -2.0 * TWO_PI * n * p * y * b,
        -(0.25 - nu * nu) * b,
    )
    scale = sum(abs(t) for t in terms)
    return abs(sum(terms)) / scale if scale > 0.0 else 0.0


def ladder_norm_ratio(p: int, nu: complex, sign: str = "+") -> float:
    """Expected ||e^(+-) f||^2 / ||f||^2 = 4 (kappa^2 + (p +- 1/2)^2) on the unitary principal series."""
    nu = complex(nu)
    if nu.real != 0.0:
        raise DomainError("ladder norms are tabulated for the unitary principal series only")
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    shift = 0.5 if sign == "+" else -0.5
    return 4.0 * (nu.imag**2 + (p + shift) ** 2)


def near_origin_coefficients(alpha: complex, mu: complex):
    """
    (c1, c2) with W_{alpha, mu}(Y) = c1 Y^(mu + 1/2) + c2 Y^(1/2 - mu) + O(Y^(3/2 - |Re mu|)).

    Defined for |mu| >= NEAR_ORIGIN_MIN_MU and 2 mu not an integer.
    """
    mu = complex(mu)
    if abs(mu) < config.NEAR_ORIGIN_MIN_MU:
        raise DomainError(f"near-origin expansion degenerates for |mu| < {config.NEAR_ORIGIN_MIN_MU}")
    c1 = specfun.gamma(-2.0 * mu) * specfun.rgamma(0.5 - alpha - mu)
    c2 = specfun.gamma(2.0 * mu) * specfun.rgamma(0.5 - alpha + mu)
    return c1, c2


def whittaker_near_origin(alpha: complex, mu: complex, arg: float) -> complex:
    c1, c2 = near_origin_coefficients(alpha, mu)
    mu = complex(mu)
    return c1 * arg ** (mu + 0.5) + c2 * arg ** (0.5 - mu)


def jacquet_near_origin_coefficients(p: int, nu: complex, delta: int):
    """(d1, d2) with A^delta phi_p(a[y]) ~ d1 y^(1/2 + nu) + d2 y^(1/2 - nu) as y -> 0."""
    nu = complex(nu)
    q = delta * p
    c1, c2 = near_origin_coefficients(q, nu)
    factor = (-1) ** p * cmath.exp((nu + 0.5) * math.log(math.pi)) * specfun.rgamma(q + nu + 0.5)
    scale = 2.0 * TWO_PI
    return factor * c1 * scale ** (nu + 0.5), factor * c2 * scale ** (0.5 - nu)


@dataclass(frozen=True)
class EnvelopeFit:
    """Fitted constants of |A phi_p(a[y])| against the small-y and large-y bound shapes."""

    small_y: float
    large_y: float


def bound_envelope(
    p: int, nu: complex, ys: Optional[Sequence[float]] = None, spec: Optional[QuadratureSpec] = None, delta: int = 1
) -> EnvelopeFit:
    """
    Smallest constants C with |A phi_p(a[y])| <= C (|p| + |nu| + 1) y^(1/2 - |Re nu|) |log y| for y < 1
    and <= C (|p| + |nu| + 1) y^(-1/2 - Re nu) exp(-y / (|nu| + |p| + 1)) for y >= 1, over the sample.
    """
    nu = complex(nu)
    if ys is None:
        # |log y| vanishes at y = 1, so the default sample stays away from it
        ys = np.concatenate([np.geomspace(1e-3, 0.5, 30), np.geomspace(1.0, 20.0, 30)])
    ys = np.asarray(ys, dtype=float)
    values = np.abs(jacquet_profile(p, nu, delta, ys, spec))
    weight = abs(p) + abs(nu) + 1.0
    small = ys < 1.0
    large = ys >= 1.0
    small_shape = weight * ys[small] ** (0.5 - abs(nu.real)) * np.abs(np.log(ys[small]))
    large_shape = weight * ys[large] ** (-0.5 - nu.real) * np.exp(-ys[large] / weight)
    return EnvelopeFit(
        small_y=float(np.max(values[small] / small_shape)) if np.any(small) else 0.0,
        large_y=float(np.max(values[large] / large_shape)) if np.any(large) else 0.0,
    )
