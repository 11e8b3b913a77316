"""The Kirillov model of the unitary representations of G.

A vector phi = sum_p c_p phi_p of the principal, complementary or discrete series is realized as the
function

    K phi(u) = A^(sgn u) phi(a[|u|]),    u != 0,

on the punctured line, with the inner product (1/pi) int K phi conj(K psi) du/|u|. The module
evaluates that map, the Bessel kernel j_nu of the Weyl element, the Mellin transforms Gamma_p with
their local functional equation, the Mellin pairs of the kernel, Whittaker product integrals and
Gram matrices of the basis phi_p.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from kuznetsov import config
from kuznetsov.analysis import specfun
from kuznetsov.analysis.group import WEYL, GroupElement, a_matrix, iwasawa_decompose
from kuznetsov.analysis.jacquet import (
    discrete_weight,
    jacquet_near_origin_coefficients,
    jacquet_phi,
    jacquet_profile,
    near_origin_coefficients,
)
from kuznetsov.analysis.specfun import QuadratureResult, QuadratureSpec, SeriesKind, SpectralParam
from kuznetsov.errors import DomainError, PoleError

logger = logging.getLogger(__name__)

Parameter = Union[SpectralParam, complex, float]

# Half opening angle of the rotated ray used for L_p when Im(s - nu) is large
ROTATION_ANGLE = 0.75
SERIES_TERMS = 4
NEGATIVE_SIDE_CUT = 60.0


def _split(nu: Parameter) -> Tuple[complex, Optional[int]]:
    """(nu, k) where k is the weight of a discrete series parameter, else None."""
    if isinstance(nu, SpectralParam):
        return nu.nu, (nu.k if nu.kind is SeriesKind.DISCRETE else None)
    nu = complex(nu)
    return nu, discrete_weight(nu)


def _is_unitary(nu: complex) -> bool:
    return nu.real == 0.0 or nu.imag == 0.0


@dataclass(frozen=True)
class KirillovVector:
    """
    A finite combination sum_p c_p phi_p in the representation with parameter ``param``.

    For the discrete series D_k only p >= k may carry coefficients.
    """

    coeffs: Dict[int, complex]
    param: SpectralParam
    support: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        coeffs = {int(p): complex(c) for p, c in dict(self.coeffs).items() if c != 0}
        if not coeffs:
            raise DomainError("a Kirillov vector needs at least one nonzero coefficient")
        if self.param.kind is SeriesKind.DISCRETE and min(coeffs) < self.param.k:
            raise DomainError(f"D_{self.param.k} has no weight below {self.param.k}, got {min(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "support", tuple(sorted(coeffs)))

    @classmethod
    def basis(cls, p: int, param: SpectralParam) -> "KirillovVector":
        return cls({p: 1.0}, param)

    @property
    def nu(self) -> complex:
        return self.param.nu

    @property
    def discrete(self) -> bool:
        return self.param.kind is SeriesKind.DISCRETE

    def signs(self) -> Tuple[int, ...]:
        return (1,) if self.discrete else (1, -1)


# ------------------------------------------------------------------------------------------------
# Kirillov map
# ------------------------------------------------------------------------------------------------


def kirillov_phi(p: int, nu: Parameter, u: float, spec: Optional[QuadratureSpec] = None) -> complex:
    """K phi_p(u) = A^(sgn u) phi_p(a[|u|])."""
    if u == 0:
        raise DomainError("the Kirillov model lives on u != 0")
    nu, k = _split(nu)
    if k is not None and u < 0:
        return 0j
    return complex(jacquet_profile(p, nu, 1 if u > 0 else -1, [abs(u)], spec)[0])


def kirillov_values(vec: KirillovVector, us: Sequence[float], spec: Optional[QuadratureSpec] = None) -> np.ndarray:
    """K vec at many points, one vector quadrature per (p, sign)."""
    us = np.asarray(us, dtype=float)
    if np.any(us == 0.0):
        raise DomainError("the Kirillov model lives on u != 0")
    values = np.zeros(us.shape, dtype=complex)
    for delta in vec.signs():
        mask = us > 0 if delta > 0 else us < 0
        if not np.any(mask):
            continue
        for p, c in vec.coeffs.items():
            values[mask] += c * jacquet_profile(p, vec.nu, delta, np.abs(us[mask]), spec)
    return values


def kirillov_right_action(
    vec: KirillovVector, g: GroupElement, u: float, spec: Optional[QuadratureSpec] = None
) -> complex:
    """
    K(omega(g) vec)(u), by evaluating the Jacquet integrals at a[|u|] g.

    For g = n[x] this is e(u x) K vec(u), for g = a[y] it is K vec(u y), and for the Weyl element it
    is the direct counterpart of :func:`weyl_action`.
    """
    if u == 0:
        raise DomainError("the Kirillov model lives on u != 0")
    delta = 1 if u > 0 else -1
    if vec.discrete and delta < 0:
        return 0j
    coords = iwasawa_decompose(a_matrix(abs(u)) @ g)
    return sum(c * jacquet_phi(p, vec.nu, delta, coords, spec) for p, c in vec.coeffs.items())


def vector_norm(vec: KirillovVector) -> float:
    """Norm of sum c_p phi_p in U_nu, D_k or the complementary series."""
    nu = vec.nu
    if vec.param.kind is SeriesKind.PRINCIPAL:
        return math.sqrt(sum(abs(c) ** 2 for c in vec.coeffs.values()))
    if vec.discrete:
        k = vec.param.k
        total = sum(math.exp(math.lgamma(p - k + 1) - math.lgamma(p + k)) * abs(c) ** 2 for p, c in vec.coeffs.items())
        return math.pi ** (k - 0.5) * math.sqrt(total)
    total = sum(
        (specfun.gamma(p + 0.5 - nu) * specfun.rgamma(p + 0.5 + nu)).real * abs(c) ** 2 for p, c in vec.coeffs.items()
    )
    return math.pi**nu.real * math.sqrt(total)


def kirillov_norm(vec: KirillovVector, spec: Optional[QuadratureSpec] = None) -> float:
    """sqrt((1/pi) int |K vec(u)|^2 du/|u|) by quadrature; equals :func:`vector_norm`."""
    us, weights = specfun.trapezoid_log_grid(*config.GRAM_WINDOW, config.GRAM_NODES_PER_UNIT)
    total = 0.0
    for delta in vec.signs():
        total += float(np.sum(weights * np.abs(kirillov_values(vec, delta * us, spec)) ** 2))
    return math.sqrt(total / math.pi)


# ------------------------------------------------------------------------------------------------
# Bessel kernel
# ------------------------------------------------------------------------------------------------


def _bracket_j(nu: complex, x):
    if nu.real == 0.0:
        return -2.0 * np.imag(specfun.bessel("J", 2.0 * nu, x)) / math.sinh(math.pi * nu.imag)
    return (specfun.bessel("J", -2.0 * nu, x) - specfun.bessel("J", 2.0 * nu, x)) / cmath.sin(math.pi * nu)


def kernel_bracket(nu: Parameter, x, delta: int):
    """
    (J^delta_(-2 nu)(x) - J^delta_(2 nu)(x)) / sin(pi nu) with J^+ = J and J^- = I.

    The minus side is evaluated as (4/pi) cos(pi nu) K_(2 nu)(x). When sin(pi nu) is within
    ``KERNEL_LIMIT_THRESHOLD`` of zero the plus side is the limit in nu, taken as a symmetric
    average with one Richardson step.
    """
    nu, k = _split(nu)
    if delta not in (1, -1):
        raise DomainError(f"delta must be +1 or -1, got {delta}")
    if k is not None:
        if delta < 0:
            return np.zeros(np.shape(x), dtype=complex) if np.ndim(x) else 0j
        return 2.0 * (-1) ** k * specfun.bessel("J", 2 * k - 1, x)
    if delta < 0:
        return 4.0 / math.pi * cmath.cos(math.pi * nu) * specfun.bessel("K", 2.0 * nu, x)
    if abs(cmath.sin(math.pi * nu)) >= config.KERNEL_LIMIT_THRESHOLD:
        return _bracket_j(nu, x)

    def average(h):
        return 0.5 * (_bracket_j(nu + h, x) + _bracket_j(nu - h, x))

    h = config.KERNEL_LIMIT_STEP
    return (4.0 * average(0.5 * h) - average(h)) / 3.0


def bessel_kernel(nu: Parameter, u):
    """
    j_nu(u) = pi sqrt|u| (J^(sgn u)_(-2 nu) - J^(sgn u)_(2 nu))(4 pi sqrt|u|) / sin(pi nu).

    For the discrete series (nu = k - 1/2) this is 2 pi (-1)^k sqrt(u) J_(2k-1)(4 pi sqrt(u)) for
    u > 0 and 0 for u < 0. Real for unitary parameters.
    """
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u == 0.0):
        raise DomainError("the Bessel kernel is defined for u != 0")
    values = np.zeros(u.shape, dtype=complex)
    for delta, mask in ((1, u > 0), (-1, u < 0)):
        if np.any(mask):
            root = np.sqrt(np.abs(u[mask]))
            values[mask] = math.pi * root * kernel_bracket(nu, 4.0 * math.pi * root, delta)
    if _is_unitary(_split(nu)[0]):
        values = values.real
    return values[0] if scalar else values


# ------------------------------------------------------------------------------------------------
# Mellin transforms Gamma_p
# ------------------------------------------------------------------------------------------------


def _log_square_plus_one(w: complex) -> complex:
    """Principal log(e^(2w) + 1) without overflow, for |Im w| < pi/4."""
    if w.real > 0.0:
        return 2.0 * w + complex(np.log1p(cmath.exp(-2.0 * w)))
    return complex(np.log1p(cmath.exp(2.0 * w)))


def _cayley_power(w: complex, p: int) -> complex:
    """((xi + i)/(xi - i))^p at xi = e^w."""
    if w.real > 0.0:
        e = cmath.exp(-w)
        ratio = (1.0 + 1j * e) / (1.0 - 1j * e)
    else:
        xi = cmath.exp(w)
        ratio = (xi + 1j) / (xi - 1j)
    return ratio**p


def mellin_l(p: int, s: complex, nu: complex, spec: Optional[QuadratureSpec] = None) -> complex:
    """
    L_p(s) = int_0^oo xi^(nu - s) (xi^2 + 1)^(-nu - 1/2) ((xi + i)/(xi - i))^p d xi.

    Converges for -Re nu < Re s < 1 + Re nu. When |Im(s - nu)| > 1 the ray is turned through
    ``ROTATION_ANGLE`` towards the side where xi^(nu - s) decays.
    """
    s, nu = complex(s), complex(nu)
    if not -nu.real < s.real < 1.0 + nu.real:
        raise DomainError(f"L_p(s) needs -Re(nu) < Re(s) < 1 + Re(nu), got s={s}, nu={nu}")
    d = s - nu
    phi = -math.copysign(ROTATION_ANGLE, d.imag) if abs(d.imag) > 1.0 else 0.0
    t_lo = -config.DECAY_CUTOFF / (1.0 - d.real)
    t_hi = config.DECAY_CUTOFF / (s.real + nu.real)

    def integrand(t):
        w = complex(t, phi)
        return cmath.exp((1.0 - d) * w - (nu + 0.5) * _log_square_plus_one(w)) * _cayley_power(w, p)

    return complex(specfun.integrate(integrand, (t_lo, t_hi), spec).value)


def _gamma_p_strip(p: int, s: complex, nu: complex, spec: Optional[QuadratureSpec]) -> complex:
    d = s - nu
    if specfun.is_pole(d):
        raise PoleError(f"Gamma(s - nu) has a pole at s={s}, nu={nu}")
    prefactor = cmath.exp(-d * math.log(2.0 * math.pi)) * specfun.gamma(d)
    twist = cmath.exp(-0.5j * math.pi * d)
    return prefactor * (twist * mellin_l(p, s, nu, spec) + mellin_l(-p, s, nu, spec) / twist)


def _gamma_p_direct(p: int, s: complex, nu: complex, spec: Optional[QuadratureSpec]) -> complex:
    if not s.real > abs(nu.real):
        raise DomainError(f"the Mellin integral of K phi_p converges for Re(s) > |Re(nu)|, got s={s}")
    lo_exp, hi_exp = config.MELLIN_WINDOW
    ys, weights = specfun.gauss_legendre_panels(lo_exp, hi_exp, config.PANEL_NODES)
    values = jacquet_profile(p, nu, 1, ys, spec)
    body = complex(np.sum(weights * values * np.exp((s - 0.5) * np.log(ys))))
    y0 = 2.0**-lo_exp
    try:
        d1, d2 = jacquet_near_origin_coefficients(p, nu, 1)
    except DomainError:
        # logarithmic or discrete case: the window edge already makes the head negligible
        return body
    return body + d1 * y0 ** (s + nu) / (s + nu) + d2 * y0 ** (s - nu) / (s - nu)


def gamma_p(
    p: int, s: complex, nu: Parameter, spec: Optional[QuadratureSpec] = None, route: str = "auto"
) -> complex:
    """
    Gamma_p(s, nu) = int_0^oo A^+ phi_p(a[y]) y^(s - 3/2) dy, continued meromorphically.

    Routes: ``"strip"`` uses the L_p representation on -Re nu < Re s < 1 + Re nu, ``"direct"`` the
    Mellin integral of the Jacquet values (Re s > |Re nu|), ``"recursion"`` the three-term relation
    in s, and ``"functional"`` the local functional equation. ``"auto"`` picks the strip inside it,
    the direct integral to its right and the recursion to its left.
    """
    nu, _ = _split(nu)
    s = complex(s)
    if route == "auto":
        if -nu.real < s.real < 1.0 + nu.real:
            route = "strip"
        elif s.real >= 1.0 + nu.real:
            route = "direct"
        else:
            route = "recursion"
    if route == "strip":
        return _gamma_p_strip(p, s, nu, spec)
    if route == "direct":
        return _gamma_p_direct(p, s, nu, spec)
    if route == "recursion":
        if s * s == nu * nu:
            raise PoleError(f"the recursion in s is singular at s^2 = nu^2, s={s}")
        return 4.0 * math.pi * (math.pi * gamma_p(p, s + 2, nu, spec) - p * gamma_p(p, s + 1, nu, spec)) / (s * s - nu * nu)
    if route == "functional":
        return (-1) ** p * _functional_rhs(p, s, nu, spec)
    raise DomainError(f"unknown route {route!r}")


def _functional_rhs(p: int, s: complex, nu: complex, spec: Optional[QuadratureSpec]) -> complex:
    factor = cmath.exp((1.0 - 2.0 * s) * math.log(2.0) - 2.0 * s * math.log(math.pi))
    factor *= specfun.gamma(s + nu) * specfun.gamma(s - nu)
    return factor * (
        cmath.cos(math.pi * s) * gamma_p(p, 1.0 - s, nu, spec) + cmath.cos(math.pi * nu) * gamma_p(-p, 1.0 - s, nu, spec)
    )


def functional_equation_residual(p: int, s: complex, nu: Parameter, spec: Optional[QuadratureSpec] = None) -> float:
    """|LHS - RHS| / (1 + |LHS|) of (-1)^p Gamma_p(s) = 2^(1-2s) pi^(-2s) Gamma(s+nu) Gamma(s-nu) (...)."""
    nu, _ = _split(nu)
    s = complex(s)
    lhs = (-1) ** p * gamma_p(p, s, nu, spec)
    rhs = _functional_rhs(p, s, nu, spec)
    return abs(lhs - rhs) / (1.0 + abs(lhs))


def gamma_p_recursion_residual(p: int, s: complex, nu: Parameter, spec: Optional[QuadratureSpec] = None) -> float:
    """Residual of Gamma_p(s) = 4 pi (pi Gamma_p(s+2) - p Gamma_p(s+1)) / (s^2 - nu^2)."""
    nu, _ = _split(nu)
    s = complex(s)
    if s * s == nu * nu:
        raise DomainError(f"s^2 = nu^2 is singular for the recursion, s={s}")
    value = gamma_p(p, s, nu, spec)
    shifted = 4.0 * math.pi * (math.pi * gamma_p(p, s + 2, nu, spec) - p * gamma_p(p, s + 1, nu, spec)) / (s * s - nu * nu)
    return abs(value - shifted) / (1.0 + abs(value))


# ------------------------------------------------------------------------------------------------
# Mellin pairs of the kernel
# ------------------------------------------------------------------------------------------------


def _series_head(nu: complex, delta: int, s: complex, x0: float) -> complex:
    """int_0^x0 x^(2s-1) times the bracket, from the power series of J or I."""
    total = 0j
    for order, sign in ((-2.0 * nu, 1.0), (2.0 * nu, -1.0)):
        for m in range(SERIES_TERMS):
            power = 2.0 * s + order + 2 * m
            term = specfun.rgamma(m + 1) * specfun.rgamma(m + order + 1) * cmath.exp(-(order + 2 * m) * math.log(2.0))
            term *= cmath.exp(power * math.log(x0)) / power
            total += sign * (-1) ** m * term if delta > 0 else sign * term
    return total / cmath.sin(math.pi * nu)


def _hankel_tail(nu: complex, s: complex, cut: float, spec: Optional[QuadratureSpec]) -> complex:
    """int_cut^oo x^(2s-1) (J_(-2nu) - J_(2nu))(x) dx / sin(pi nu), split into Hankel parts on rotated rays."""

    def integrand(tau):
        total = 0j
        for kind, direction in ((1, 1j), (2, -1j)):
            z = cut + direction * tau
            hankel = specfun.hankel(kind, -2.0 * nu, z) - specfun.hankel(kind, 2.0 * nu, z)
            total += direction * cmath.exp((2.0 * s - 1.0) * cmath.log(z)) * hankel
        return 0.5 * total

    tail = specfun.integrate(integrand, (0.0, config.DECAY_CUTOFF), spec).value
    return tail / cmath.sin(math.pi * nu)


def kernel_mellin(s: complex, nu: Parameter, delta: int, spec: Optional[QuadratureSpec] = None) -> complex:
    """
    int j_nu(u) |u|^(s - 3/2) du over u > 0 (delta = +1) or u < 0 (delta = -1), by quadrature.

    With x = 4 pi sqrt|u| this is 2 pi (4 pi)^(-2s) int_0^oo x^(2s-1) bracket(x) dx, computed as a
    power-series head, an adaptive middle in log x and, on the plus side, a Hankel tail.
    """
    nu, k = _split(nu)
    s = complex(s)
    if delta > 0 and not abs(nu.real) < s.real < 0.25:
        raise DomainError(f"the plus-side Mellin integral needs |Re nu| < Re s < 1/4, got s={s}")
    if delta < 0 and not s.real > abs(nu.real):
        raise DomainError(f"the minus-side Mellin integral needs Re s > |Re nu|, got s={s}")
    if k is not None and delta < 0:
        return 0j
    head_cut = config.MELLIN_SERIES_CUT
    cut = config.MELLIN_HANKEL_CUT if delta > 0 else NEGATIVE_SIDE_CUT

    def middle(t):
        return cmath.exp(2.0 * s * t) * complex(kernel_bracket(nu, math.exp(t), delta))

    total = _series_head(nu, delta, s, head_cut)
    total += specfun.integrate(middle, (math.log(head_cut), math.log(cut)), spec).value
    if delta > 0:
        total += _hankel_tail(nu, s, cut, spec)
    return 2.0 * math.pi * cmath.exp(-2.0 * s * math.log(4.0 * math.pi)) * total


def kernel_mellin_closed_form(s: complex, nu: Parameter, delta: int) -> complex:
    """2^(1-2s) pi^(-2s) Gamma(s+nu) Gamma(s-nu) times cos(pi s) (plus side) or cos(pi nu) (minus side)."""
    nu, _ = _split(nu)
    s = complex(s)
    trig = cmath.cos(math.pi * s) if delta > 0 else cmath.cos(math.pi * nu)
    factor = cmath.exp((1.0 - 2.0 * s) * math.log(2.0) - 2.0 * s * math.log(math.pi))
    return factor * specfun.gamma(s + nu) * specfun.gamma(s - nu) * trig


def mellin_pair_residual(s: complex, nu: Parameter, side: str = "+", spec: Optional[QuadratureSpec] = None) -> float:
    """|numeric - closed| / (1 + |closed|) for the kernel Mellin identity on the given side."""
    if side not in ("+", "-"):
        raise DomainError(f"side must be '+' or '-', got {side!r}")
    delta = 1 if side == "+" else -1
    closed = kernel_mellin_closed_form(s, nu, delta)
    return abs(kernel_mellin(s, nu, delta, spec) - closed) / (1.0 + abs(closed))


# ------------------------------------------------------------------------------------------------
# Weyl element
# ------------------------------------------------------------------------------------------------


def _check_weyl(vec: KirillovVector) -> None:
    if not vec.discrete and not abs(vec.nu.real) < 0.5:
        raise DomainError("the Weyl element integral needs |Re nu| < 1/2 or the discrete series")


def _report(value: complex, coarse: complex, what: str) -> QuadratureResult:
    error = abs(value - coarse)
    if error > config.WEYL_TOL * max(1.0, abs(value)):
        logger.warning("%s: attained tolerance %.3g above %.3g", what, error, config.WEYL_TOL)
    return QuadratureResult(value, error)


def weyl_action(
    vec: KirillovVector, u: float, spec: Optional[QuadratureSpec] = None, nodes_per_unit: Optional[int] = None
) -> QuadratureResult:
    """
    K(omega(w) vec)(u) = int j_nu(u lambda) K vec(lambda) d lambda/|lambda|.

    Trapezoid rule in log|lambda| over the ``WEYL_WINDOW`` on both half lines. The error estimate is
    the difference to the rule with every other node; a warning is logged when it exceeds
    ``WEYL_TOL``.
    """
    _check_weyl(vec)
    if u == 0:
        raise DomainError("the Kirillov model lives on u != 0")
    nodes = nodes_per_unit or max(config.WEYL_NODES_PER_UNIT, int(math.ceil(4.0 * math.pi * math.sqrt(abs(u)))))
    lams, weights = specfun.trapezoid_log_grid(*config.WEYL_WINDOW, nodes)
    fine = coarse = 0j
    for sign in vec.signs():
        integrand = bessel_kernel(vec.param, u * sign * lams) * kirillov_values(vec, sign * lams, spec)
        fine += np.sum(weights * integrand)
        coarse += np.sum(2.0 * weights[::2] * integrand[::2])
    return _report(complex(fine), complex(coarse), f"Weyl action at u={u}")


def weyl_action_twice(
    vec: KirillovVector,
    u: float,
    spec: Optional[QuadratureSpec] = None,
    nodes_per_unit: int = config.WEYL_NODES_PER_UNIT,
) -> QuadratureResult:
    """
    omega(w)^2 vec evaluated in the Kirillov model at u, both integrals by quadrature.

    Since w^2 = 1 in G the result should reproduce K vec(u). On a uniform log grid the products
    lambda_i lambda_j fall on a grid again, so the kernel is tabulated once.
    """
    _check_weyl(vec)
    if u == 0:
        raise DomainError("the Kirillov model lives on u != 0")
    lams, weights = specfun.trapezoid_log_grid(*config.WEYL_WINDOW, nodes_per_unit)
    n = len(lams)
    step = math.log(lams[1] / lams[0])
    products = np.exp(2.0 * math.log(lams[0]) + step * np.arange(2 * n - 1))
    table = {sigma: bessel_kernel(vec.param, sigma * products) for sigma in (1, -1)}
    values = {sign: kirillov_values(vec, sign * lams, spec) for sign in vec.signs()}

    def apply_twice(stride: int) -> complex:
        index = np.arange(0, n, stride)
        w = weights[index] * stride
        pairs = (index[:, None] + index[None, :])
        outer = 0j
        for sign in (1, -1):
            inner = sum(table[sign * other][pairs] @ (w * values[other][index]) for other in vec.signs())
            outer += np.sum(w * bessel_kernel(vec.param, u * sign * lams[index]) * inner)
        return complex(outer)

    return _report(apply_twice(1), apply_twice(2), f"double Weyl action at u={u}")


# ------------------------------------------------------------------------------------------------
# Unitarity
# ------------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class GramReport:
    """Normalized Gram matrix (1/pi) int K phi_p conj(K phi_q) d^x u / (||phi_p|| ||phi_q||)."""

    ps: Tuple[int, ...]
    matrix: np.ndarray
    max_offdiag: float
    max_diag_dev: float
    error_estimate: float

    @property
    def pmax(self) -> int:
        return max(abs(p) for p in self.ps)

    @property
    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    @property
    def deviation(self) -> float:
        return max(self.max_offdiag, self.max_diag_dev)

    def entry(self, p: int, q: int) -> complex:
        return complex(self.matrix[self.ps.index(p), self.ps.index(q)])


def _basis_norms(param: SpectralParam, ps: Sequence[int]) -> np.ndarray:
    return np.array([vector_norm(KirillovVector.basis(p, param)) ** 2 for p in ps])


def gram_matrix(
    param: Parameter, pmax: int, spec: Optional[QuadratureSpec] = None, nodes_per_unit: int = config.GRAM_NODES_PER_UNIT
) -> GramReport:
    """
    Gram matrix of the basis phi_p in the Kirillov model.

    Indices run over |p| <= pmax, or k <= p <= k + pmax for D_k. Entries come from a trapezoid rule in
    log|u| over ``GRAM_WINDOW``; the error estimate compares with the rule on every other node.
    """
    if not isinstance(param, SpectralParam):
        param = SpectralParam.from_nu(param)
    if pmax < 0:
        raise DomainError("pmax must be non-negative")
    if param.kind is SeriesKind.DISCRETE:
        ps = tuple(range(param.k, param.k + pmax + 1))
        signs = (1,)
    else:
        ps = tuple(range(-pmax, pmax + 1))
        signs = (1, -1)

    us, weights = specfun.trapezoid_log_grid(*config.GRAM_WINDOW, nodes_per_unit)
    fine = np.zeros((len(ps), len(ps)), dtype=complex)
    coarse = np.zeros_like(fine)
    for delta in signs:
        profiles = np.array([jacquet_profile(p, param.nu, delta, us, spec) for p in ps])
        fine += (profiles * weights) @ profiles.conj().T
        coarse += (profiles[:, ::2] * (2.0 * weights[::2])) @ profiles[:, ::2].conj().T

    norms = np.sqrt(_basis_norms(param, ps))
    scale = 1.0 / (math.pi * np.outer(norms, norms))
    matrix, coarse = fine * scale, coarse * scale
    error = float(np.max(np.abs(matrix - coarse)))
    if error > config.GRAM_TOL:
        logger.warning("Gram matrix for %s: quadrature error estimate %.3g", param, error)

    offdiag = matrix - np.diag(np.diag(matrix))
    return GramReport(
        ps=ps,
        matrix=matrix,
        max_offdiag=float(np.max(np.abs(offdiag))),
        max_diag_dev=float(np.max(np.abs(np.diag(matrix) - 1.0))),
        error_estimate=error,
    )


# ------------------------------------------------------------------------------------------------
# Whittaker product integrals
# ------------------------------------------------------------------------------------------------


def whittaker_product_closed_form(alpha: complex, beta: complex, mu: complex) -> complex:
    """Closed form of int_0^oo W_(alpha,mu)(y) W_(beta,mu)(y) dy/y for |Re mu| < 1/2."""
    mu = complex(mu)
    if not abs(mu.real) < 0.5:
        raise DomainError(f"the product integral needs |Re mu| < 1/2, got {mu}")
    sine = cmath.sin(2.0 * math.pi * mu)
    if abs(sine) == 0.0:
        raise DomainError("the product integral closed form needs sin(2 pi mu) != 0")
    rg = specfun.rgamma
    if alpha == beta:
        digammas = specfun.digamma(0.5 - alpha + mu) - specfun.digamma(0.5 - alpha - mu)
        return math.pi / sine * rg(0.5 - alpha + mu) * rg(0.5 - alpha - mu) * digammas
    bracket = rg(0.5 - alpha + mu) * rg(0.5 - beta - mu) - rg(0.5 - alpha - mu) * rg(0.5 - beta + mu)
    return math.pi / ((alpha - beta) * sine) * bracket


def _whitw(alpha, mu):
    a = mpmath.mpc(complex(alpha).real, complex(alpha).imag)
    m = mpmath.mpc(mu.real, mu.imag)
    return lambda y: complex(mpmath.whitw(a, m, y))


def whittaker_product_integral(
    alpha: complex, beta: complex, mu: complex, spec: Optional[QuadratureSpec] = None
) -> Tuple[complex, complex]:
    """
    (quadrature, closed form) of int_0^oo W_(alpha,mu) W_(beta,mu) dy/y.

    The quadrature runs in log y above ``WHITTAKER_PRODUCT_EPS``; below it the two leading terms of
    each factor near the origin are integrated exactly.
    """
    mu = complex(mu)
    closed = whittaker_product_closed_form(alpha, beta, mu)
    eps = config.WHITTAKER_PRODUCT_EPS
    upper = 2.0 * config.DECAY_CUTOFF + 2.0 * (abs(alpha) + abs(beta))
    w_alpha, w_beta = _whitw(alpha, mu), _whitw(beta, mu)

    def integrand(t):
        y = math.exp(t)
        return w_alpha(y) * w_beta(y)

    numeric = specfun.integrate(integrand, (math.log(eps), math.log(upper)), spec).value
    try:
        a1, a2 = near_origin_coefficients(alpha, mu)
        b1, b2 = near_origin_coefficients(beta, mu)
    except DomainError:
        return complex(numeric), closed
    head = a1 * b1 * eps ** (2.0 * mu + 1.0) / (2.0 * mu + 1.0) + (a1 * b2 + a2 * b1) * eps
    head += a2 * b2 * eps ** (1.0 - 2.0 * mu) / (1.0 - 2.0 * mu)
    return complex(numeric + head), closed
