"""
Kloosterman sums and the two sum formulas connecting them with the spectrum.

For non-zero integers m, n with delta = sgn(mn) the spectral side

    sum_V conj(varrho_V(m)) varrho_V(n) h(nu_V)
        + (1/4 pi i) int_(0) sigma_2r(m) sigma_2r(n) / ((mn)^r zeta(1+2r) zeta(1-2r)) h(r) dr

equals a sum of S(m, n; l) / l against a Bessel transform of h. With h = f a spectral weight the
Kloosterman side carries the transform A^delta f and a diagonal term; with h = B^delta phi for a
geometric weight phi it is the finite sum of S(m, n; l) / l phi(4 pi sqrt|mn| / l).
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import integrate as sp_integrate

from kuznetsov import config
from kuznetsov.analysis import specfun
from kuznetsov.analysis.kirillov import bessel_kernel, kernel_bracket, kernel_mellin_closed_form
from kuznetsov.analysis.specfun import QuadratureResult, QuadratureSpec
from kuznetsov.analysis.weights import TestWeight, WeightKind
from kuznetsov.errors import DatasetError, DomainError, KuznetsovError
from kuznetsov.io.spectra import SpectralDataset, normalize, normalize_holomorphic

logger = logging.getLogger(__name__)

Weight = Callable[[complex], complex]


# ------------------------------------------------------------------------------------------------
# Kloosterman sums
# ------------------------------------------------------------------------------------------------


def kloosterman_sum(m: int, n: int, ell: int) -> float:
    """
    S(m, n; l) = sum over d mod l coprime to l of e((m d + n dbar) / l), d dbar = 1 mod l.

    The phases are reduced in integer arithmetic; the sum is real and its imaginary part is
    checked against ``KLOOSTERMAN_IMAG_TOL`` before it is dropped.
    """
    if ell < 1:
        raise DomainError(f"the modulus must be positive, got {ell}")
    if ell == 1:
        return 1.0
    residues = [d for d in range(1, ell) if math.gcd(d, ell) == 1]
    phases = np.array([(m * d + n * pow(d, -1, ell)) % ell for d in residues], dtype=float)
    total = np.sum(np.exp(2j * np.pi * phases / ell))
    if abs(total.imag) > config.KLOOSTERMAN_IMAG_TOL:
        raise KuznetsovError(f"S({m},{n};{ell}) has imaginary part {total.imag:.3g}")
    return float(total.real)


@dataclass(frozen=True)
class WeilReport:
    limit: int
    max_ratio: float
    worst_prime: int
    violations: Tuple[int, ...]

    @property
    def holds(self) -> bool:
        return not self.violations


def weil_bound_check(limit: int = config.WEIL_PRIME_LIMIT, m: int = 1, n: int = 1) -> WeilReport:
    """|S(m, n; p)| <= 2 sqrt(p) for the primes p <= limit not dividing mn."""
    worst, worst_prime, violations = 0.0, 0, []
    for p in range(2, limit + 1):
        if specfun.factorize(p) != {p: 1} or (m * n) % p == 0:
            continue
        ratio = abs(kloosterman_sum(m, n, p)) / (2.0 * math.sqrt(p))
        if ratio > worst:
            worst, worst_prime = ratio, p
        if ratio > 1.0 + 1e-12:
            violations.append(p)
    return WeilReport(limit, worst, worst_prime, tuple(violations))


# ------------------------------------------------------------------------------------------------
# Bessel transforms
# ------------------------------------------------------------------------------------------------


def _check_signs(m: int, n: int) -> int:
    if m == 0 or n == 0:
        raise DomainError(f"the sum formulas need non-zero m, n, got ({m}, {n})")
    return 1 if m * n > 0 else -1


def _check_kind(weight: TestWeight, kind: WeightKind) -> None:
    if weight.kind is not kind:
        raise DomainError(f"{weight.name} is a {weight.kind.value} weight, a {kind.value} one is needed")


def transform_A(
    f: TestWeight, delta: int, x: float, spec: Optional[QuadratureSpec] = None, cutoff: Optional[float] = None
) -> complex:
    """
    A^delta f(x) = (i/4 pi) int_(0) bracket^delta(nu, x) nu tan(pi nu) f(nu) d nu.

    On nu = it the integrand is even in t, so the integral is (1/2 pi) times the one over
    0 <= t <= cutoff of bracket(it, x) t tanh(pi t) f(it).
    """
    _check_kind(f, WeightKind.SPECTRAL)
    if delta not in (1, -1):
        raise DomainError(f"delta must be +1 or -1, got {delta}")
    if not x > 0.0:
        raise DomainError(f"A^delta f is evaluated at x > 0, got {x}")
    if delta < 0 and not f.decay_rate > 0.0:
        raise DomainError(f"{f.name} does not decay fast enough for the I-Bessel side")
    cutoff = cutoff or f.cutoff

    def integrand(t):
        bracket = complex(kernel_bracket(1j * t, x, delta))
        return bracket * t * math.tanh(math.pi * t) * complex(f(1j * t))

    return complex(specfun.integrate(integrand, (0.0, cutoff), spec).value) / (2.0 * math.pi)


def transform_B(phi: TestWeight, delta: int, nu: complex, spec: Optional[QuadratureSpec] = None) -> complex:
    """B^delta phi(nu) = 2 pi int_0^oo bracket^delta(nu, x) phi(x) dx/x over the support of phi."""
    _check_kind(phi, WeightKind.GEOMETRIC)
    if delta not in (1, -1):
        raise DomainError(f"delta must be +1 or -1, got {delta}")
    lo, hi = phi.support

    def integrand(t):
        x = math.exp(t)
        return complex(kernel_bracket(nu, x, delta)) * float(phi(x))

    return 2.0 * math.pi * complex(specfun.integrate(integrand, (math.log(lo), math.log(hi)), spec).value)


# ------------------------------------------------------------------------------------------------
# Sides of the sum formulas
# ------------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometricSide:
    """sum_l S(m, n; l) / l phi(4 pi sqrt|mn| / l) as (l, S, phi) terms."""

    value: complex
    terms: Tuple[Tuple[int, float, float], ...]
    tail: float = 0.0


def geometric_side(m: int, n: int, phi: TestWeight, ell_max: Optional[int] = None) -> GeometricSide:
    """
    The Kloosterman side of the Kloosterman to spectral formula.

    Only moduli with 4 pi sqrt|mn| / l inside the support of phi contribute, so the sum is finite
    and its tail vanishes. An ``ell_max`` below the last contributing modulus is an error.
    """
    _check_signs(m, n)
    _check_kind(phi, WeightKind.GEOMETRIC)
    lo, hi = phi.support
    scale = 4.0 * math.pi * math.sqrt(abs(m * n))
    first, last = max(1, math.ceil(scale / hi)), math.floor(scale / lo)
    if ell_max is not None and ell_max < last:
        raise DomainError(f"ell_max = {ell_max} cuts the support of {phi.name}; moduli up to {last} contribute")
    terms = []
    for ell in range(first, last + 1):
        terms.append((ell, kloosterman_sum(m, n, ell), float(phi(scale / ell))))
    value = math.fsum(s * w / ell for ell, s, w in terms)
    logger.debug("geometric side (%d, %d): moduli %d..%d", m, n, first, last)
    return GeometricSide(complex(value), tuple(terms))


def delta_term(m: int, n: int, f: TestWeight, spec: Optional[QuadratureSpec] = None) -> complex:
    """delta_(m,n) (i / 4 pi^2) int_(0) r tan(pi r) f(r) dr, as (1/2 pi^2) int_0^oo t tanh(pi t) f(it) dt."""
    _check_kind(f, WeightKind.SPECTRAL)
    if m != n:
        return 0j

    def integrand(t):
        return t * math.tanh(math.pi * t) * complex(f(1j * t))

    return complex(specfun.integrate(integrand, (0.0, f.cutoff), spec).value) / (2.0 * math.pi**2)


def continuous_integrand(m: int, n: int, weight: Weight, t: float) -> complex:
    """sigma_2r(|m|) sigma_2r(|n|) |mn|^(-r) h(r) / (zeta(1+2r) zeta(1-2r)) at r = it; zero at r = 0."""
    if t == 0.0:
        return 0j
    r = 1j * t
    divisor = specfun.sigma(2.0 * r, abs(m)) * specfun.sigma(2.0 * r, abs(n)) * cmath.exp(-r * math.log(abs(m * n)))
    return divisor * complex(weight(r)) / (specfun.zeta(1.0 + 2.0 * r) * specfun.zeta(1.0 - 2.0 * r))


def continuous_term(
    m: int, n: int, weight: Weight, nu_cutoff: float, spec: Optional[QuadratureSpec] = None
) -> QuadratureResult:
    """(1/4 pi i) int over r = it, |t| <= nu_cutoff, folded onto t >= 0."""
    return specfun.integrate(lambda t: continuous_integrand(m, n, weight, t), (0.0, nu_cutoff), spec).scaled(
        1.0 / (2.0 * math.pi)
    )


@dataclass(frozen=True)
class FormContribution:
    label: str
    nu: complex
    coefficient: complex
    weight: complex

    @property
    def value(self) -> complex:
        return self.coefficient * self.weight


@dataclass(frozen=True)
class SpectralSide:
    value: complex
    contributions: Tuple[FormContribution, ...]
    continuous: QuadratureResult
    nu_cutoff: float
    discrete_series_included: bool

    @property
    def num_forms(self) -> int:
        return len(self.contributions)


def spectral_side(
    m: int,
    n: int,
    weight: Weight,
    data: SpectralDataset,
    nu_cutoff: Optional[float] = None,
    spec: Optional[QuadratureSpec] = None,
    principal_only: bool = False,
) -> SpectralSide:
    """
    Discrete and continuous spectral contributions for the weight h.

    Maass forms with kappa <= nu_cutoff enter with conj(varrho(m)) varrho(n) h(i kappa). Holomorphic
    forms enter only when mn > 0 and ``principal_only`` is false, through their holomorphic
    (m, n > 0) or anti-holomorphic (m, n < 0) representation.

    Raises:
        DatasetError: The dataset does not reach the requested cutoff
    """
    _check_signs(m, n)
    kappa_max = data.manifest.kappa_max
    nu_cutoff = kappa_max if nu_cutoff is None else float(nu_cutoff)
    if nu_cutoff > kappa_max * (1.0 + 1e-12):
        raise DatasetError(f"dataset covers kappa <= {kappa_max}, cutoff {nu_cutoff} requested")

    contributions = []
    for rec in data.forms:
        if rec.kappa > nu_cutoff:
            continue
        coefficient = normalize(rec, m).conjugate() * normalize(rec, n)
        contributions.append(FormContribution(rec.label, 1j * rec.kappa, coefficient, complex(weight(1j * rec.kappa))))

    include_discrete = not principal_only and m * n > 0
    if include_discrete:
        anti = m < 0
        for rec in data.holo:
            coefficient = normalize_holomorphic(rec, m, anti).conjugate() * normalize_holomorphic(rec, n, anti)
            nu = complex(rec.k - 0.5)
            contributions.append(FormContribution(rec.label, nu, coefficient, complex(weight(nu))))

    continuous = continuous_term(m, n, weight, nu_cutoff, spec)
    value = math.fsum(c.value.real for c in contributions) + 1j * math.fsum(c.value.imag for c in contributions)
    logger.info("spectral side (%d, %d): %d forms up to kappa %.4g", m, n, len(contributions), nu_cutoff)
    return SpectralSide(value + continuous.value, tuple(contributions), continuous, nu_cutoff, include_discrete)


# ------------------------------------------------------------------------------------------------
# Sum formulas
# ------------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class SumFormulaReport:
    """
    Both sides of a sum formula and the decomposition of their difference.

    ``budgets`` holds the estimated size of what each truncation leaves out: the discrete spectrum
    beyond the cutoff, the quadrature of the continuous spectrum, and the tail of the l-sum.
    """

    direction: str
    m: int
    n: int
    delta: int
    spectral_side: complex
    geometric_side: complex
    contributions: Tuple[FormContribution, ...]
    continuous_term: complex
    delta_term: complex
    truncation: Dict[str, float]
    budgets: Dict[str, float]
    discrete_series_included: bool
    residual: float = field(init=False)

    def __post_init__(self):
        residual = abs(self.spectral_side - self.geometric_side) / (1.0 + abs(self.geometric_side))
        object.__setattr__(self, "residual", residual)

    @property
    def relative_error(self) -> float:
        return abs(self.spectral_side - self.geometric_side) / abs(self.geometric_side)

    @property
    def total_budget(self) -> float:
        return sum(self.budgets.values())


def _t_bound(n: int) -> float:
    return 1.0 if abs(n) == 1 else config.HECKE_BOUND_CONSTANT * abs(n) ** config.HECKE_BOUND_EXPONENT


def spectral_tail_estimate(m: int, n: int, weight: Weight, kappa_from: float) -> float:
    """
    Estimate of the Maass forms beyond ``kappa_from``.

    Uses the mean density kappa / (2 pi^2) of |varrho_V(1)|^2 over the spectrum and the Hecke
    bound for t(m) t(n), integrated over ``SPECTRAL_TAIL_SPAN``.
    """
    kappas = np.linspace(kappa_from, kappa_from + config.SPECTRAL_TAIL_SPAN, config.SPECTRAL_TAIL_SAMPLES)
    sizes = np.array([abs(complex(weight(1j * k))) for k in kappas]) * kappas / (2.0 * math.pi**2)
    return float(sp_integrate.trapezoid(sizes, kappas)) * _t_bound(m) * _t_bound(n)


def sum_formula_kloosterman(
    m: int,
    n: int,
    phi: TestWeight,
    data: SpectralDataset,
    ell_max: Optional[int] = None,
    nu_cutoff: Optional[float] = None,
    spec: Optional[QuadratureSpec] = None,
) -> SumFormulaReport:
    """
    Kloosterman side sum_l S(m, n; l) / l phi(4 pi sqrt|mn| / l) against the spectral side with
    h = B^delta phi.
    """
    delta = _check_signs(m, n)
    geometric = geometric_side(m, n, phi, ell_max)

    def weight(nu):
        return transform_B(phi, delta, nu, spec)

    spectral = spectral_side(m, n, weight, data, nu_cutoff, spec)
    budgets = {
        "spectral_truncation": spectral_tail_estimate(m, n, weight, spectral.nu_cutoff),
        "quadrature": spectral.continuous.error,
        "kloosterman_tail": geometric.tail,
    }
    return SumFormulaReport(
        direction="kloosterman",
        m=m,
        n=n,
        delta=delta,
        spectral_side=spectral.value,
        geometric_side=geometric.value,
        contributions=spectral.contributions,
        continuous_term=spectral.continuous.value,
        delta_term=0j,
        truncation={
            "num_forms": spectral.num_forms,
            "ell_max": geometric.terms[-1][0] if geometric.terms else 0,
            "nu_cutoff": spectral.nu_cutoff,
        },
        budgets=budgets,
        discrete_series_included=spectral.discrete_series_included,
    )


def sum_formula_spectral(
    m: int,
    n: int,
    f: TestWeight,
    data: SpectralDataset,
    ell_max: int = config.ELL_MAX_DEFAULT,
    nu_cutoff: Optional[float] = None,
    spec: Optional[QuadratureSpec] = None,
) -> SumFormulaReport:
    """
    Spectral side over the unitary principal series with weight f against the diagonal term plus
    sum_l S(m, n; l) / l A^delta f(4 pi sqrt|mn| / l).

    The l-sum stops at ``ell_max`` or once the Weil tail estimate drops below
    ``KLOOSTERMAN_TAIL_TOL``. The estimate bounds |S(m, n; l)| by d(l) sqrt(gcd) sqrt(l) and assumes
    |A^delta f(x)| decays at least linearly as x -> 0.
    """
    delta = _check_signs(m, n)
    _check_kind(f, WeightKind.SPECTRAL)
    spectral = spectral_side(m, n, f, data, nu_cutoff, spec, principal_only=True)
    diagonal = delta_term(m, n, f, spec)

    scale = 4.0 * math.pi * math.sqrt(abs(m * n))
    terms, tail, last = [], math.inf, 0
    for ell in range(1, ell_max + 1):
        s = kloosterman_sum(m, n, ell)
        a = transform_A(f, delta, scale / ell, spec)
        terms.append(s * a / ell)
        last = ell
        tail = abs(a) * 2.0 * math.sqrt(ell) * (math.log(ell) + 2.0) * math.sqrt(math.gcd(abs(m), abs(n)))
        if tail < config.KLOOSTERMAN_TAIL_TOL:
            break
    else:
        logger.warning("l-sum stopped at ell_max = %d with tail estimate %.3g", ell_max, tail)
    kloosterman = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))

    budgets = {
        "spectral_truncation": spectral_tail_estimate(m, n, f, spectral.nu_cutoff),
        "quadrature": spectral.continuous.error,
        "kloosterman_tail": tail,
    }
    return SumFormulaReport(
        direction="spectral",
        m=m,
        n=n,
        delta=delta,
        spectral_side=spectral.value,
        geometric_side=diagonal + kloosterman,
        contributions=spectral.contributions,
        continuous_term=spectral.continuous.value,
        delta_term=diagonal,
        truncation={"num_forms": spectral.num_forms, "ell_max": last, "nu_cutoff": spectral.nu_cutoff},
        budgets=budgets,
        discrete_series_included=False,
    )


# ------------------------------------------------------------------------------------------------
# Fourth-moment kernel
# ------------------------------------------------------------------------------------------------


def _check_xi(u: float, nu: complex) -> complex:
    nu = complex(nu)
    if not u > 0.0:
        raise DomainError(f"Xi(u; nu) needs u > 0, got {u}")
    if not abs(nu.real) < 0.5:
        raise DomainError(f"Xi(u; nu) needs |Re nu| < 1/2, got {nu}")
    return nu


def xi_kernel(
    u: float, nu: complex, spec: Optional[QuadratureSpec] = None, log_cut: float = config.XI_LOG_CUT
) -> QuadratureResult:
    """
    Xi(u; nu) = int over R^x of j_0(-v) j_nu(v/u) d^x v / sqrt|v|.

    Both half lines are integrated in log|v| from -``log_cut`` up to where the K-Bessel factor has
    decayed by exp(-DECAY_CUTOFF). The error adds the quadrature estimate and the analytic size
    of the piece below the cut, where the integrand behaves like |v|^(1/2 - |Re nu|) log|v|.
    """
    nu = _check_xi(u, nu)
    t_hi = math.log((config.DECAY_CUTOFF / (4.0 * math.pi)) ** 2 * max(1.0, u))
    rate = 0.5 - abs(nu.real)
    value, error = 0j, 0.0
    for sign in (1, -1):

        def integrand(t, sign=sign):
            v = math.exp(t)
            return complex(bessel_kernel(0.0, -sign * v)) * complex(bessel_kernel(nu, sign * v / u)) * math.exp(-0.5 * t)

        piece = specfun.integrate(integrand, (-log_cut, t_hi), spec)
        head = abs(integrand(-log_cut)) / rate * (1.0 + 1.0 / (rate * log_cut))
        value += piece.value
        error += piece.error + head
    if error > config.XI_TOL * max(1.0, abs(value)):
        logger.warning("Xi(%g; %s): attained tolerance %.3g above %.3g", u, nu, error, config.XI_TOL)
    return QuadratureResult(value, error)


def xi_kernel_mellin(u: float, nu: complex, spec: Optional[QuadratureSpec] = None) -> complex:
    """
    Xi(u; nu) from the Mellin transforms of the Bessel kernels.

    Each half line is a Mellin convolution, (1/2 pi i) int_(c) M_nu(s) M_0(1/2 - s) u^(s - 1/2) ds with
    the closed-form kernel transforms; c lies in (|Re nu|, 1/4) on the positive half line and in
    (max(1/4, |Re nu|), 1/2) on the negative one. Needs |Re nu| < 1/4.
    """
    nu = _check_xi(u, nu)
    if not abs(nu.real) < 0.25:
        raise DomainError(f"the Mellin route needs |Re nu| < 1/4, got {nu}")
    height = config.DECAY_CUTOFF / math.pi + abs(nu.imag) + 5.0
    total = 0j
    for sign in (1, -1):
        c = 0.5 * (abs(nu.real) + 0.25) if sign > 0 else 0.5 * (max(0.25, abs(nu.real)) + 0.5)

        def integrand(t, sign=sign, c=c):
            s = complex(c, t)
            return (
                kernel_mellin_closed_form(s, nu, sign)
                * kernel_mellin_closed_form(0.5 - s, 0.0, -sign)
                * cmath.exp((s - 0.5) * math.log(u))
            )

        total += specfun.integrate(integrand, (-height, height), spec).value
    return total / (2.0 * math.pi)
