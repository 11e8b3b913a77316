"""Maass cusp forms of PSL(2, Z) by collocation.

A cusp form with spectral parameter nu = i kappa has the expansion

    u(z) = sum_(n >= 1) c(n) sqrt(y) K_(i kappa)(2 pi n y) cs(2 pi n x)

with cs = cos for even and cs = sin for odd forms. Truncated after M terms and sampled on a
horocycle y = Y below the fundamental domain, where u(z) = u(z*) for the pullback z* of z, the
expansion turns into a linear system for the c(n) with c(1) = 1. Its solution depends on Y unless
kappa is an eigenvalue, so the difference of c(2) between two heights is a defect whose zeros are
bracketed on a grid and refined with :func:`scipy.optimize.brentq`.

K-Bessel functions of imaginary order carry the factor e^(pi kappa / 2) throughout and are summed
by the trapezoid rule on a contour through the saddle point, vectorized over the argument.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from kuznetsov import config
from kuznetsov.analysis import specfun
from kuznetsov.analysis.specfun import MIN_MAASS_KAPPA
from kuznetsov.errors import DomainError
from kuznetsov.io.spectra import Manifest, MaassFormRecord, Normalization, SpectralDataset, from_prime_values

logger = logging.getLogger(__name__)

SQRT3_2 = math.sqrt(3.0) / 2.0

# arguments sharing one trapezoid step and cutoff
KBESSEL_CHUNK = 64
# fraction of the largest admissible trapezoid step actually used
KBESSEL_SAFETY = 0.8


# ------------------------------------------------------------------------------------------------
# K-Bessel of imaginary order
# ------------------------------------------------------------------------------------------------


def _kbessel_chunk(kappa: float, x: np.ndarray) -> np.ndarray:
    decay = config.KBESSEL_DECAY
    gap = min(math.pi / 2, config.KBESSEL_SADDLE_GAP / kappa) if kappa > 0 else math.pi / 2
    theta = np.minimum(np.arcsin(np.minimum(1.0, kappa / x)), math.pi / 2 - gap)
    a = x * np.cos(theta)
    b = x * np.sin(theta)

    width = math.pi / 2 - float(theta.max())
    h = KBESSEL_SAFETY * min(2 * math.pi * width / decay, math.pi * math.sqrt(2.0 / (decay * float(a.max()))))
    cutoff = math.acosh(1.0 + decay / float(a.min()))
    t = h * np.arange(int(math.ceil(cutoff / h)) + 1)
    weights = np.full(t.size, h)
    weights[0] = h / 2

    exponent = (kappa * (math.pi / 2 - theta))[:, None] - a[:, None] * np.cosh(t)
    phase = kappa * t - b[:, None] * np.sinh(t)
    return (np.exp(exponent) * np.cos(phase)) @ weights


def kbessel_scaled(kappa: float, x):
    """
    e^(pi kappa / 2) K_(i kappa)(x) for real kappa and x > 0.

    The integral of exp(-x cosh t) cos(kappa t) over t > 0 is moved to Im t = theta, where
    sin(theta) = kappa / x above the transition point and theta stays just under pi / 2 below it.
    Arguments are sorted and summed in chunks that share a step and a cutoff.

    Args:
        kappa: Order, the sign does not matter
        x: Positive argument, scalar or array

    Returns:
        A float for scalar input, otherwise an array of the shape of ``x``
    """
    kappa = abs(float(kappa))
    xs = np.asarray(x, dtype=float)
    flat = xs.ravel()
    if not np.all(flat > 0.0):
        raise DomainError("the K-Bessel function is evaluated at positive arguments only")
    out = np.empty_like(flat)
    order = np.argsort(flat)
    for chunk in np.array_split(order, max(1, -(-flat.size // KBESSEL_CHUNK))):
        if chunk.size:
            out[chunk] = _kbessel_chunk(kappa, flat[chunk])
    if xs.ndim == 0:
        return float(out[0])
    return out.reshape(xs.shape)


# ------------------------------------------------------------------------------------------------
# Geometry
# ------------------------------------------------------------------------------------------------


def pullback(x, y, max_steps: int = 200) -> Tuple[np.ndarray, np.ndarray]:
    """
    Image of x + iy in the fundamental domain |x| <= 1/2, x^2 + y^2 >= 1.

    Alternates the translation into |x| <= 1/2 with z -> -1/z while |z| < 1.
    """
    x, y = (np.array(v, dtype=float) for v in np.broadcast_arrays(x, y))
    if not np.all(y > 0.0):
        raise DomainError("points of the upper half plane have y > 0")
    for _ in range(max_steps):
        x -= np.floor(x + 0.5)
        r2 = x * x + y * y
        inside = r2 < 1.0 - 1e-14
        if not inside.any():
            return x, y
        x[inside] = -x[inside] / r2[inside]
        y[inside] = y[inside] / r2[inside]
    raise DomainError(f"pullback did not reach the fundamental domain in {max_steps} steps")


@dataclass(frozen=True)
class Collocation:
    """Points x_m = (2m - 1) / 4Q, m = 1..Q, on the horocycle y = height and their pullbacks."""

    height: float
    x: np.ndarray
    x_pull: np.ndarray
    y_pull: np.ndarray

    @property
    def points(self) -> int:
        return self.x.size


@lru_cache(maxsize=256)
def collocation(height: float, points: int) -> Collocation:
    if not 0.0 < height < SQRT3_2:
        raise DomainError(f"collocation height {height} must lie in (0, sqrt(3)/2)")
    x = (2.0 * np.arange(1, points + 1) - 1.0) / (4.0 * points)
    x_pull, y_pull = pullback(x, np.full(points, height))
    return Collocation(height, x, x_pull, y_pull)


# ------------------------------------------------------------------------------------------------
# Solver
# ------------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class MaassSolution:
    """
    A located eigenvalue.

    Attributes:
        kappa: Spectral parameter
        epsilon: 1 for even, -1 for odd forms
        coefficients: c(1) = 1, c(2), ..., c(M) from the higher horocycle
        discrepancy: Largest disagreement of c(p) between the heights and of the Hecke relations
    """

    kappa: float
    epsilon: int
    coefficients: Tuple[float, ...]
    discrepancy: float

    def c(self, n: int) -> float:
        return self.coefficients[n - 1]


def _parity_function(epsilon: int):
    if epsilon not in (1, -1):
        raise DomainError(f"parity must be 1 or -1, got {epsilon}")
    return np.cos if epsilon == 1 else np.sin


class HejhalSolver:
    """
    Collocation on two horocycles.

    Args:
        heights: Two distinct heights below sqrt(3)/2
        digits: Terms are kept while the scaled K-Bessel at the lower height exceeds 10^-digits
        extra_points: Collocation points beyond the number of terms
    """

    def __init__(
        self,
        heights: Sequence[float] = config.HEJHAL_HEIGHTS,
        digits: int = config.HEJHAL_DIGITS,
        extra_points: int = config.HEJHAL_EXTRA_POINTS,
    ):
        heights = tuple(float(y) for y in heights)
        if len(heights) != 2 or heights[0] == heights[1]:
            raise DomainError(f"two distinct heights are needed, got {heights}")
        for y in heights:
            if not 0.0 < y < SQRT3_2:
                raise DomainError(f"collocation height {y} must lie in (0, sqrt(3)/2)")
        if extra_points < 1:
            raise DomainError("the collocation points must outnumber the terms")
        self.heights = heights
        self.digits = digits
        self.extra_points = extra_points

    def terms(self, kappa: float) -> int:
        """Smallest M past the transition point where the lower horocycle term drops below 10^-digits."""
        y = min(self.heights)
        top = math.ceil((math.pi * kappa / 2 + 3 * self.digits + 20) / (2 * math.pi * y))
        n = np.arange(1, top + 1)
        x = 2 * math.pi * n * y
        small = (x >= kappa) & (np.abs(kbessel_scaled(kappa, x)) < 10.0 ** (-self.digits))
        if not small.any():
            raise DomainError(f"no truncation found for kappa = {kappa}")
        return max(config.HEJHAL_MIN_TERMS, int(n[np.argmax(small)]))

    def _tables(self, kappa: float, terms: int):
        n = np.arange(1, terms + 1)
        tables = []
        for y in self.heights:
            grid = collocation(y, terms + self.extra_points)
            args = 2 * math.pi * np.outer(n, grid.y_pull)
            values = kbessel_scaled(kappa, np.concatenate([2 * math.pi * n * y, args.ravel()]))
            diagonal = math.sqrt(y) * values[:terms]
            pulled = np.sqrt(grid.y_pull) * values[terms:].reshape(args.shape)
            tables.append((grid, diagonal, pulled))
        return tables

    @staticmethod
    def _solve(table, epsilon: int) -> np.ndarray:
        grid, diagonal, pulled = table
        cs = _parity_function(epsilon)
        n = np.arange(1, diagonal.size + 1)
        sample = cs(2 * math.pi * np.outer(n, grid.x))
        basis = pulled * cs(2 * math.pi * np.outer(n, grid.x_pull))
        system = (2.0 / grid.points) * sample @ basis.T - np.diag(diagonal)
        c = np.empty(diagonal.size)
        c[0] = 1.0
        try:
            c[1:] = np.linalg.solve(system[1:, 1:], -system[1:, 0])
        except np.linalg.LinAlgError:
            c[1:] = np.nan
        return c

    def coefficients(self, kappa: float, epsilon: int, terms: Optional[int] = None) -> np.ndarray:
        """c(1..M) on each horocycle, one row per height."""
        _parity_function(epsilon)
        terms = self.terms(kappa) if terms is None else terms
        return np.array([self._solve(table, epsilon) for table in self._tables(kappa, terms)])

    def defect(self, kappa: float, epsilon: int, terms: Optional[int] = None) -> float:
        c = self.coefficients(kappa, epsilon, terms)
        return float(c[0, 1] - c[1, 1])

    def _accept(self, kappa: float, epsilon: int, terms: int) -> Optional[MaassSolution]:
        c = self.coefficients(kappa, epsilon, terms)
        first = c[0]
        spread = max(abs(c[0, p - 1] - c[1, p - 1]) for p in config.HEJHAL_PRIMES)
        relations = max(abs(first[1] * first[2] - first[5]), abs(first[1] ** 2 - 1.0 - first[3]))
        discrepancy = max(spread, relations)
        if not discrepancy < config.HEJHAL_ACCEPT_TOL:
            logger.debug("rejected kappa = %.10f (parity %d): discrepancy %.3g", kappa, epsilon, discrepancy)
            return None
        return MaassSolution(float(kappa), epsilon, tuple(float(v) for v in first), float(discrepancy))

    def refine(self, kappa_lo: float, kappa_hi: float, epsilon: int) -> Optional[MaassSolution]:
        """The eigenvalue in a bracket where the defect changes sign, or None for a pole."""
        for terms in sorted({self.terms(kappa_hi), self.terms(kappa_lo)}, reverse=True):
            try:
                kappa = optimize.brentq(
                    self.defect, kappa_lo, kappa_hi, args=(epsilon, terms), xtol=config.HEJHAL_KAPPA_TOL
                )
            except ValueError:
                continue
            return self._accept(kappa, epsilon, terms)
        return None

    def search(self, kappa_lo: float, kappa_hi: float, step: float = config.HEJHAL_SCAN_STEP) -> List[MaassSolution]:
        """
        Every eigenvalue of either parity in [kappa_lo, kappa_hi], sorted by kappa.

        Both parities share the K-Bessel tables of each grid point. Sign changes of the defect at
        poles of the linear system are refined as well and dropped by the acceptance test.
        """
        if not 0.0 < kappa_lo < kappa_hi:
            raise DomainError(f"empty search range [{kappa_lo}, {kappa_hi}]")
        grid = np.linspace(kappa_lo, kappa_hi, int(math.ceil((kappa_hi - kappa_lo) / step)) + 1)
        defects: Dict[int, List[float]] = {1: [], -1: []}
        for kappa in grid:
            tables = self._tables(kappa, self.terms(kappa))
            for epsilon in defects:
                c = [self._solve(table, epsilon) for table in tables]
                defects[epsilon].append(c[0][1] - c[1][1])

        solutions = []
        for epsilon, values in defects.items():
            values = np.asarray(values)
            brackets = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
            for i in brackets:
                solution = self.refine(grid[i], grid[i + 1], epsilon)
                if solution is not None:
                    solutions.append(solution)
            logger.debug("parity %d: %d sign changes", epsilon, brackets.size)
        solutions.sort(key=lambda s: s.kappa)
        logger.info("found %d Maass forms with %.4g <= kappa <= %.4g", len(solutions), kappa_lo, kappa_hi)
        return solutions

    def petersson_norm(
        self,
        solution: MaassSolution,
        nodes: int = config.NORM_NODES,
        cusp_nodes: int = config.NORM_CUSP_NODES,
    ) -> float:
        """
        Integral of v^2 dx dy / y^2 over the fundamental domain, v = sum c(n) sqrt(y) k(2 pi n y) cs(2 pi n x)
        with the scaled K-Bessel k.

        Above y = 1 the x-integral is done termwise and y = e^s is integrated by Gauss-Legendre;
        below it a tensor Gauss-Legendre rule covers the strip between the unit circle and y = 1.
        """
        kappa = solution.kappa
        c = np.asarray(solution.coefficients)
        n = np.arange(1, c.size + 1)
        cs = _parity_function(solution.epsilon)

        t, w = np.polynomial.legendre.leggauss(cusp_nodes)
        end = np.log((math.pi * kappa / 2 + config.NORM_CUSP_TAIL) / (2 * math.pi * n))
        keep = end > 0.0
        s = 0.5 * end[keep, None] * (t + 1.0)
        k = kbessel_scaled(kappa, 2 * math.pi * n[keep, None] * np.exp(s))
        cusp = 0.5 * float(np.sum(c[keep] ** 2 * np.sum(0.5 * end[keep, None] * w * k**2, axis=1)))

        t, w = np.polynomial.legendre.leggauss(nodes)
        x = 0.25 * (t + 1.0)
        wx = 0.25 * w
        lo = np.sqrt(1.0 - x**2)
        y = lo[:, None] + 0.5 * (1.0 - lo)[:, None] * (t + 1.0)
        wy = 0.5 * (1.0 - lo)[:, None] * w
        k = kbessel_scaled(kappa, 2 * math.pi * n[:, None, None] * y[None])
        v = np.sqrt(y) * np.einsum("n,nij,ni->ij", c, k, cs(2 * math.pi * np.outer(n, x)))
        strip = 2.0 * float(np.sum(wx[:, None] * wy * v**2 / y**2))
        return cusp + strip


# ------------------------------------------------------------------------------------------------
# Tables
# ------------------------------------------------------------------------------------------------


def kuznetsov_weight(solver: HejhalSolver, solution: MaassSolution) -> float:
    """
    |rho(1)|^2 / cosh(pi kappa) of the L^2-unit form.

    With v the scaled series, the form with c(1) = 1 has squared norm 4 e^(-pi kappa) times the
    Petersson integral of v, which gives 1 / (2 N (1 + e^(-2 pi kappa))).
    """
    norm = solver.petersson_norm(solution)
    return 1.0 / (2.0 * norm * (1.0 + math.exp(-2.0 * math.pi * solution.kappa)))


def _primes(limit: int) -> List[int]:
    return [p for p in range(2, limit + 1) if specfun.factorize(p) == {p: 1}]


def _record(solver: HejhalSolver, solution: MaassSolution, hecke_limit: int) -> MaassFormRecord:
    return from_prime_values(
        solution.kappa,
        solution.epsilon,
        kuznetsov_weight(solver, solution),
        {p: solution.c(p) for p in _primes(hecke_limit)},
        hecke_limit,
        Normalization.KUZNETSOV_ALPHA,
    )


def tabulate(
    kappa_lo: float = MIN_MAASS_KAPPA,
    kappa_hi: float = config.MAASS_TABLE_KAPPA_MAX,
    hecke_limit: int = 10,
    solver: Optional[HejhalSolver] = None,
) -> SpectralDataset:
    """
    Every Maass form with kappa in [kappa_lo, kappa_hi] as a dataset in the Kuznetsov normalization.

    t(n) up to ``hecke_limit`` follow from the checked t(p) through the Hecke relations. The manifest
    claims completeness up to ``kappa_hi`` and a precision ten times the worst discrepancy.
    """
    unchecked = set(_primes(hecke_limit)) - set(config.HEJHAL_PRIMES)
    if hecke_limit < 2 or unchecked:
        raise DomainError(f"t(p) is checked for p in {config.HEJHAL_PRIMES} only, got a limit of {hecke_limit}")
    solver = solver or HejhalSolver()
    solutions = solver.search(max(kappa_lo, MIN_MAASS_KAPPA), kappa_hi)
    forms = tuple(_record(solver, s, hecke_limit) for s in solutions)
    worst = max((s.discrepancy for s in solutions), default=0.0)
    manifest = Manifest(
        source="hejhal",
        N=hecke_limit,
        kappa_max=float(kappa_hi),
        precision=max(1e-12, 10.0 * worst),
        normalization=Normalization.KUZNETSOV_ALPHA,
    )
    logger.info("tabulated %d forms up to kappa %.4g, precision %.2g", len(forms), kappa_hi, manifest.precision)
    return SpectralDataset(forms, (), manifest)
