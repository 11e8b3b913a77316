"""Left-invariant differential operators on G.

Operators act on smooth functions given in Iwasawa coordinates (x, y, theta). Derivatives are
central finite differences; operator products (commutators, the quadratic forms of the Casimir
operator) are obtained by nesting, i.e. by differentiating a function whose values are themselves
finite-difference derivatives.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Tuple

import numpy as np

from kuznetsov import config
from kuznetsov.analysis.group import (
    GroupElement,
    IwasawaCoords,
    a_matrix,
    compose,
    iwasawa_decompose,
    k_matrix,
    n_matrix,
)
from kuznetsov.errors import DomainError

logger = logging.getLogger(__name__)


class LieOperator(str, Enum):
    X1 = "X1"
    X2 = "X2"
    X3 = "X3"
    W = "W"
    EPLUS = "Eplus"
    EMINUS = "Eminus"
    CASIMIR = "Casimir"

    @property
    def order(self) -> int:
        return 2 if self is LieOperator.CASIMIR else 1


@dataclass(frozen=True)
class FiniteDifferenceSpec:
    """Central difference step (relative to the function's scale), stencil order and extrapolation."""

    step: float = config.FD_STEP
    order: int = config.FD_ORDER
    richardson: bool = False

    def __post_init__(self):
        if not 1e-8 <= self.step <= 1e-1:
            raise DomainError(f"finite difference step {self.step} outside [1e-8, 1e-1]")
        if self.order not in (2, 4):
            raise DomainError(f"stencil order must be 2 or 4, got {self.order}")


@dataclass(frozen=True)
class JetFunction:
    """
    A smooth function on G in Iwasawa coordinates, pi-periodic in theta.

    Args:
        evaluator: Callable (x, y, theta) -> complex
        smoothness_hint: Highest derivative order the function supports
        scale_hint: Characteristic length in x and log y; finite difference steps scale with it
        periodic_check: Sample the evaluator for pi-periodicity on construction
    """

    evaluator: Callable[[float, float, float], complex]
    smoothness_hint: int = 4
    scale_hint: float = 1.0
    periodic_check: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.scale_hint <= 0.0:
            raise DomainError("scale_hint must be positive")
        if self.periodic_check:
            for x, y, theta in ((0.0, 1.0, 0.0), (0.37, 0.6, 0.9), (-1.2, 2.3, 2.1)):
                value = complex(self.evaluator(x, y, theta))
                if abs(complex(self.evaluator(x, y, theta + math.pi)) - value) > 1e-9 * (1.0 + abs(value)):
                    raise DomainError("function on G must be pi-periodic in theta")

    def __call__(self, x: float, y: float, theta: float) -> complex:
        return complex(self.evaluator(x, y, theta))

    def at(self, coords: IwasawaCoords) -> complex:
        return self(coords.x, coords.y, coords.theta)


_FIRST = {2: ((-1, 1), (-0.5, 0.5)), 4: ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12))}
_SECOND = {2: ((-1, 0, 1), (1.0, -2.0, 1.0)), 4: ((-2, -1, 0, 1, 2), (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12))}
_ZEROTH = ((0,), (1.0,))


def _stencil(derivative: int, order: int):
    if derivative == 0:
        return _ZEROTH
    return (_FIRST if derivative == 1 else _SECOND)[order]


def _partial(f: JetFunction, at: IwasawaCoords, orders: Tuple[int, int, int], fd: FiniteDifferenceSpec, scale: float) -> complex:
    """Mixed partial derivative d^orders of f at a point, one tensor stencil."""
    h = (
        fd.step * f.scale_hint * scale,
        min(fd.step * f.scale_hint * scale * at.y, 0.25 * at.y),
        fd.step * min(f.scale_hint, 1.0) * scale,
    )
    stencils = [_stencil(k, fd.order) for k in orders]
    total = 0j
    for ix, wx in zip(*stencils[0]):
        for iy, wy in zip(*stencils[1]):
            for it, wt in zip(*stencils[2]):
                weight = wx * wy * wt
                total += weight * f(at.x + ix * h[0], at.y + iy * h[1], at.theta + it * h[2])
    return total / (h[0] ** orders[0] * h[1] ** orders[1] * h[2] ** orders[2])


def partial(f: JetFunction, at: IwasawaCoords, orders: Tuple[int, int, int], fd: FiniteDifferenceSpec) -> complex:
    """Partial derivative of total order at most two, with optional Richardson extrapolation."""
    if sum(orders) > f.smoothness_hint:
        raise DomainError(f"derivative of order {sum(orders)} exceeds the smoothness of the function")
    coarse = _partial(f, at, orders, fd, 1.0)
    if not fd.richardson:
        return coarse
    fine = _partial(f, at, orders, fd, 0.5)
    factor = 2.0**fd.order
    return (factor * fine - coarse) / (factor - 1.0)


def apply(op: LieOperator, f: JetFunction, at: IwasawaCoords, fd: FiniteDifferenceSpec = FiniteDifferenceSpec()) -> complex:
    """
    Apply a left-invariant operator to f at a point.

    Parameters
    ----------
    op : LieOperator
        Operator to apply.
    f : JetFunction
        Function on G.
    at : IwasawaCoords
        Evaluation point.
    fd : FiniteDifferenceSpec
        Finite difference policy.

    Returns
    -------
    complex
        The value (op f)(at).
    """
    op = LieOperator(op)
    if op.order > f.smoothness_hint:
        raise DomainError(f"{op.value} needs {op.order} derivatives, function supports {f.smoothness_hint}")
    d = lambda nx, ny, nt: partial(f, at, (nx, ny, nt), fd)  # noqa: E731
    y, theta = at.y, at.theta
    sin2, cos2 = math.sin(2 * theta), math.cos(2 * theta)

    if op in (LieOperator.X3, LieOperator.W):
        return d(0, 0, 1)
    if op is LieOperator.X1:
        return y * cos2 * d(1, 0, 0) + y * sin2 * d(0, 1, 0) + math.sin(theta) ** 2 * d(0, 0, 1)
    if op is LieOperator.X2:
        return -2 * y * sin2 * d(1, 0, 0) + 2 * y * cos2 * d(0, 1, 0) + sin2 * d(0, 0, 1)
    if op is LieOperator.EPLUS:
        return cmath.exp(2j * theta) * (2j * y * d(1, 0, 0) + 2 * y * d(0, 1, 0) - 1j * d(0, 0, 1))
    if op is LieOperator.EMINUS:
        return cmath.exp(-2j * theta) * (-2j * y * d(1, 0, 0) + 2 * y * d(0, 1, 0) + 1j * d(0, 0, 1))
    return -y * y * (d(2, 0, 0) + d(0, 2, 0)) + y * d(1, 0, 1)


def composed(op: LieOperator, f: JetFunction, fd: FiniteDifferenceSpec = FiniteDifferenceSpec()) -> JetFunction:
    """The function op f, for nested application."""
    op = LieOperator(op)
    return JetFunction(
        lambda x, y, theta: apply(op, f, IwasawaCoords(x, y, theta), fd),
        smoothness_hint=f.smoothness_hint - op.order,
        scale_hint=f.scale_hint,
        periodic_check=False,
    )


def _one_parameter(j: int, t: float) -> GroupElement:
    if j == 1:
        return n_matrix(t)
    if j == 2:
        return a_matrix(math.exp(2.0 * t))
    if j == 3:
        return k_matrix(t)
    raise DomainError(f"no one-parameter subgroup X{j}")


def apply_by_right_translation(
    j: int, f: JetFunction, g: GroupElement, fd: FiniteDifferenceSpec = FiniteDifferenceSpec()
) -> complex:
    """d/dt f(g exp(X_j t)) at t = 0, along the exact one-parameter subgroups."""
    if f.smoothness_hint < 1:
        raise DomainError("function is not differentiable")
    offsets, weights = _FIRST[fd.order]

    def derivative(h):
        values = [f.at(iwasawa_decompose(g @ _one_parameter(j, k * h))) for k in offsets]
        return sum(w * v for w, v in zip(weights, values)) / h

    h = fd.step * f.scale_hint
    coarse = derivative(h)
    if not fd.richardson:
        return coarse
    factor = 2.0**fd.order
    return (factor * derivative(0.5 * h) - coarse) / (factor - 1.0)


def right_translate(f: JetFunction, h: GroupElement) -> JetFunction:
    """The function g -> f(g h)."""
    return JetFunction(
        lambda x, y, theta: f.at(iwasawa_decompose(compose(IwasawaCoords(x, y, theta)) @ h)),
        smoothness_hint=f.smoothness_hint,
        scale_hint=f.scale_hint,
        periodic_check=False,
    )


_X1, _X2, _X3, _W, _EP, _EM = (
    LieOperator.X1,
    LieOperator.X2,
    LieOperator.X3,
    LieOperator.W,
    LieOperator.EPLUS,
    LieOperator.EMINUS,
)

COMMUTATORS: Dict[Tuple[LieOperator, LieOperator], Dict[LieOperator, complex]] = {
    (_X1, _X2): {_X1: -2.0},
    (_X1, _X3): {_X2: -1.0},
    (_X2, _X3): {_X1: 4.0, _X3: -2.0},
    (_W, _EP): {_EP: 2j},
    (_W, _EM): {_EM: -2j},
    (_EP, _EM): {_W: -4j},
}


def expected_commutator(i: LieOperator, j: LieOperator) -> Dict[LieOperator, complex]:
    """[i, j] as a combination of first order operators."""
    i, j = LieOperator(i), LieOperator(j)
    if i is j and i is not LieOperator.CASIMIR:
        return {}
    if (i, j) in COMMUTATORS:
        return COMMUTATORS[(i, j)]
    if (j, i) in COMMUTATORS:
        return {op: -coeff for op, coeff in COMMUTATORS[(j, i)].items()}
    raise DomainError(f"no tabulated commutator for ({i.value}, {j.value})")


def commutator_residual(
    i: LieOperator, j: LieOperator, f: JetFunction, at: IwasawaCoords, fd: FiniteDifferenceSpec = FiniteDifferenceSpec()
) -> float:
    """|([i, j] - expected) f(at)| / (1 + |f(at)|) with the commutator computed by nesting."""
    expected = expected_commutator(i, j)
    lhs = apply(i, composed(j, f, fd), at, fd) - apply(j, composed(i, f, fd), at, fd)
    rhs = sum((coeff * apply(op, f, at, fd) for op, coeff in expected.items()), 0j)
    return abs(lhs - rhs) / (1.0 + abs(f.at(at)))


def casimir_forms(f: JetFunction, at: IwasawaCoords, fd: FiniteDifferenceSpec = FiniteDifferenceSpec()) -> List[complex]:
    """
    The Casimir operator applied to f in three ways.

    In order: the quadratic form in X1, X2, X3; the form in the Maass operators and W; the direct
    second order expression in Iwasawa coordinates.
    """
    nested = lambda outer, inner: apply(outer, composed(inner, f, fd), at, fd)  # noqa: E731
    from_x = (
        -nested(_X1, _X1) - 0.25 * nested(_X2, _X2) + 0.5 * nested(_X1, _X3) + 0.5 * nested(_X3, _X1)
    )
    from_e = -0.25 * nested(_EP, _EM) + 0.25 * nested(_W, _W) - 0.5j * apply(_W, f, at, fd)
    direct = apply(LieOperator.CASIMIR, f, at, fd)
    return [from_x, from_e, direct]


def casimir_consistency(f: JetFunction, at: IwasawaCoords, fd: FiniteDifferenceSpec = FiniteDifferenceSpec()) -> float:
    """Largest pairwise discrepancy between the three Casimir forms, over 1 + |f(at)|."""
    forms = casimir_forms(f, at, fd)
    spread = max(abs(u - v) for u in forms for v in forms)
    return spread / (1.0 + abs(f.at(at)))


def casimir_right_translation_residual(
    f: JetFunction, at: IwasawaCoords, h: GroupElement, fd: FiniteDifferenceSpec = FiniteDifferenceSpec()
) -> float:
    """|Casimir(f o R_h)(at) - (Casimir f)(at h)| / (1 + |f(at h)|)."""
    moved = iwasawa_decompose(compose(at) @ h)
    lhs = apply(LieOperator.CASIMIR, right_translate(f, h), at, fd)
    rhs = apply(LieOperator.CASIMIR, f, moved, fd)
    return abs(lhs - rhs) / (1.0 + abs(f.at(moved)))


def phi_function(p: int, nu: complex) -> JetFunction:
    """phi_p(g; nu) = y^(nu + 1/2) e^(2 i p theta)."""
    nu = complex(nu)
    return JetFunction(lambda x, y, theta: cmath.exp((nu + 0.5) * math.log(y) + 2j * p * theta), smoothness_hint=8)


def jet_suite(seed: int = config.DEFAULT_SEED, count: int = config.SUITE_SAMPLES) -> List[Tuple[JetFunction, IwasawaCoords]]:
    """
    Seeded smooth test functions with evaluation points.

    Each function is a Gaussian in log y times a sinusoid in x times a two-term trigonometric
    polynomial in theta of period pi.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        t0, width = rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.5)
        omega, phase = rng.uniform(0.5, 2.0), rng.uniform(0.0, 2 * math.pi)
        p, q = (int(v) for v in rng.integers(-2, 3, size=2))
        mix = complex(*rng.normal(scale=0.5, size=2))

        def evaluator(x, y, theta, t0=t0, width=width, omega=omega, phase=phase, p=p, q=q, mix=mix):
            window = math.exp(-(((math.log(y) - t0) / width) ** 2))
            angular = cmath.exp(2j * p * theta) + mix * cmath.exp(2j * q * theta)
            return window * math.cos(omega * x + phase) * angular

        at = IwasawaCoords(rng.uniform(-1.0, 1.0), math.exp(rng.uniform(-0.5, 0.5)), rng.uniform(0.0, math.pi))
        cases.append((JetFunction(evaluator, smoothness_hint=8), at))
    return cases
