"""Coordinates on G = PSL(2,R).

Elements are stored as unit-determinant matrices up to sign. The module provides the Iwasawa
coordinates g = n[x] a[y] k[theta], the Bruhat cells n[x] a[u] and n[x1] w n[x2] a[u], the left
action of G on Iwasawa coordinates and the Haar measure density.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from kuznetsov import config
from kuznetsov.errors import DomainError


@dataclass(frozen=True)
class GroupElement:
    """
    A projective 2x2 real matrix of determinant one.

    The entries are rescaled to unit determinant on construction (the determinant must already be
    within ``DET_TOLERANCE`` of one) and the sign is fixed so that the first nonzero entry among
    (c, d, a, b) is positive.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        entries = [float(v) for v in (self.a, self.b, self.c, self.d)]
        if not all(math.isfinite(v) for v in entries):
            raise DomainError("matrix entries must be finite")
        a, b, c, d = entries
        det = a * d - b * c
        if not det > 0.0 or abs(det - 1.0) > config.DET_TOLERANCE:
            raise DomainError(f"determinant {det} is not one")
        scale = 1.0 / math.sqrt(det)
        sign = 1.0
        for value in (c, d, a, b):
            if value != 0.0:
                sign = 1.0 if value > 0.0 else -1.0
                break
        for name, value in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, sign * scale * value)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def distance(self, other: "GroupElement") -> float:
        """Largest entrywise difference, minimized over the sign ambiguity."""
        mine, theirs = self.matrix, other.matrix
        return float(min(np.max(np.abs(mine - theirs)), np.max(np.abs(mine + theirs))))

    def isclose(self, other: "GroupElement", tol: float = config.GROUP_TOL) -> bool:
        return self.distance(other) < tol


def n_matrix(x: float) -> GroupElement:
    return GroupElement(1.0, x, 0.0, 1.0)


def a_matrix(y: float) -> GroupElement:
    if not y > 0.0:
        raise DomainError(f"a[y] needs y > 0, got {y}")
    root = math.sqrt(y)
    return GroupElement(root, 0.0, 0.0, 1.0 / root)


def k_matrix(theta: float) -> GroupElement:
    return GroupElement(math.cos(theta), math.sin(theta), -math.sin(theta), math.cos(theta))


WEYL = GroupElement(0.0, 1.0, -1.0, 0.0)
IDENTITY = GroupElement(1.0, 0.0, 0.0, 1.0)


def _reduce_angle(theta):
    reduced = np.mod(theta, math.pi)
    # np.mod can round up to pi itself
    return np.where(reduced >= math.pi, 0.0, reduced)


@dataclass(frozen=True)
class IwasawaCoords:
    """Coordinates (x, y, theta) of n[x] a[y] k[theta]; theta is reduced to [0, pi)."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise DomainError("Iwasawa coordinates must be finite")
        if not self.y > 0.0:
            raise DomainError(f"Iwasawa coordinate y must be positive, got {self.y}")
        object.__setattr__(self, "theta", float(_reduce_angle(self.theta)))

    def shifted(self, dx: float = 0.0, dy: float = 0.0, dtheta: float = 0.0) -> "IwasawaCoords":
        return IwasawaCoords(self.x + dx, self.y + dy, self.theta + dtheta)


def iwasawa_decompose(g: GroupElement) -> IwasawaCoords:
    norm = g.c * g.c + g.d * g.d
    return IwasawaCoords((g.a * g.c + g.b * g.d) / norm, 1.0 / norm, math.atan2(-g.c, g.d))


def compose(coords: IwasawaCoords) -> GroupElement:
    root = math.sqrt(coords.y)
    cos, sin = math.cos(coords.theta), math.sin(coords.theta)
    return GroupElement(
        root * cos - coords.x * sin / root,
        root * sin + coords.x * cos / root,
        -sin / root,
        cos / root,
    )


def act(g: GroupElement, x, y, theta):
    """
    Left action on Iwasawa coordinates, elementwise on arrays.

    The angle increment is minus the principal argument of the automorphy factor c z + d.
    """
    x, y, theta = np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(theta, dtype=float)
    cy = g.c * y
    cxd = g.c * x + g.d
    denom = cy * cy + cxd * cxd
    x1 = (g.a * g.c * y * y + (g.a * x + g.b) * cxd) / denom
    y1 = y / denom
    theta1 = _reduce_angle(theta - np.arctan2(cy, cxd))
    return x1, y1, theta1


def left_action(g: GroupElement, coords: IwasawaCoords) -> IwasawaCoords:
    x1, y1, theta1 = act(g, coords.x, coords.y, coords.theta)
    return IwasawaCoords(float(x1), float(y1), float(theta1))


@dataclass(frozen=True)
class SmallCell:
    """n[x] a[u]"""

    x: float
    u: float

    def element(self) -> GroupElement:
        return n_matrix(self.x) @ a_matrix(self.u)


@dataclass(frozen=True)
class BigCell:
    """n[x1] w n[x2] a[u]"""

    x1: float
    x2: float
    u: float

    def element(self) -> GroupElement:
        return n_matrix(self.x1) @ WEYL @ n_matrix(self.x2) @ a_matrix(self.u)


BruhatForm = Union[SmallCell, BigCell]


def bruhat_decompose(g: GroupElement) -> BruhatForm:
    """
    Bruhat cell and coordinates of g.

    An element whose lower-left entry is at most ``TOL_CELL`` times its largest entry is placed in
    the small cell.
    """
    scale = max(abs(g.a), abs(g.b), abs(g.c), abs(g.d))
    if abs(g.c) <= config.TOL_CELL * scale:
        return SmallCell(g.a * g.b, g.a * g.a)
    return BigCell(g.a / g.c, g.c * g.d, g.c * g.c)


def haar_density(coords: IwasawaCoords) -> float:
    """Density of dg against dx dy dtheta."""
    return 1.0 / (coords.y * coords.y)


def random_element(rng: np.random.Generator) -> GroupElement:
    return compose(IwasawaCoords(rng.uniform(-3.0, 3.0), math.exp(rng.uniform(-2.0, 2.0)), rng.uniform(0.0, math.pi)))


def haar_integral(
    f: Callable,
    g: Optional[GroupElement] = None,
    box: Tuple[float, float] = (30.0, 5.0),
    nodes: Tuple[int, int, int] = (800, 200, 8),
) -> float:
    """
    Integral of f(g h) over h in G against the Haar measure.

    ``f`` is vectorized over arrays (x, y, theta) and must be negligible outside
    ``|x| <= box[0]``, ``|log y| <= box[1]``. Tensor Gauss-Legendre rules run in x and log y, a
    trapezoid rule in theta.
    """
    x_nodes, t_nodes, theta_nodes = nodes
    gx, wx = np.polynomial.legendre.leggauss(x_nodes)
    gt, wt = np.polynomial.legendre.leggauss(t_nodes)
    x, t = box[0] * gx, box[1] * gt
    theta = np.arange(theta_nodes) * (math.pi / theta_nodes)
    X, T, TH = np.meshgrid(x, t, theta, indexing="ij")
    Y = np.exp(T)
    weights = (box[0] * wx)[:, None, None] * (box[1] * wt)[None, :, None] * (math.pi / theta_nodes)
    density = 1.0 / Y
    if g is not None:
        X, Y, TH = act(g, X, Y, TH)
    return float(np.sum(weights * density * f(X, Y, TH)))
