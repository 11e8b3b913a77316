"""
Weight functions of the sum formulas.

A spectral weight f lives on the nu-plane, is even and decays on the imaginary axis; a geometric
weight phi lives on (0, oo) with compact support. Both carry the metadata the transforms need to
truncate their integrals.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from kuznetsov import config
from kuznetsov.errors import DomainError


class WeightKind(str, Enum):
    SPECTRAL = "spectral"
    GEOMETRIC = "geometric"


@dataclass(frozen=True)
class TestWeight:
    """
    A spectral weight f(nu) or a geometric weight phi(x).

    Attributes:
        kind: Spectral or geometric
        evaluator: Vectorized callable; complex nu for spectral weights, positive x for geometric ones
        name: Label used in reports
        support: Closed interval outside of which a geometric weight vanishes
        decay_rate: a with |f(it)| <= C exp(-a |t|); ``math.inf`` for Gaussian decay
        cutoff: |t| beyond which a spectral weight is negligible
    """

    __test__ = False

    kind: WeightKind
    evaluator: Callable
    name: str
    support: Optional[Tuple[float, float]] = None
    decay_rate: float = 0.0
    cutoff: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        if self.kind is WeightKind.GEOMETRIC:
            if self.support is None or not 0.0 < self.support[0] < self.support[1]:
                raise DomainError(f"a geometric weight needs a support 0 < lo < hi, got {self.support}")
        elif self.cutoff is None or not self.cutoff > 0.0:
            raise DomainError("a spectral weight needs a positive cutoff")

    def __call__(self, z):
        return self.evaluator(z)

    def check(self, rng: Optional[np.random.Generator] = None, samples: int = 16) -> float:
        """
        Sampled defect of the defining property: evenness of f, or vanishing of phi off its support.
        """
        rng = rng or np.random.default_rng(config.DEFAULT_SEED)
        if self.kind is WeightKind.SPECTRAL:
            nus = rng.uniform(-0.4, 0.4, samples) + 1j * rng.uniform(-self.cutoff, self.cutoff, samples)
            return float(np.max(np.abs(self(nus) - self(-nus))))
        lo, hi = self.support
        outside = np.concatenate([rng.uniform(0.01, 1.0, samples) * lo, hi * (1.0 + rng.uniform(0.0, 1.0, samples))])
        return float(np.max(np.abs(self(outside))))


def gaussian_weight(scale: float) -> TestWeight:
    """f(nu) = exp(nu^2 / scale^2), so that f(it) = exp(-t^2 / scale^2)."""
    if not scale > 0.0:
        raise DomainError(f"scale must be positive, got {scale}")

    def evaluator(nu):
        return np.exp(np.asarray(nu, dtype=complex) ** 2 / scale**2)

    return TestWeight(
        WeightKind.SPECTRAL,
        evaluator,
        name=f"gaussian({scale:g})",
        decay_rate=math.inf,
        cutoff=scale * math.sqrt(config.DECAY_CUTOFF),
    )


def bump(lo: float, hi: float) -> TestWeight:
    """
    phi(x) = exp(-1 / (1 - t^2)) with t = (2 log x - log(lo hi)) / log(hi / lo), zero for |t| >= 1.
    """
    if not 0.0 < lo < hi:
        raise DomainError(f"bump support needs 0 < lo < hi, got ({lo}, {hi})")
    center, half = 0.5 * math.log(lo * hi), 0.5 * math.log(hi / lo)

    def evaluator(x):
        x = np.asarray(x, dtype=float)
        t = (np.log(np.where(x > 0.0, x, 1.0)) - center) / half
        inside = (np.abs(t) < 1.0) & (x > 0.0)
        safe = np.where(inside, t, 0.0)
        values = np.where(inside, np.exp(-1.0 / (1.0 - safe * safe)), 0.0)
        return values if values.ndim else float(values)

    return TestWeight(WeightKind.GEOMETRIC, evaluator, name=f"bump({lo:g}, {hi:g})", support=(lo, hi))
