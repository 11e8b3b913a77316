"""Verification suites run by ``kuznetsov verify``.

Each subclass of :class:`Suite` checks the identities of one part of the library on fixed sample
points and seeded random inputs, and returns one :class:`CheckRecord` per identity (the largest
residual over its samples). A suite passes when every record does.
"""

import itertools
import logging
import math
from pathlib import Path
from threading import Event
from typing import Dict, List, Optional, Type

import numpy as np

from kuznetsov import config
from kuznetsov.analysis import jacquet, kirillov, kloosterman, lie, specfun
from kuznetsov.analysis.group import (
    WEYL,
    bruhat_decompose,
    compose,
    iwasawa_decompose,
    left_action,
    random_element,
)
from kuznetsov.analysis.kirillov import KirillovVector
from kuznetsov.analysis.lie import LieOperator
from kuznetsov.analysis.specfun import QuadratureSpec, SpectralParam
from kuznetsov.analysis.weights import bump
from kuznetsov.app.runconfig import RunConfig
from kuznetsov.errors import KuznetsovError
from kuznetsov.io.report import CheckRecord, RecordWriter, timed_check

logger = logging.getLogger(__name__)


def _worst(name: str, residuals, tol: float, **inputs) -> CheckRecord:
    residuals = list(residuals)
    return CheckRecord(name, dict(inputs, samples=len(residuals)), residual=max(residuals, default=0.0), tol=tol)


class Suite:
    """Base class of the verification suites.

    Subclasses set ``name`` and implement :meth:`checks`; the run configuration supplies the seed,
    the quadrature settings and any suite parameters.
    """

    name = "suite"

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.spec: QuadratureSpec = cfg.quadrature
        self.rng = np.random.default_rng(cfg.seed)

    def checks(self) -> List[CheckRecord]:
        raise NotImplementedError

    @timed_check
    def run(self) -> List[CheckRecord]:
        records = self.checks()
        failed = [r.check for r in records if not r.passed]
        if failed:
            logger.error("%s: failed checks %s", self.name, ", ".join(failed))
        else:
            logger.info("%s: %d checks passed", self.name, len(records))
        return records


class GroupSuite(Suite):
    """Iwasawa and Bruhat roundtrips and the cocycle of the action on coordinates."""

    name = "group"

    def checks(self):
        count = 10 * config.SUITE_SAMPLES
        elements = [random_element(self.rng) for _ in range(count)]
        iwasawa = (compose(iwasawa_decompose(g)).distance(g) for g in elements)
        bruhat = []
        for g in elements:
            form = bruhat_decompose(g)
            bruhat.append(form.element().distance(g) / max(1.0, abs(getattr(form, "x1", 0.0))))
        cocycle = []
        for g1, g2, g3 in zip(elements[0::3], elements[1::3], elements[2::3]):
            z = iwasawa_decompose(g3)
            lhs = compose(left_action(g1 @ g2, z))
            rhs = compose(left_action(g1, left_action(g2, z)))
            cocycle.append(lhs.distance(rhs))
        return [
            _worst("iwasawa_roundtrip", iwasawa, config.GROUP_TOL),
            _worst("bruhat_roundtrip", bruhat, config.GROUP_TOL),
            # two coordinate transforms compound their rounding errors
            _worst("action_cocycle", cocycle, 1e3 * config.GROUP_TOL),
        ]


class LieSuite(Suite):
    """Commutator table, Casimir consistency and commutation with right translations."""

    name = "lie"
    PAIRS = [
        (LieOperator.X1, LieOperator.X2),
        (LieOperator.X1, LieOperator.X3),
        (LieOperator.X2, LieOperator.X3),
        (LieOperator.W, LieOperator.EPLUS),
        (LieOperator.W, LieOperator.EMINUS),
        (LieOperator.EPLUS, LieOperator.EMINUS),
    ]

    def checks(self):
        cases = lie.jet_suite(self.cfg.seed, config.SUITE_SAMPLES)
        records = []
        for i, j in self.PAIRS:
            residuals = (lie.commutator_residual(i, j, f, at) for f, at in cases)
            records.append(_worst(f"commutator[{i.value},{j.value}]", residuals, config.LIE_COMMUTATOR_TOL))
        records.append(_worst("casimir_forms", (lie.casimir_consistency(f, at) for f, at in cases), config.CASIMIR_TOL))
        translations = [random_element(self.rng) for _ in cases]
        residuals = (lie.casimir_right_translation_residual(f, at, h) for (f, at), h in zip(cases, translations))
        records.append(_worst("casimir_right_translation", residuals, config.CASIMIR_TOL))
        routes = (
            abs(lie.apply(op, f, at) - lie.apply_by_right_translation(j, f, compose(at)))
            for f, at in cases
            for j, op in ((1, LieOperator.X1), (2, LieOperator.X2), (3, LieOperator.X3))
        )
        records.append(_worst("right_translation_route", routes, config.RIGHT_TRANSLATION_TOL))
        return records


class JacquetSuite(Suite):
    """K-Bessel closed form at p = 0 and the Whittaker equation over a (p, nu, y) grid."""

    name = "jacquet"

    @staticmethod
    def closed_form(nu: complex, y: float) -> complex:
        prefactor = 2.0 * np.exp((0.5 + nu) * math.log(math.pi)) * specfun.rgamma(0.5 + nu)
        return prefactor * math.sqrt(y) * specfun.bessel("K", nu, 2.0 * math.pi * y)

    def checks(self):
        closed = []
        for nu in (0.3j, 1j, 3j):
            ys = np.geomspace(0.1, 5.0, 7)
            values = jacquet.jacquet_profile(0, nu, 1, ys, self.spec)
            expected = np.array([self.closed_form(nu, y) for y in ys])
            closed.extend(np.abs(values - expected) / np.abs(expected))
        grid = list(itertools.product((0, 1, 2), (0.3j, 1j, 2j), (0.4, 1.0, 2.0)))
        ode = [jacquet.whittaker_ode_residual(p, nu, 1, y, spec=self.spec) for p, nu, y in grid]
        ode.append(jacquet.whittaker_ode_residual(6, 5.5, 1, 1.0, spec=self.spec))
        return [
            _worst("jacquet_closed_form", closed, config.JACQUET_TOL),
            _worst("whittaker_ode", ode, config.ODE_TOL),
        ]


class KirillovSuite(Suite):
    """Local functional equation, Gamma_p recursion and the Weyl element by two routes."""

    name = "kirillov"

    def checks(self):
        grid = list(itertools.product((-1, 0, 2), (0.3, 0.5 + 0.4j, 0.7 - 1.5j), (0.3j, 0.2, 1.5j)))
        functional = (kirillov.functional_equation_residual(p, s, nu, self.spec) for p, s, nu in grid)
        recursion = (kirillov.gamma_p_recursion_residual(p, s, nu, self.spec) for p, s, nu in grid)
        weyl = []
        principal = SpectralParam.principal(0.3)
        for p, u in [(0, 1.0), (1, 1.0), (0, -0.5), (2, 0.7)]:
            vec = KirillovVector.basis(p, principal)
            value = kirillov.weyl_action(vec, u, self.spec).value
            direct = kirillov.kirillov_right_action(vec, WEYL, u, self.spec)
            weyl.append(abs(value - direct) / max(1.0, abs(direct)))
        twice = kirillov.weyl_action_twice(KirillovVector.basis(0, principal), 1.0, self.spec).value
        weyl_twice = [abs(twice - kirillov.kirillov_phi(0, principal, 1.0, self.spec))]
        return [
            _worst("functional_equation", functional, config.FUNCTIONAL_EQUATION_TOL),
            _worst("gamma_p_recursion", recursion, config.GAMMA_P_TOL),
            _worst("weyl_action", weyl, config.WEYL_TOL),
            _worst("weyl_twice", weyl_twice, config.WEYL_TWICE_TOL),
        ]


class MellinPairsSuite(Suite):
    """Mellin transforms of the Bessel kernel on both half lines against their closed forms."""

    name = "mellin-pairs"
    PLUS = [(0.2, 0.1j), (0.15 + 0.5j, 0.05j), (0.2, 0.1), (0.1 - 0.3j, 0.02j), (0.22, 0.15j), (0.18 + 1.0j, 0.05j)]
    MINUS = [(0.6, 0.3j), (0.4 - 1.0j, 0.2), (1.2, 1.5j), (0.8 + 0.5j, 0.1), (0.5, 0.05j), (2.0, 0.7j)]

    def checks(self):
        return [
            _worst("mellin_plus", (kirillov.mellin_pair_residual(s, nu, "+", self.spec) for s, nu in self.PLUS), config.MELLIN_TOL),
            _worst("mellin_minus", (kirillov.mellin_pair_residual(s, nu, "-", self.spec) for s, nu in self.MINUS), config.MELLIN_TOL),
        ]


class GramSuite(Suite):
    """Unitarity of the Kirillov model through Gram matrices, and the Whittaker product integrals."""

    name = "gram"

    def params(self):
        if self.cfg.get("discrete_k") is not None:
            return [SpectralParam.discrete(self.cfg.get("discrete_k"))]
        if self.cfg.get("nu") is not None:
            return [SpectralParam.from_nu(self.cfg.get("nu"))]
        return [SpectralParam.principal(0.5), SpectralParam.principal(2.0), SpectralParam.discrete(6)]

    def checks(self):
        pmax = self.cfg.get("pmax", 3)
        records = []
        for param in self.params():
            report = kirillov.gram_matrix(param, pmax, self.spec)
            records.append(
                CheckRecord(
                    "gram_deviation",
                    {"nu": param.nu, "pmax": pmax},
                    value=report.error_estimate,
                    residual=report.deviation,
                    tol=config.GRAM_TOL,
                )
            )
        products = []
        for alpha, beta, mu in [(1, 0, 0.3j), (0, 0, 0.25)]:
            numeric, closed = kirillov.whittaker_product_integral(alpha, beta, mu, self.spec)
            products.append(abs(numeric - closed))
        records.append(_worst("whittaker_products", products, config.WHITTAKER_PRODUCT_TOL))
        return records


class KloostermanBasicSuite(Suite):
    """Kloosterman sums against direct summation, the Weil bound, and the kernel identities."""

    name = "kloosterman-basic"

    @staticmethod
    def naive(m: int, n: int, ell: int) -> float:
        total = 0j
        for d in range(ell):
            for dbar in range(ell):
                if (d * dbar) % ell == 1 % ell:
                    total += specfun.e((m * d + n * dbar) / ell)
        return total.real

    def checks(self):
        oracle, symmetry = [], []
        for m, n in itertools.product(range(1, 6), repeat=2):
            for ell in range(1, 51):
                value = kloosterman.kloosterman_sum(m, n, ell)
                oracle.append(abs(value - self.naive(m, n, ell)))
                symmetry.append(abs(value - kloosterman.kloosterman_sum(n, m, ell)))
        weil = kloosterman.weil_bound_check()

        evenness = [abs(kirillov.bessel_kernel(nu, u) - kirillov.bessel_kernel(-nu, u)) for nu in (0.4j, 0.2, 1.5j) for u in (1.3, -0.7)]
        phi = bump(1.0, 2.0)
        transform = [
            abs(kloosterman.transform_B(phi, 1, nu, self.spec) - kloosterman.transform_B(phi, 1, -nu, self.spec))
            for nu in (0.4j, 2.0j)
        ]
        xi = []
        for u, nu in [(1.0, 0.3j), (2.0, 0.1), (0.5, 0.7j)]:
            quadrature = kloosterman.xi_kernel(u, nu, self.spec).value
            mellin = kloosterman.xi_kernel_mellin(u, nu, self.spec)
            xi.append(abs(quadrature - mellin) / max(1.0, abs(mellin)))
        return [
            _worst("kloosterman_oracle", oracle, 1e-10),
            _worst("kloosterman_symmetry", symmetry, 1e-10),
            CheckRecord("weil_bound", {"limit": weil.limit}, value=weil.worst_prime, residual=weil.max_ratio, tol=1.0),
            _worst("kernel_evenness", evenness, 1e-10),
            _worst("transform_B_evenness", transform, 1e-10),
            _worst("xi_mellin_route", xi, 1e-5),
        ]


SUITES: Dict[str, Type[Suite]] = {
    cls.name: cls
    for cls in (GroupSuite, LieSuite, JacquetSuite, KirillovSuite, MellinPairsSuite, GramSuite, KloostermanBasicSuite)
}


def get_suite(name: str) -> Optional[Type[Suite]]:
    return SUITES.get(name)


def run_all(
    out_dir: Path, seed: str = "0", stop: Optional[Event] = None, suites: Optional[Dict[str, Type[Suite]]] = None
) -> List[str]:
    """
    Run every suite, writing ``<name>.jsonl`` records into ``out_dir``.

    A suite raising a library error is logged and counted as failed without a records file.
    Returns the names of the failed suites; stops before the next suite once ``stop`` is set.
    """
    failed = []
    for name, suite in (suites or SUITES).items():
        if stop is not None and stop.is_set():
            break
        cfg = RunConfig.from_mapping("verify", name, {"seed": seed, "format": "records"})
        try:
            records = suite(cfg).run()
        except KuznetsovError as err:
            logger.error("%s: %s", name, err)
            failed.append(name)
            continue
        with RecordWriter("records", str(out_dir / f"{name}.jsonl")) as writer:
            writer.write_all(records)
        if writer.failures:
            failed.append(name)
    return failed
