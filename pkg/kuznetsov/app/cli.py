"""Command line front end.

    kuznetsov eval kloosterman --m 1 --n 1 --ell 3
    kuznetsov eval bessel-kernel --discrete-k 6 --u -2
    kuznetsov verify gram --nu 0.5i --pmax 3
    kuznetsov trace --dataset maass.csv --m 1 --n 1 --support-lo 1 --support-hi 2

Values may also come from a ``key=value`` file given with ``--config``; flags win over the file.
Negative complex literals need the ``--nu=-0.3i`` form. Exit codes: 0 pass, 1 check failure,
2 usage error, 3 data error.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from kuznetsov import config
from kuznetsov.analysis import jacquet, kirillov, kloosterman
from kuznetsov.analysis.specfun import SpectralParam
from kuznetsov.analysis.weights import bump, gaussian_weight
from kuznetsov.app.runconfig import COMPLEX_KEYS, FLOAT_KEYS, INT_KEYS, RunConfig, read_config_file
from kuznetsov.app.suite import SUITES
from kuznetsov.errors import ConfigError, DatasetError, DomainError, KuznetsovError, QuadratureError
from kuznetsov.io import spectra
from kuznetsov.io.report import CheckRecord, RecordWriter
from kuznetsov.log import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3


# ------------------------------------------------------------------------------------------------
# eval
# ------------------------------------------------------------------------------------------------


def _param(cfg: RunConfig):
    """Spectral parameter from ``--discrete-k`` or ``--nu``."""
    if cfg.get("discrete_k") is not None:
        return SpectralParam.discrete(cfg.get("discrete_k"))
    (nu,) = cfg.require("nu")
    return nu


def _eval_whittaker(cfg):
    alpha, mu, y = cfg.require("alpha", "mu", "y")
    return [CheckRecord("whittaker", cfg.echo("alpha", "mu", "y"), jacquet.whittaker_w(alpha, mu, y, cfg.quadrature))]


def _eval_bessel_kernel(cfg):
    (u,) = cfg.require("u")
    value = kirillov.bessel_kernel(_param(cfg), u)
    return [CheckRecord("bessel-kernel", cfg.echo("nu", "discrete_k", "u"), value)]


def _eval_jacquet(cfg):
    p, nu, y = cfg.require("p", "nu", "y")
    delta = cfg.get("delta", 1)
    value = jacquet.jacquet_profile(p, nu, delta, [y], cfg.quadrature)[0]
    return [CheckRecord("jacquet", dict(cfg.echo("p", "nu", "y"), delta=delta), complex(value))]


def _eval_kloosterman(cfg):
    m, n, ell = cfg.require("m", "n", "ell")
    return [CheckRecord("kloosterman", cfg.echo("m", "n", "ell"), kloosterman.kloosterman_sum(m, n, ell))]


def _eval_gamma_p(cfg):
    p, s, nu = cfg.require("p", "s", "nu")
    return [CheckRecord("gamma-p", cfg.echo("p", "s", "nu"), kirillov.gamma_p(p, s, nu, cfg.quadrature))]


def _eval_xi_kernel(cfg):
    u, nu = cfg.require("u", "nu")
    result = kloosterman.xi_kernel(u, nu, cfg.quadrature)
    tol = config.XI_TOL * max(1.0, abs(result.value))
    return [CheckRecord("xi-kernel", cfg.echo("u", "nu"), result.value, residual=result.error, tol=tol)]


def _eval_transform_a(cfg):
    scale, x = cfg.require("scale", "x")
    delta = cfg.get("delta", 1)
    value = kloosterman.transform_A(gaussian_weight(scale), delta, x, cfg.quadrature)
    return [CheckRecord("transform-A", dict(cfg.echo("scale", "x"), delta=delta), value)]


def _eval_transform_b(cfg):
    (nu,) = cfg.require("nu")
    lo, hi = cfg.get("support_lo", 1.0), cfg.get("support_hi", 2.0)
    delta = cfg.get("delta", 1)
    value = kloosterman.transform_B(bump(lo, hi), delta, nu, cfg.quadrature)
    return [CheckRecord("transform-B", {"nu": nu, "support_lo": lo, "support_hi": hi, "delta": delta}, value)]


EVAL_TARGETS: Dict[str, Callable[[RunConfig], List[CheckRecord]]] = {
    "whittaker": _eval_whittaker,
    "bessel-kernel": _eval_bessel_kernel,
    "jacquet": _eval_jacquet,
    "kloosterman": _eval_kloosterman,
    "gamma-p": _eval_gamma_p,
    "xi-kernel": _eval_xi_kernel,
    "transform-A": _eval_transform_a,
    "transform-B": _eval_transform_b,
}


def cmd_eval(cfg: RunConfig) -> List[CheckRecord]:
    try:
        handler = EVAL_TARGETS[cfg.target]
    except KeyError:
        raise ConfigError(f"unknown eval target {cfg.target!r}, expected one of {sorted(EVAL_TARGETS)}") from None
    return handler(cfg)


# ------------------------------------------------------------------------------------------------
# verify
# ------------------------------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> List[CheckRecord]:
    try:
        suite = SUITES[cfg.target]
    except KeyError:
        raise ConfigError(f"unknown suite {cfg.target!r}, expected one of {sorted(SUITES)}") from None
    return suite(cfg).run()


# ------------------------------------------------------------------------------------------------
# trace
# ------------------------------------------------------------------------------------------------


def report_records(report: kloosterman.SumFormulaReport) -> List[CheckRecord]:
    """Records of a sum formula run: one per form, the continuous and diagonal terms, the budgets, both sides."""
    records = [
        CheckRecord("contribution", {"label": c.label, "nu": c.nu, "weight": c.weight}, c.value)
        for c in report.contributions
    ]
    records.append(CheckRecord("continuous_term", {}, report.continuous_term))
    if report.direction == "spectral":
        records.append(CheckRecord("delta_term", {}, report.delta_term))
    records.extend(CheckRecord(f"budget:{name}", {}, value) for name, value in report.budgets.items())
    records.append(CheckRecord("budget:total", {}, report.total_budget))
    summary = {
        "m": report.m,
        "n": report.n,
        "delta": report.delta,
        "direction": report.direction,
        "discrete_series_included": report.discrete_series_included,
        **report.truncation,
    }
    records.append(CheckRecord("geometric_side", summary, report.geometric_side))
    records.append(CheckRecord("spectral_side", summary, report.spectral_side))
    records.append(
        CheckRecord(
            "sum_formula",
            summary,
            report.spectral_side - report.geometric_side,
            residual=report.relative_error if report.geometric_side else report.residual,
            tol=config.TRACE_RELATIVE_TOL,
        )
    )
    return records


def cmd_trace(cfg: RunConfig) -> List[CheckRecord]:
    """
    Both sides of a sum formula on a dataset.

    The Kloosterman to spectral direction with a bump on [support_lo, support_hi] is the default;
    ``--scale`` switches to the spectral to Kloosterman direction with a Gaussian weight.
    """
    if cfg.dataset is None:
        raise ConfigError("trace needs --dataset")
    data = spectra.load(cfg.dataset)
    validation = spectra.validate(data, config.TRACE_RELATIVE_TOL)
    if not validation.passed:
        raise DatasetError("dataset validation failed: " + "; ".join(validation.failures[:5]))

    m, n = cfg.get("m", 1), cfg.get("n", 1)
    if cfg.get("scale") is not None:
        report = kloosterman.sum_formula_spectral(
            m,
            n,
            gaussian_weight(cfg.get("scale")),
            data,
            ell_max=cfg.get("ell_max", config.ELL_MAX_DEFAULT),
            nu_cutoff=cfg.get("nu_cutoff"),
            spec=cfg.quadrature,
        )
    else:
        phi = bump(cfg.get("support_lo", 1.0), cfg.get("support_hi", 2.0))
        report = kloosterman.sum_formula_kloosterman(
            m, n, phi, data, ell_max=cfg.get("ell_max"), nu_cutoff=cfg.get("nu_cutoff"), spec=cfg.quadrature
        )
    logger.info(
        "trace (%d, %d): spectral %s, geometric %s, residual %.3g", m, n, report.spectral_side, report.geometric_side, report.residual
    )
    return report_records(report)


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "trace": cmd_trace}


# ------------------------------------------------------------------------------------------------
# Argument parsing
# ------------------------------------------------------------------------------------------------


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    run = common.add_argument_group("run")
    run.add_argument("--config", help="key=value file with default parameters")
    run.add_argument("--format", choices=("human", "records"), help="output format (default human)")
    run.add_argument("--output", help="write the report to this file instead of stdout")
    run.add_argument("--seed", help="seed of the randomized suites")
    run.add_argument("--dataset", help="spectral dataset (csv or jsonl)")
    run.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    run.add_argument("-q", "--quiet", action="store_true", help="errors only")

    quad = common.add_argument_group("quadrature")
    quad.add_argument("--abs-tol")
    quad.add_argument("--rel-tol")
    quad.add_argument("--scheme", choices=("adaptive-gauss", "double-exponential"))

    params = common.add_argument_group("parameters")
    for key in INT_KEYS + FLOAT_KEYS + COMPLEX_KEYS:
        params.add_argument("--" + key.replace("_", "-"), dest=key, metavar=key.upper())
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="kuznetsov", description="Spectral theory of PSL(2,Z)\\PSL(2,R), numerically.")
    commands = parser.add_subparsers(dest="command", required=True)
    evaluate = commands.add_parser("eval", parents=[common], help="evaluate a function or transform")
    evaluate.add_argument("target", choices=sorted(EVAL_TARGETS))
    verify = commands.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("target", choices=sorted(SUITES))
    commands.add_parser("trace", parents=[common], help="both sides of a sum formula on a dataset")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    flags = vars(args).copy()
    for key in ("command", "target", "config", "verbose", "quiet"):
        flags.pop(key, None)
    values.update({k: v for k, v in flags.items() if v is not None})
    return RunConfig.from_mapping(args.command, getattr(args, "target", ""), values)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.INFO
    configure_logging(level)

    try:
        cfg = make_config(args)
        records = COMMANDS[cfg.command](cfg)
    except (ConfigError, DomainError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except DatasetError as e:
        logger.error("%s", e)
        return EXIT_DATA
    except QuadratureError as e:
        logger.error("%s (attained %.3g)", e, e.estimate)
        return EXIT_FAILED
    except KuznetsovError as e:
        logger.error("%s", e)
        return EXIT_FAILED

    with RecordWriter(cfg.fmt, cfg.output) as writer:
        writer.write_all(records)
    return EXIT_FAILED if writer.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
