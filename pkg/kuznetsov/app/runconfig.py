"""Run configuration of the command line: typed parameters, config files and complex literals."""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from kuznetsov import config
from kuznetsov.analysis.specfun import QuadratureSpec, Scheme
from kuznetsov.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

COMMANDS = ("eval", "verify", "trace")
FORMATS = ("human", "records")

INT_KEYS = ("m", "n", "ell", "p", "alpha", "beta", "delta", "discrete_k", "pmax", "ell_max")
FLOAT_KEYS = ("u", "x", "y", "support_lo", "support_hi", "nu_cutoff", "scale")
COMPLEX_KEYS = ("s", "nu", "mu")
QUADRATURE_KEYS = ("abs_tol", "rel_tol", "scheme")
RUN_KEYS = ("seed", "format", "dataset", "output")
KNOWN_KEYS = INT_KEYS + FLOAT_KEYS + COMPLEX_KEYS + QUADRATURE_KEYS + RUN_KEYS

_LONE_I = re.compile(r"(^|[+-])i$")


def parse_complex(text: Union[str, complex, float]) -> complex:
    """
    Complex literal in the ``a+bi`` notation.

    Accepts ``a``, ``bi``, ``a+bi``, ``a-bi``, ``i`` and ``-i`` with optional exponents; ``j``
    works as well as ``i``.
    """
    if isinstance(text, (int, float, complex)):
        return complex(text)
    literal = text.strip().replace(" ", "").lower().replace("j", "i")
    literal = _LONE_I.sub(r"\g<1>1i", literal).replace("i", "j")
    try:
        return complex(literal)
    except ValueError:
        raise ConfigError(f"{text!r} is not a complex literal of the form a+bi") from None


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Flat ``key=value`` file: one pair per line, ``#`` starts a comment, blank lines are skipped.

    Keys are the long flag names, with dashes or underscores.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}") from None
    values = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path.name}:{number}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path.name}:{number}: unknown key {key!r}")
        values[key] = value
    logger.debug("read %d keys from %s", len(values), path)
    return values


def _convert(key: str, value: Any) -> Any:
    try:
        if key in INT_KEYS:
            if isinstance(value, int):
                return value
            try:
                return int(value)
            except ValueError:
                number = float(value)
            # integral floats such as "1e3" only
            if not number.is_integer():
                raise ValueError
            return int(number)
        if key in FLOAT_KEYS:
            return float(value)
    except (TypeError, ValueError, OverflowError):
        raise ConfigError(f"{key} = {value!r} is not a valid {'integer' if key in INT_KEYS else 'number'}") from None
    if key in COMPLEX_KEYS:
        return parse_complex(value)
    return value


@dataclass(frozen=True)
class RunConfig:
    """
    A fully typed command line run.

    Attributes:
        command: ``eval``, ``verify`` or ``trace``
        target: Function or suite name (empty for ``trace``)
        params: Typed parameters keyed by their flag name
        quadrature: Tolerances and scheme for every integral of the run
        dataset: Path of a spectral dataset
        fmt: ``human`` or ``records``
        seed: Seed of the randomized suites
        output: File receiving the report, stdout when None
    """

    command: str
    target: str = ""
    params: Mapping[str, Any] = field(default_factory=dict)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    dataset: Optional[Path] = None
    fmt: str = "human"
    seed: int = config.DEFAULT_SEED
    output: Optional[str] = None

    @classmethod
    def from_mapping(cls, command: str, target: str, values: Mapping[str, Any]) -> "RunConfig":
        """Typed configuration from raw strings (config file) or parsed flags, ``None`` meaning unset."""
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        values = {k.replace("-", "_"): v for k, v in values.items() if v is not None}
        unknown = set(values) - set(KNOWN_KEYS)
        if unknown:
            raise ConfigError(f"unknown parameters {sorted(unknown)}")

        params = {k: _convert(k, v) for k, v in values.items() if k in INT_KEYS + FLOAT_KEYS + COMPLEX_KEYS}
        quad = {}
        try:
            if "abs_tol" in values:
                quad["abs_tol"] = float(values["abs_tol"])
            if "rel_tol" in values:
                quad["rel_tol"] = float(values["rel_tol"])
            if "scheme" in values:
                quad["scheme"] = Scheme(values["scheme"])
            quadrature = QuadratureSpec(**quad)
        except (ValueError, DomainError) as e:
            raise ConfigError(f"invalid quadrature settings: {e}") from None

        fmt = values.get("format", "human")
        if fmt not in FORMATS:
            raise ConfigError(f"unknown format {fmt!r}, expected one of {FORMATS}")
        try:
            seed = int(values.get("seed", config.DEFAULT_SEED))
        except ValueError:
            raise ConfigError(f"seed = {values['seed']!r} is not an integer") from None
        dataset = values.get("dataset")
        return cls(
            command=command,
            target=target or "",
            params=params,
            quadrature=quadrature,
            dataset=Path(dataset) if dataset else None,
            fmt=fmt,
            seed=seed,
            output=values.get("output"),
        )

    def get(self, key: str, default: Any = None) -> Any:
        return self.params.get(key, default)

    def require(self, *keys: str) -> tuple:
        """Values of the given parameters, raising :class:`ConfigError` naming the missing ones."""
        missing = [k for k in keys if k not in self.params]
        if missing:
            flags = ", ".join("--" + k.replace("_", "-") for k in missing)
            raise ConfigError(f"{self.command} {self.target}: missing {flags}".replace("  ", " "))
        return tuple(self.params[k] for k in keys)

    def echo(self, *keys: str) -> Dict[str, Any]:
        """The given parameters that are set, for the inputs of a record."""
        return {k: self.params[k] for k in keys if k in self.params}
