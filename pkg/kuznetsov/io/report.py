"""Structured check records and their writers.

Every number the command line prints goes through a :class:`CheckRecord`. The ``records`` format
is one JSON object per line with the fields ``check, inputs, value, residual, tol, pass``, written
with sorted keys and ``repr`` precision so that identical runs give byte-identical output. The
``human`` format lays the same fields out as aligned text. Timings are logged, never recorded.
"""

import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import IO, Any, Callable, Mapping, Optional

import numpy as np
import wrapt

logger = logging.getLogger(__name__)

FORMATS = ("human", "records")


def encode(value: Any) -> Any:
    """JSON-safe copy of a value: complex numbers become ``[re, im]``, numpy scalars Python ones."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [encode(value.real), encode(value.imag)]
    if isinstance(value, np.ndarray):
        return [encode(v) for v in value.tolist()]
    if isinstance(value, Mapping):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if hasattr(value, "value") and not isinstance(value, str):
        return encode(value.value)
    return value if value is None or isinstance(value, str) else str(value)


@dataclass(frozen=True)
class CheckRecord:
    """
    One evaluated quantity or checked identity.

    A record passes when it has no residual, or when its residual is within ``tol``.
    """

    check: str
    inputs: Mapping[str, Any] = field(default_factory=dict)
    value: Any = None
    residual: Optional[float] = None
    tol: Optional[float] = None

    @property
    def passed(self) -> bool:
        if self.residual is None or self.tol is None:
            return True
        return bool(self.residual <= self.tol)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "inputs": encode(self.inputs),
            "value": encode(self.value),
            "residual": encode(self.residual),
            "tol": encode(self.tol),
            "pass": self.passed,
        }


def _human_value(value: Any) -> str:
    if isinstance(value, complex):
        return f"{value.real:.15g}{value.imag:+.15g}i"
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(encode(value))


class RecordWriter:
    """
    Writes check records to a stream in the ``human`` or ``records`` format.

    Used as a context manager it opens ``path`` (stdout when None) and closes it on exit; the
    number of failed records is available as ``failures``.
    """

    def __init__(self, fmt: str = "human", path: Optional[str] = None, stream: Optional[IO[str]] = None):
        if fmt not in FORMATS:
            raise ValueError(f"unknown output format {fmt!r}, expected one of {FORMATS}")
        self.fmt = fmt
        self.path = path
        self.stream = stream
        self.failures = 0
        self.count = 0

    def __enter__(self):
        if self.stream is None:
            self.stream = open(self.path, "w") if self.path else sys.stdout
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.path and self.stream is not None:
            self.stream.close()
            self.stream = None

    def write(self, record: CheckRecord) -> None:
        self.count += 1
        if not record.passed:
            self.failures += 1
        stream = self.stream or sys.stdout
        if self.fmt == "records":
            stream.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
            return
        inputs = " ".join(f"{k}={_human_value(v)}" for k, v in record.inputs.items())
        line = f"{record.check:<32} {inputs}"
        if record.value is not None:
            line += f"  value={_human_value(record.value)}"
        if record.residual is not None:
            status = "ok" if record.passed else "FAIL"
            line += f"  residual={record.residual:.3e} tol={record.tol:.1e} {status}"
        stream.write(line.rstrip() + "\n")

    def write_all(self, records) -> None:
        for record in records:
            self.write(record)


@wrapt.decorator
def timed_check(wrapped: Callable, instance: Any, args: tuple, kwargs: dict) -> Any:
    """
    Decorator logging the wall time of a check.

    Args:
        wrapped: The check being decorated
        instance: The suite the method is called on, if any
        args: Positional arguments for the wrapped function
        kwargs: Keyword arguments for the wrapped function

    Returns:
        The result of the wrapped function
    """
    name = getattr(instance, "name", None) or wrapped.__name__
    start = time.perf_counter()
    try:
        return wrapped(*args, **kwargs)
    finally:
        logger.info("%s: %s done in %.3f s", name, wrapped.__name__, time.perf_counter() - start)
