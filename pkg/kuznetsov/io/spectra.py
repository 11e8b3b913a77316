"""
Spectral datasets: Maass and holomorphic cusp forms for PSL(2, Z).

A dataset is a list of Maass-form records (spectral parameter kappa, parity, first Fourier
coefficient and Hecke eigenvalues), an optional list of holomorphic records, and a manifest
describing where the numbers come from. Two on-disk formats are supported:

* ``csv``: header ``kappa,epsilon,norm_sq_rho1,t2,t3,...,tN``, one Maass form per row
* ``jsonl``: one JSON object per line with the same keys, ``t`` as a ``{n: t(n)}`` object, and
  ``"kind": "holomorphic"`` (keys ``k``, ``norm_sq_rho1``, ``t``) for holomorphic forms

The manifest lives next to the data in ``<path>.manifest.json`` with the keys ``source``, ``N``,
``kappa_max``, ``precision`` and ``normalization``.
"""

import csv
import json
import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

from kuznetsov import config
from kuznetsov.analysis import hecke
from kuznetsov.analysis.specfun import MIN_HOLOMORPHIC_K, MIN_MAASS_KAPPA
from kuznetsov.errors import DatasetError, DomainError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

REQUIRED_COLUMNS = ("kappa", "epsilon", "norm_sq_rho1")
_HECKE_COLUMN = re.compile(r"^t(\d+)$")


class Normalization(str, Enum):
    """
    Convention of the ``norm_sq_rho1`` column.

    UNIT_L2: |rho(1)|^2 of the L^2-unit form sum rho(n) sqrt(y) K_(i kappa)(2 pi |n| y) e(nx)
        (holomorphic: sum rho(n) n^(k - 1/2) e(nz) of unit Petersson norm)
    KUZNETSOV_ALPHA: |rho(1)|^2 / cosh(pi kappa), the weight of the classical Kuznetsov formula
    VARRHO: |varrho_V(1)|^2 of the Kirillov-normalized representation, used as is
    """

    UNIT_L2 = "unit-l2"
    KUZNETSOV_ALPHA = "kuznetsov-alpha"
    VARRHO = "varrho"


class Format(str, Enum):
    CSV = "csv"
    JSONL = "jsonl"

    @classmethod
    def of(cls, path: PathLike, fmt: Optional[str] = None) -> "Format":
        if fmt is not None:
            try:
                return cls(fmt)
            except ValueError:
                raise DatasetError(f"unknown dataset format {fmt!r}") from None
        suffix = Path(path).suffix.lower()
        return cls.JSONL if suffix in (".jsonl", ".json") else cls.CSV


# ------------------------------------------------------------------------------------------------
# Records
# ------------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class MaassFormRecord:
    """
    A Maass cusp form with spectral parameter nu = i kappa.

    ``hecke`` holds t(n) for 2 <= n <= N; t(1) = 1 is implied.
    """

    kappa: float
    epsilon: int
    norm_sq_rho1: float
    hecke: Mapping[int, float]
    normalization: Normalization = Normalization.UNIT_L2
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "normalization", Normalization(self.normalization))
        if not self.label:
            object.__setattr__(self, "label", f"maass:{self.kappa:.8f}")

    def t(self, n: int) -> float:
        if n == 1:
            return 1.0
        try:
            return self.hecke[n]
        except KeyError:
            raise DomainError(f"{self.label} has no Hecke eigenvalue t({n})") from None


@dataclass(frozen=True)
class HoloFormRecord:
    """A holomorphic cusp form of weight 2k with Hecke eigenvalues normalized to |t(p)| <= 2."""

    k: int
    norm_sq_rho1: float
    hecke: Mapping[int, float]
    normalization: Normalization = Normalization.UNIT_L2
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "normalization", Normalization(self.normalization))
        if not self.label:
            object.__setattr__(self, "label", f"holomorphic:{2 * self.k}")

    def t(self, n: int) -> float:
        if n == 1:
            return 1.0
        try:
            return self.hecke[n]
        except KeyError:
            raise DomainError(f"{self.label} has no Hecke eigenvalue t({n})") from None


@dataclass(frozen=True)
class Manifest:
    source: str = "unknown"
    N: int = 1
    kappa_max: float = 0.0
    precision: float = 1e-12
    normalization: Normalization = Normalization.UNIT_L2

    def __post_init__(self):
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "N": self.N,
            "kappa_max": self.kappa_max,
            "precision": self.precision,
            "normalization": self.normalization.value,
        }


@dataclass(frozen=True)
class SpectralDataset:
    forms: Tuple[MaassFormRecord, ...]
    holo: Tuple[HoloFormRecord, ...] = ()
    manifest: Manifest = field(default_factory=Manifest)

    def __len__(self) -> int:
        return len(self.forms)


def manifest_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".manifest.json")


# ------------------------------------------------------------------------------------------------
# Loading
# ------------------------------------------------------------------------------------------------


def _number(value, what: str, line: int) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise DatasetError(f"{what} = {value!r} is not a number", line) from None
    if not math.isfinite(number):
        raise DatasetError(f"{what} = {value!r} is not finite", line)
    return number


def _parity(value, line: int) -> int:
    epsilon = _number(value, "epsilon", line)
    if epsilon not in (1.0, -1.0):
        raise DatasetError(f"epsilon must be +1 or -1, got {value!r}", line)
    return int(epsilon)


def _hecke_table(values: Mapping, line: int) -> Dict[int, float]:
    table = {}
    for key, value in values.items():
        try:
            n = int(key)
        except ValueError:
            raise DatasetError(f"Hecke index {key!r} is not an integer", line) from None
        if n < 2:
            raise DatasetError(f"Hecke indices start at 2, got {n}", line)
        table[n] = _number(value, f"t({n})", line)
    return table


def _read_csv(path: Path, normalization: Normalization) -> List[Tuple[int, MaassFormRecord]]:
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = [name.strip() for name in next(reader)]
        except StopIteration:
            raise DatasetError("empty file, the header row is missing", 1) from None
        if tuple(header[:3]) != REQUIRED_COLUMNS:
            raise DatasetError(f"header must start with {','.join(REQUIRED_COLUMNS)}, got {header[:3]}", 1)
        indices = []
        for name in header[3:]:
            match = _HECKE_COLUMN.match(name)
            if match is None:
                raise DatasetError(f"unexpected column {name!r}", 1)
            indices.append(int(match.group(1)))

        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DatasetError(f"expected {len(header)} fields, got {len(row)}", line)
            record = MaassFormRecord(
                kappa=_number(row[0], "kappa", line),
                epsilon=_parity(row[1], line),
                norm_sq_rho1=_number(row[2], "norm_sq_rho1", line),
                hecke=_hecke_table(dict(zip(indices, row[3:])), line),
                normalization=normalization,
            )
            rows.append((line, record))
    return rows


def _read_jsonl(path: Path, normalization: Normalization):
    forms, holo = [], []
    with open(path) as handle:
        for line, text in enumerate(handle, start=1):
            if not text.strip():
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as e:
                raise DatasetError(f"invalid JSON: {e.msg}", line) from None
            if not isinstance(obj, dict):
                raise DatasetError("each line must hold a JSON object", line)
            tag = obj.get("normalization", normalization)
            try:
                tag = Normalization(tag)
            except ValueError:
                raise DatasetError(f"unknown normalization {tag!r}", line) from None
            kind = obj.get("kind", "maass")
            try:
                if kind == "holomorphic":
                    k = _number(obj["k"], "k", line)
                    if k != int(k):
                        raise DatasetError(f"k must be an integer, got {obj['k']!r}", line)
                    record = HoloFormRecord(
                        k=int(k),
                        norm_sq_rho1=_number(obj["norm_sq_rho1"], "norm_sq_rho1", line),
                        hecke=_hecke_table(obj.get("t", {}), line),
                        normalization=tag,
                        label=str(obj.get("label", "")),
                    )
                    holo.append((line, record))
                elif kind == "maass":
                    record = MaassFormRecord(
                        kappa=_number(obj["kappa"], "kappa", line),
                        epsilon=_parity(obj["epsilon"], line),
                        norm_sq_rho1=_number(obj["norm_sq_rho1"], "norm_sq_rho1", line),
                        hecke=_hecke_table(obj.get("t", {}), line),
                        normalization=tag,
                        label=str(obj.get("label", "")),
                    )
                    forms.append((line, record))
                else:
                    raise DatasetError(f"unknown record kind {kind!r}", line)
            except KeyError as e:
                raise DatasetError(f"missing key {e.args[0]!r}", line) from None
    return forms, holo


def _read_manifest(path: Path) -> Optional[dict]:
    side = manifest_path(path)
    if not side.exists():
        return None
    try:
        with open(side) as handle:
            data = json.load(handle)
    except json.JSONDecodeError as e:
        raise DatasetError(f"{side.name}: invalid JSON ({e.msg})", e.lineno) from None
    unknown = set(data) - {"source", "N", "kappa_max", "precision", "normalization"}
    if unknown:
        raise DatasetError(f"{side.name}: unknown manifest keys {sorted(unknown)}")
    return data


def load(path: PathLike, fmt: Optional[str] = None) -> SpectralDataset:
    """
    Read a spectral dataset and its manifest.

    Records come back sorted by kappa (holomorphic ones by weight). Without a manifest file the
    manifest is filled in from the data with the ``unit-l2`` convention.

    Raises:
        DatasetError: Unreadable file, schema mismatch, non-numeric field or duplicate kappa
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"no dataset at {path}")
    fmt = Format.of(path, fmt)
    side = _read_manifest(path)
    try:
        normalization = Normalization((side or {}).get("normalization", Normalization.UNIT_L2))
    except ValueError:
        raise DatasetError(f"{manifest_path(path).name}: unknown normalization") from None

    if fmt is Format.CSV:
        forms, holo = _read_csv(path, normalization), []
    else:
        forms, holo = _read_jsonl(path, normalization)

    forms.sort(key=lambda item: item[1].kappa)
    precision = float((side or {}).get("precision", 1e-12))
    for (_, a), (line, b) in zip(forms, forms[1:]):
        if abs(b.kappa - a.kappa) <= precision * max(1.0, abs(a.kappa)):
            raise DatasetError(f"duplicate kappa {b.kappa} within precision {precision:g}", line)
    holo.sort(key=lambda item: item[1].k)

    records = tuple(r for _, r in forms)
    if side is None:
        indices = [n for r in records for n in r.hecke] + [n for _, h in holo for n in h.hecke]
        side = {
            "source": path.name,
            "N": max(indices, default=1),
            "kappa_max": records[-1].kappa if records else 0.0,
        }
    try:
        manifest = Manifest(**side)
    except (TypeError, ValueError) as e:
        raise DatasetError(f"{manifest_path(path).name}: {e}") from None
    logger.info("loaded %d Maass and %d holomorphic forms from %s", len(records), len(holo), path)
    return SpectralDataset(records, tuple(h for _, h in holo), manifest)


# ------------------------------------------------------------------------------------------------
# Saving
# ------------------------------------------------------------------------------------------------


def _maass_object(rec: MaassFormRecord) -> dict:
    return {
        "kind": "maass",
        "label": rec.label,
        "kappa": rec.kappa,
        "epsilon": rec.epsilon,
        "norm_sq_rho1": rec.norm_sq_rho1,
        "normalization": rec.normalization.value,
        "t": {str(n): v for n, v in sorted(rec.hecke.items())},
    }


def _holo_object(rec: HoloFormRecord) -> dict:
    return {
        "kind": "holomorphic",
        "label": rec.label,
        "k": rec.k,
        "norm_sq_rho1": rec.norm_sq_rho1,
        "normalization": rec.normalization.value,
        "t": {str(n): v for n, v in sorted(rec.hecke.items())},
    }


def save(ds: SpectralDataset, path: PathLike, fmt: Optional[str] = None) -> None:
    """
    Write a dataset and its manifest side-file.

    Floats are written with ``repr`` so that ``load(save(ds))`` reproduces the numeric fields
    bit for bit. The csv format holds Maass forms only and needs a common set of Hecke indices.
    """
    path = Path(path)
    fmt = Format.of(path, fmt)
    if fmt is Format.CSV:
        if ds.holo:
            raise DatasetError("holomorphic records need the jsonl format")
        indices = sorted({n for rec in ds.forms for n in rec.hecke})
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(list(REQUIRED_COLUMNS) + [f"t{n}" for n in indices])
            for rec in ds.forms:
                if sorted(rec.hecke) != indices:
                    raise DatasetError(f"{rec.label}: csv rows need t(n) for every n in {indices[0]}..{indices[-1]}")
                writer.writerow(
                    [repr(rec.kappa), rec.epsilon, repr(rec.norm_sq_rho1)] + [repr(rec.hecke[n]) for n in indices]
                )
    else:
        with open(path, "w") as handle:
            for rec in ds.forms:
                handle.write(json.dumps(_maass_object(rec)) + "\n")
            for rec in ds.holo:
                handle.write(json.dumps(_holo_object(rec)) + "\n")
    with open(manifest_path(path), "w") as handle:
        json.dump(ds.manifest.to_dict(), handle, indent=2)
    logger.info("saved %d forms to %s", len(ds.forms) + len(ds.holo), path)


# ------------------------------------------------------------------------------------------------
# Normalization
# ------------------------------------------------------------------------------------------------


def varrho_one_squared(rec: MaassFormRecord) -> float:
    """
    |varrho_V(1)|^2 from the tagged column.

    varrho = Gamma(1/2 + i kappa) / (2 pi^(1/2 + i kappa)) rho and |Gamma(1/2 + i kappa)|^2 =
    pi / cosh(pi kappa) give |varrho(1)|^2 = |rho(1)|^2 / (4 cosh(pi kappa)).
    """
    if rec.normalization is Normalization.UNIT_L2:
        return rec.norm_sq_rho1 / (4.0 * math.cosh(math.pi * rec.kappa))
    if rec.normalization is Normalization.KUZNETSOV_ALPHA:
        return rec.norm_sq_rho1 / 4.0
    if rec.normalization is Normalization.VARRHO:
        return rec.norm_sq_rho1
    raise DatasetError(f"unknown normalization {rec.normalization!r}")


def normalize(rec: MaassFormRecord, n: int) -> complex:
    """varrho_V(n) = epsilon^((1 - sgn n)/2) varrho_V(1) t(|n|), with varrho_V(1) > 0."""
    if n == 0:
        raise DomainError("varrho_V(n) is defined for n != 0")
    value = math.sqrt(varrho_one_squared(rec)) * rec.t(abs(n))
    if n < 0:
        value *= rec.epsilon
    return complex(value)


def holomorphic_varrho_one_squared(rec: HoloFormRecord) -> float:
    """|varrho(1)|^2 = Gamma(2k) / (2^(4k) pi^(2k+1)) |rho(1)|^2 for the unit-norm form of weight 2k."""
    if rec.normalization is Normalization.VARRHO:
        return rec.norm_sq_rho1
    if rec.normalization is Normalization.UNIT_L2:
        log_factor = math.lgamma(2 * rec.k) - 4 * rec.k * math.log(2.0) - (2 * rec.k + 1) * math.log(math.pi)
        return math.exp(log_factor) * rec.norm_sq_rho1
    raise DatasetError(f"normalization {rec.normalization.value!r} is not defined for holomorphic forms")


def normalize_holomorphic(rec: HoloFormRecord, n: int, anti: bool = False) -> complex:
    """
    varrho(n) in the discrete series attached to a holomorphic form.

    Only positive indices carry coefficients; the anti-holomorphic companion (``anti``) mirrors
    them onto negative indices.
    """
    if n == 0:
        raise DomainError("varrho(n) is defined for n != 0")
    if (n < 0) != anti:
        return 0j
    return complex(math.sqrt(holomorphic_varrho_one_squared(rec)) * rec.t(abs(n)))


# ------------------------------------------------------------------------------------------------
# Validation
# ------------------------------------------------------------------------------------------------


@dataclass
class RecordCheck:
    label: str
    kappa_ok: bool = True
    hecke_residual: float = 0.0
    bound_constant: float = 0.0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class ValidationReport:
    records: List[RecordCheck]
    dataset_failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.dataset_failures and all(r.passed for r in self.records)

    @property
    def failures(self) -> List[str]:
        out = list(self.dataset_failures)
        for r in self.records:
            out.extend(f"{r.label}: {msg}" for msg in r.failures)
        return out


def _hecke_checks(check: RecordCheck, table: Mapping[int, float], tol: float) -> None:
    t = dict(table)
    t[1] = 1.0
    worst = 0.0
    limit = max(t)
    for m in range(2, limit + 1):
        for n in range(m, limit // m + 1):
            try:
                worst = max(worst, hecke.hecke_relation_residual(t, m, n))
            except DomainError as e:
                check.failures.append(str(e))
                return
    check.hecke_residual = worst
    if worst > tol:
        check.failures.append(f"Hecke relations off by {worst:.3g}")
    check.bound_constant = hecke.bound_constant(t, config.HECKE_BOUND_EXPONENT)
    if check.bound_constant > config.HECKE_BOUND_CONSTANT:
        check.failures.append(
            f"|t(n)| <= C n^{config.HECKE_BOUND_EXPONENT} needs C = {check.bound_constant:.3g}"
            f" > {config.HECKE_BOUND_CONSTANT}"
        )


def validate(ds: SpectralDataset, tolerance: Optional[float] = None) -> ValidationReport:
    """
    Check every record: the bound kappa > 3.815 (k >= 6 for holomorphic forms), the Hecke
    relations among the tabulated t(n) and the fitted constant of the eigenvalue bound.

    ``tolerance`` is the accuracy the caller needs; a manifest precision above it fails the
    dataset. Failures are reported, never raised.
    """
    tol = max(config.HECKE_RELATION_TOL, ds.manifest.precision)
    report = ValidationReport([])
    if tolerance is not None and ds.manifest.precision > tolerance:
        report.dataset_failures.append(f"manifest precision {ds.manifest.precision:g} above the required {tolerance:g}")

    for rec in ds.forms:
        check = RecordCheck(rec.label)
        if not rec.kappa > MIN_MAASS_KAPPA:
            check.kappa_ok = False
            check.failures.append(f"kappa = {rec.kappa} below {MIN_MAASS_KAPPA}")
        if not rec.norm_sq_rho1 > 0.0:
            check.failures.append("norm_sq_rho1 must be positive")
        if rec.kappa > ds.manifest.kappa_max * (1.0 + 1e-12):
            check.failures.append(f"kappa = {rec.kappa} beyond the manifest range {ds.manifest.kappa_max}")
        _hecke_checks(check, rec.hecke, tol)
        report.records.append(check)

    for rec in ds.holo:
        check = RecordCheck(rec.label)
        if rec.k < MIN_HOLOMORPHIC_K:
            check.kappa_ok = False
            check.failures.append(f"no holomorphic cusp forms of weight {2 * rec.k}")
        if not rec.norm_sq_rho1 > 0.0:
            check.failures.append("norm_sq_rho1 must be positive")
        _hecke_checks(check, rec.hecke, tol)
        report.records.append(check)

    failed = sum(not r.passed for r in report.records)
    logger.info("validated %d records, %d failed", len(report.records), failed)
    return report


def from_prime_values(
    kappa: float,
    epsilon: int,
    norm_sq_rho1: float,
    prime_values: Mapping[int, float],
    limit: int,
    normalization: Normalization = Normalization.UNIT_L2,
) -> MaassFormRecord:
    """A record whose t(n), n <= limit, follow from t(p) through the Hecke relations."""
    table = hecke.multiplicative_extension(prime_values, limit)
    table.pop(1)
    return MaassFormRecord(kappa, epsilon, norm_sq_rho1, table, normalization)


def is_multiplicative(rec: MaassFormRecord, m: int, n: int, tol: float = config.HECKE_RELATION_TOL) -> bool:
    """Whether varrho(mn) varrho(1) = varrho(m) varrho(n) for coprime m, n."""
    if math.gcd(m, n) != 1:
        raise DomainError(f"{m} and {n} are not coprime")
    lhs = normalize(rec, m * n) * normalize(rec, 1)
    rhs = normalize(rec, m) * normalize(rec, n)
    return abs(lhs - rhs) <= tol * max(1.0, abs(rhs))
