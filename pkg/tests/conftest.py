from pathlib import Path

import numpy as np
import pytest

from kuznetsov import config
from kuznetsov.analysis import hecke, hejhal
from kuznetsov.io import spectra
from kuznetsov.io.spectra import HoloFormRecord, Manifest, Normalization, SpectralDataset

# Clearly synthetic spectral parameters: these are not eigenvalues of PSL(2, Z). The records only
# satisfy the Hecke relations by construction, which is what the dataset machinery checks.
SYNTHETIC_KAPPAS = (9.61, 12.27, 13.83, 14.41, 16.19, 17.76, 18.42, 19.58, 20.34, 21.52)
PRIMES = (2, 3, 5, 7)
HECKE_LIMIT = 10

# Ramanujan tau at the primes below 10; t(p) = tau(p) / p^(11/2)
RAMANUJAN_TAU = {2: -24, 3: 252, 5: 4830, 7: -16744}


def synthetic_forms(seed: int = 3):
    rng = np.random.default_rng(seed)
    forms = []
    for index, kappa in enumerate(SYNTHETIC_KAPPAS):
        prime_values = {p: float(rng.uniform(-1.8, 1.8)) for p in PRIMES}
        forms.append(
            spectra.from_prime_values(
                kappa,
                1 if index % 2 == 0 else -1,
                float(rng.uniform(0.5, 3.0)),
                prime_values,
                HECKE_LIMIT,
                Normalization.KUZNETSOV_ALPHA,
            )
        )
    return tuple(forms)


def delta_record() -> HoloFormRecord:
    t = hecke.multiplicative_extension({p: tau / p**5.5 for p, tau in RAMANUJAN_TAU.items()}, HECKE_LIMIT)
    t.pop(1)
    return HoloFormRecord(k=6, norm_sq_rho1=2.5, hecke=t, label="delta")


@pytest.fixture
def dataset() -> SpectralDataset:
    manifest = Manifest(
        source="synthetic",
        N=HECKE_LIMIT,
        kappa_max=22.0,
        precision=1e-12,
        normalization=Normalization.KUZNETSOV_ALPHA,
    )
    return SpectralDataset(synthetic_forms(), (delta_record(),), manifest)


@pytest.fixture
def maass_only(dataset) -> SpectralDataset:
    return SpectralDataset(dataset.forms, (), dataset.manifest)


@pytest.fixture
def csv_dataset(tmp_path, maass_only):
    path = tmp_path / "maass.csv"
    spectra.save(maass_only, path)
    return path


@pytest.fixture
def jsonl_dataset(tmp_path, dataset):
    path = tmp_path / "spectrum.jsonl"
    spectra.save(dataset, path)
    return path


@pytest.fixture(scope="session")
def computed_spectrum(request, tmp_path_factory) -> SpectralDataset:
    """Every Maass form up to kappa = 30 located by collocation, kept in the pytest cache between runs."""
    cache = getattr(request.config, "cache", None)
    folder = Path(cache.mkdir("maass")) if cache is not None else tmp_path_factory.mktemp("maass")
    path = folder / f"maass-{config.MAASS_TABLE_KAPPA_MAX:g}.csv"
    if path.exists() and spectra.manifest_path(path).exists():
        return spectra.load(path)
    data = hejhal.tabulate(kappa_hi=config.MAASS_TABLE_KAPPA_MAX)
    spectra.save(data, path)
    return data
