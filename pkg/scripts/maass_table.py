"""Locate every Maass form of PSL(2, Z) up to a spectral parameter and write them as a dataset.

    python scripts/maass_table.py [output.csv] [kappa-max]

The manifest side file records the solver, the range and the attained precision, so the output
can be passed straight to ``kuznetsov trace --dataset``.
"""

import logging
import sys
from pathlib import Path

from kuznetsov import config
from kuznetsov.analysis import hejhal
from kuznetsov.errors import KuznetsovError
from kuznetsov.io import spectra
from kuznetsov.log import configure_logging

logger = logging.getLogger("kuznetsov.batch")

if __name__ == "__main__":
    path = Path(sys.argv[1] if len(sys.argv) > 1 else "maass.csv")
    kappa_max = float(sys.argv[2]) if len(sys.argv) > 2 else config.MAASS_TABLE_KAPPA_MAX
    configure_logging(logging.INFO)
    try:
        data = hejhal.tabulate(kappa_hi=kappa_max)
        spectra.save(data, path)
    except KuznetsovError as e:
        logger.error("tabulation failed: %s", e)
        sys.exit(1)
    report = spectra.validate(data)
    if not report.passed:
        logger.error("the table fails validation")
        sys.exit(1)
    logger.info("wrote %d forms to %s", len(data), path)
