"""Run every verification suite and write one records file per suite.

    python scripts/main.py [output-dir] [seed]

Stops cleanly between suites on SIGINT, SIGTERM or SIGHUP.
"""

import logging
import signal
import sys
from pathlib import Path
from threading import Event

from kuznetsov.app.suite import run_all
from kuznetsov.log import configure_logging

logger = logging.getLogger("kuznetsov.batch")

if __name__ == "__main__":
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "reports")
    seed = sys.argv[2] if len(sys.argv) > 2 else "0"
    out_dir.mkdir(parents=True, exist_ok=True)
    configure_logging(logging.INFO, out_dir / "batch.log")

    exit = Event()

    def quit(signo, _frame):
        logger.warning("Interrupted by %s, stopping after the current suite", signo)
        exit.set()

    signal.signal(signal.SIGTERM, quit)
    signal.signal(signal.SIGINT, quit)
    signal.signal(signal.SIGHUP, quit)

    failed = run_all(out_dir, seed, exit)
    if failed:
        logger.error("failed suites: %s", ", ".join(failed))
    sys.exit(1 if failed or exit.is_set() else 0)
