#!/usr/bin/env python3
"""Run the no-phonon string-breaking experiment and print the detector verdict.

Defaults to the ten-minute desk-scale chain (L = 18); pass --full for the
L = 24 production configuration (hours on a desktop, ~7 GiB of state).
"""

import argparse
import sys
import time
from pathlib import Path

from isingstring.cli import main as cli_main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--full", action="store_true",
                        help="use the L = 24 production configuration")
    parser.add_argument("--out", default=None, help="run directory")
    parser.add_argument("--set", action="append", dest="sets", default=[],
                        metavar="KEY=VALUE", help="config override")
    args = parser.parse_args()
    config = CONFIGS / ("fig3_L24.cfg" if args.full else "fig3_L18.cfg")
    argv = ["run", "--config", str(config)]
    if args.out:
        argv += ["--out", args.out]
    for pair in args.sets:
        argv += ["--set", pair]
    start = time.time()
    status = cli_main(argv)
    print(f"wall time: {(time.time() - start) / 60:.1f} min")
    return status


if __name__ == "__main__":
    sys.exit(main())
