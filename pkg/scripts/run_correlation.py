#!/usr/bin/env python3
"""Compute the signal-idler correlation function at the default operating
point and write the curves plus a report to out/correlation/.

Any extra arguments are passed through, e.g.

    python3 scripts/run_correlation.py --temperature 348.15 --set grid.n=8192
"""

import sys

from vaporpair.cli import main

if __name__ == "__main__":
    sys.exit(main(["correlation", "--out", "out/correlation", *sys.argv[1:]]))
