#!/usr/bin/env python3
"""Sweep optical depth, fit the count-rate scalings, and print the fitted
exponents. Writes odscan.csv and the fit reports to out/odsweep/.

Defaults to the noiseless rate model; pass --set odsweep.mode=planted for
the synthetic heralding-efficiency power law with seeded noise.
"""

import sys

from vaporpair.cli import main

if __name__ == "__main__":
    code = main(["montecarlo", "--od-sweep", "--out", "out/odsweep", *sys.argv[1:]])
    if code == 0:
        print(open("out/odsweep/fit_report.txt").read(), end="")
    sys.exit(code)
