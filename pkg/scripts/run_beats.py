#!/usr/bin/env python3
"""Filtered detector-plane correlations for each configured absorption
depth, with the beat report. Writes to out/beats/."""

import sys

from vaporpair.cli import main

if __name__ == "__main__":
    sys.exit(main(["beats", "--out", "out/beats", *sys.argv[1:]]))
