#!/usr/bin/env python3
"""Write the standard set of SVG figures into an output directory.

    python3 scripts/reproduce_figures.py [outdir] [--threads N]
"""

import argparse
import sys
import time
from pathlib import Path

from radgaps.cli import main as cli

FIGURES = {
    "profile_alpha2_N20000.svg": ["profile", "--n", "20000", "--max-q", "60"],
    "profile_a2_N1e6.svg": ["profile", "--a", "2", "--n", "1000000", "--max-q", "40"],
    "profile_a3_N1e6.svg": ["profile", "--a", "3", "--n", "1000000", "--max-q", "40"],
    "profile_a5_N1e6.svg": ["profile", "--a", "5", "--n", "1000000", "--max-q", "40"],
    "profile_alpha3_N5e7.svg": ["profile", "--alpha", "3", "--n", "50000000", "--max-q", "12"],
    "converge_half.svg": ["converge", "--x", "1/2", "--n", "1000,3000,10000,30000,100000,300000,1000000"],
    "orchard_k141.svg": ["orchard", "--k-max", "141", "--max-q", "20"],
    "histogram_N1e6.svg": ["histogram", "--n", "1000000", "--bins", "60"],
}


def run(outdir: Path, threads: int) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    for name, argv in FIGURES.items():
        t0 = time.perf_counter()
        extra = ["--threads", str(threads)] if argv[0] == "profile" else []
        code = cli(argv + extra + ["--format", "svg", "-o", str(outdir / name)])
        print(f"{name:28s} exit={code} {time.perf_counter() - t0:6.1f}s")
        if code:
            return code
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", nargs="?", default="figures")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    sys.exit(run(Path(args.outdir), args.threads))
