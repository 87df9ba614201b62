#!/usr/bin/env python3
"""Regenerate the data behind the momentum-density and refraction-index plots.

Produces, in --out-dir:
  density_sigma4.csv / density_sigma6.csv  -- |psi(k)|^2 with the kappa_c
      marker for the wide packets at k0 = 1.3, v0 = 0.99
  ior_scan.csv -- the effective refraction index over k0 in [0.1, 6] for
      sigma = 6, v0 = 0.99 (superluminal region, peak, slow tail)
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from reltoa.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out", help="output directory")
    parser.add_argument("--steps", type=int, default=120, help="scan resolution")
    args = parser.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = [
        (
            "density_sigma4.csv",
            ["density", "--vo", "0.99", "--sigma", "4", "--ko", "1.3", "--grid", "400"],
        ),
        (
            "density_sigma6.csv",
            ["density", "--vo", "0.99", "--sigma", "6", "--ko", "1.3", "--grid", "400"],
        ),
        (
            "ior_scan.csv",
            [
                "scan", "--vo", "0.99", "--sigma", "6",
                "--ko-min", "0.1", "--ko-max", "6.0", "--steps", str(args.steps),
            ],
        ),
    ]
    for name, argv in jobs:
        path = out / name
        code = cli_main(["--out", str(path)] + argv)
        if code != 0:
            return code
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
