#!/usr/bin/env python3
"""Regenerate the two reference tables as CSV files.

Writes table1.csv (narrow packets, three methods) and table2.csv (wide
packets, instantaneous-tunneling regime) into --out-dir.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from reltoa.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out", help="output directory")
    args = parser.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in ("table1", "table2"):
        path = out / f"{name}.csv"
        code = cli_main(["--out", str(path), name])
        if code != 0:
            return code
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
