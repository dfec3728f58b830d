"""Build the shipped Gaussian benchmark tables (both parities, default grids).

    python scripts/build_table.py [--out src/catability/data] [--workers 1]

Takes about an hour per parity on a single core.
"""

import argparse
import time
from pathlib import Path

from catability.benchmark import (
    DEFAULT_ALPHA_GRID,
    DEFAULT_GAMMA_GRID,
    build_table,
    save_table,
    table_filename,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=Path(__file__).resolve().parents[1] / "src" / "catability" / "data")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--sign", choices=["+", "-", "both"], default="both")
    args = ap.parse_args()
    signs = ["+", "-"] if args.sign == "both" else [args.sign]
    for sign in signs:
        t0 = time.time()
        table = build_table(DEFAULT_ALPHA_GRID, DEFAULT_GAMMA_GRID, sign, workers=args.workers,
                            progress=lambda msg: print(f"[{sign}] {msg}  {time.time() - t0:.0f}s", flush=True))
        path = save_table(table, Path(args.out) / table_filename(sign))
        print(f"wrote {path} in {time.time() - t0:.0f}s", flush=True)


if __name__ == "__main__":
    main()
