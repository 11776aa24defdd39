"""Sweep the commuting squares over carrier sizes and seeds.

Writes one row per (square, size, seed) with pass counts and wall time, as
CSV on stdout or JSON with ``--json``. Materialized squares (DeV, Frame)
are skipped above the exhaustive cap.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from dualvik import duality
from dualvik.config import RunConfig


def sweep(squares, sizes, seeds, cfg: RunConfig):
    vcfg = cfg.verify_config()
    for name in squares:
        for size in sizes:
            if name in duality.MATERIALIZED and size > cfg.exhaustive_cap:
                continue
            for seed in seeds:
                t0 = time.perf_counter()
                reps = duality.verify_family(name, size, seed, vcfg)
                failed = [r for r in reps if not r.ok]
                yield {
                    "square": name,
                    "size": size,
                    "seed": seed,
                    "instances": len(reps),
                    "passed": len(reps) - len(failed),
                    "first_failure": failed[0].line() if failed else "",
                    "seconds": round(time.perf_counter() - t0, 3),
                }


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--squares", default="all", help="comma-separated square names, or 'all'")
    p.add_argument("--sizes", default="1,2,3")
    p.add_argument("--seeds", default="0", help="comma-separated seeds, or a range like 0-4")
    p.add_argument("--relations", type=int, default=RunConfig.relations)
    p.add_argument("--samples", type=int, default=RunConfig.samples)
    p.add_argument("--json", action="store_true")
    args = p.parse_args(argv)

    squares = duality.SQUARES if args.squares == "all" else tuple(s.strip() for s in args.squares.split(","))
    sizes = [int(s) for s in args.sizes.split(",")]
    if "-" in args.seeds:
        lo, hi = (int(s) for s in args.seeds.split("-"))
        seeds = list(range(lo, hi + 1))
    else:
        seeds = [int(s) for s in args.seeds.split(",")]
    cfg = RunConfig(relations=args.relations, samples=args.samples)

    rows = list(sweep(squares, sizes, seeds, cfg))
    if args.json:
        json.dump(rows, sys.stdout, indent=2)
        print()
    else:
        w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]) if rows else ["square"])
        w.writeheader()
        w.writerows(rows)
    return 0 if all(r["passed"] == r["instances"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
