"""Run the property registry and auxiliary suites, write JSON and print a table.

    python3 scripts/run_suite.py --samples 50 --out results/suite.json
"""

import argparse
import time
from dataclasses import replace
from pathlib import Path

from tsallis_ops.cli import serialize_reports, text_table
from tsallis_ops.properties import SuiteConfig, run_all
from tsallis_ops.suites import AUXILIARY


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    cfg = replace(SuiteConfig(), seed=args.seed, samples=args.samples)
    t0 = time.perf_counter()
    reports = run_all(cfg, progress=lambda r: print(f"  {r.property:30} {r.wall_ms / 1e3:6.1f}s"),
                      workers=args.workers)
    reports += [suite(cfg) for suite in AUXILIARY.values()]
    print(text_table(reports))
    print(f"total {time.perf_counter() - t0:.1f}s, {sum(r.passed for r in reports)}/{len(reports)} pass")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(serialize_reports(reports) + "\n")


if __name__ == "__main__":
    main()
