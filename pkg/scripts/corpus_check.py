"""Run the statement corpus next to the registry and report agreement per claim.

    python3 scripts/corpus_check.py --samples 20
"""

import argparse
from dataclasses import replace

from tsallis_ops import corpus as corp
from tsallis_ops.properties import SuiteConfig, run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--path", help="corpus file (default: the bundled one)")
    args = ap.parse_args()

    cfg = replace(SuiteConfig(), seed=args.seed, samples=args.samples)
    lines = corp.load_corpus(args.path)
    verdicts = {v.property: v for v in corp.run_corpus(lines, cfg)}
    table = corp.compare(run_all(cfg), list(verdicts.values()))
    for c in table:
        v = verdicts.get(c.property)
        worst = min((r.worst_margin for r in v.lines), default=float("nan")) if v else float("nan")
        n = len(v.lines) if v else 0
        print(f"{c.property:30} registry={c.registry!s:5} corpus={c.corpus!s:5} "
              f"statements={n:2} worst={worst:.2e} {'' if c.matches else 'MISMATCH'}")
    print(f"{sum(c.matches for c in table)}/{len(table)} claims agree")


if __name__ == "__main__":
    main()
