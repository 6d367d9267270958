"""Distance ||T_lam(A|B) - S(A|B)|| over a lambda sweep, with the fitted slope.

Prints one row per instance; a slope near 1 on the log-log scale is linear
convergence.

    python3 scripts/convergence_sweep.py --dim 4 --instances 5
"""

import argparse

import numpy as np

from tsallis_ops import ensembles as ens
from tsallis_ops.suites import convergence_distances

LAMS = np.geomspace(1e-1, 1e-7, 7)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--cond", type=float, default=10.0)
    args = ap.parse_args()

    root = ens.SeededGenerator(args.seed).derive("sweep", args.dim)
    print("lambda   " + " ".join(f"{l:9.0e}" for l in LAMS) + "    slope   C")
    for i in range(args.instances):
        g = root.derive(i)
        A, B = ens.random_pd(g.derive("A"), args.dim, args.cond), ens.random_pd(g.derive("B"), args.dim, args.cond)
        d = convergence_distances(A, B, tuple(LAMS))
        slope = np.polyfit(np.log(LAMS), np.log(d), 1)[0]
        print(f"case {i:2}  " + " ".join(f"{x:9.2e}" for x in d) + f"  {slope:6.3f}  {d[0] / LAMS[0]:.3e}")


if __name__ == "__main__":
    main()
