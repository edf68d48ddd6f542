"""Seeded runs of the interactive decider on the demo fixture.

    python3 scripts/izk_gap.py --k 3 --runs 10000 --seed 0
"""
import argparse
import time
from fractions import Fraction

from zklab.izk_engine import EngineParams, izk_gap_experiment
from zklab.protocols import build_demo_interactive


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--profile", type=Fraction, nargs=3, default=[Fraction(0), Fraction(1, 4), Fraction(1, 2)])
    ap.add_argument("--p", type=Fraction, default=Fraction(8))
    ap.add_argument("--p-est", type=Fraction, default=Fraction(8))
    ap.add_argument("--runs", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--exact", action="store_true", help="compute the exact law instead of sampling")
    args = ap.parse_args(argv)

    spec = build_demo_interactive(args.k, tuple(args.profile))
    params = EngineParams(p=args.p, n=4, p_est=args.p_est, mode="exact" if args.exact else "mc")
    t = time.perf_counter()
    rep = izk_gap_experiment(spec, params, runs=args.runs, seed=args.seed)
    print(f"accept x_in  {float(rep.accept_in):.4f}  interval {rep.ci_in}")
    print(f"accept x_out {float(rep.accept_out):.4f}  interval {rep.ci_out}")
    print(f"gap {float(rep.gap):.4f}  lower {rep.gap_lower}  ({time.perf_counter() - t:.1f}s)")


if __name__ == "__main__":
    main()
