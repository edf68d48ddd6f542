"""Exact acceptance of the three NIZK deciders on the counterexample family.

    python3 scripts/counterexample_table.py --eps-zk 1/2 --eps-s 1/4 --T 64
"""
import argparse
from fractions import Fraction

from zklab.nizk_deciders import DeciderParams, nizk_gap_experiment
from zklab.protocols import build_counterexample, measure_nizk_errors


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps-zk", type=Fraction, default=Fraction(1, 2))
    ap.add_argument("--eps-s", type=Fraction, default=Fraction(1, 4))
    ap.add_argument("--deltas", type=Fraction, nargs="+", default=[Fraction(0), Fraction(1, 1024), Fraction(1, 64)])
    ap.add_argument("--variant", choices=["derandomized", "randomized"], default="derandomized")
    ap.add_argument("--T", type=int, default=64)
    args = ap.parse_args(argv)

    print(f"{'delta':>8} {'decider':>7} {'x_in':>10} {'x_out':>10} {'gap':>10}")
    for delta in args.deltas:
        spec = build_counterexample(args.eps_zk, args.eps_s, delta, args.variant)
        res = nizk_gap_experiment(spec, DeciderParams(T=args.T))
        for rep in res.reports:
            print(f"{str(delta):>8} {rep.decider:>7} {float(rep.accept_in):10.6f} "
                  f"{float(rep.accept_out):10.6f} {float(rep.gap):10.6f}")
        print(f"{'':>8} profile (eps_c, eps_s, eps_zk) = {tuple(str(v) for v in measure_nizk_errors(spec).as_tuple())}")


if __name__ == "__main__":
    main()
