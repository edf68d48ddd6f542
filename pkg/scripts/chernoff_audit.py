"""Empirical binomial tails against the Chernoff bounds on the default grid."""
import argparse

from zklab.dist import chernoff_audit


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    print(f"{'kind':>10} {'m':>5} {'p':>6} {'delta':>6} {'empirical':>10} {'exact':>10} {'bound':>10}")
    for r in chernoff_audit(trials=args.trials, seed=args.seed):
        flag = "" if r["pass"] else "  VIOLATION"
        print(f"{r['kind']:>10} {r['m']:5d} {str(r['p']):>6} {str(r['delta']):>6} "
              f"{r['empirical']:10.6f} {float(r['exact_tail']):10.6f} {r['bound']:10.6f}{flag}")


if __name__ == "__main__":
    main()
