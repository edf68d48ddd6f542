"""Error profile drift of the private-to-public-coin transform under inverter noise."""
import argparse
from fractions import Fraction

from zklab.coin_transform import RoundInverter, build_private_fixture, build_two_private_rounds, publicize


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fixture", choices=["one-round", "two-rounds"], default="one-round")
    ap.add_argument("--etas", type=Fraction, nargs="+", default=[Fraction(0), Fraction(1, 256), Fraction(1, 64)])
    args = ap.parse_args(argv)

    build = build_private_fixture if args.fixture == "one-round" else build_two_private_rounds
    for eta in args.etas:
        _, rep = publicize(build(), RoundInverter(eta) if eta else None)
        deltas = ", ".join(f"{k}={v}" for k, v in rep.deltas.items())
        print(f"eta={eta}: {deltas}; budget {rep.total_eta}; within {rep.within_eta}")
        for row in rep.rows:
            print(f"    {row['hybrid']}: tv {row['tv']}")


if __name__ == "__main__":
    main()
