"""Write every built-in fixture as a schema-validated JSON spec file."""
import argparse
from fractions import Fraction
from pathlib import Path

from zklab.coin_transform import build_private_fixture, publicize
from zklab.protocols import (
    build_counterexample,
    build_demo_interactive,
    build_ideal_nizk,
    build_planted_interactive,
    build_trivial_protocol,
)
from zklab.spec_io import dumps


def fixtures():
    h, q = Fraction(1, 2), Fraction(1, 4)
    yield "counterexample", build_counterexample(h, q)
    yield "counterexample_delta", build_counterexample(h, q, Fraction(1, 1024))
    yield "counterexample_randomized", build_counterexample(h, q, 0, "randomized")
    yield "trivial", build_trivial_protocol(q, q, h)
    yield "ideal", build_ideal_nizk()
    yield "demo_k3", build_demo_interactive(3, (0, q, h))
    yield "planted", build_planted_interactive()
    yield "public_coin_k3", publicize(build_private_fixture())[0]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("specs"))
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for name, spec in fixtures():
        path = args.out / f"{name}.json"
        path.write_text(dumps(spec) + "\n")
        print(path)


if __name__ == "__main__":
    main()
