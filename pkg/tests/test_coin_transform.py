import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from zklab.coin_transform import (
    RoundInverter,
    build_private_fixture,
    build_two_private_rounds,
    inverter_joint_tv,
    exact_distributional_inverter,
    hybrid_step,
    public_as_private,
    publicize,
    to_interactive,
    transform_fidelity,
)
from zklab.dist import ExactDist, tv_distance
from zklab.izk_engine import EngineParams, exact_success
from zklab.protocols import build_demo_interactive, measure_interactive_errors


def brute_errors(spec):
    """Errors of a P/Vp spec straight from its callables, tracking the hidden tape as a set."""
    tapes = range(spec.tape_size)

    def honest(x, w):
        out = {}
        for rp, r in itertools.product(range(spec.prover_tapes), tapes):
            tau = ()
            for j, kd in enumerate(spec.kinds):
                tau += (spec.prove(x, w, tau, rp) if kd == "P" else spec.next_message[j](x, tau, r),)
            key = (tau, bool(spec.accept(x, tau, r)))
            out[key] = out.get(key, 0) + 1
        return ExactDist.from_counts(out)

    def value(x, tau, rs):
        j = len(tau)
        if j == spec.k:
            return Fraction(sum(bool(spec.accept(x, tau, r)) for r in rs), len(rs))
        if spec.kinds[j] == "P":
            return max(value(x, tau + (m,), rs) for m in spec.prover_alphabet)
        groups = {}
        for r in rs:
            groups.setdefault(spec.next_message[j](x, tau, r), []).append(r)
        return sum((Fraction(len(g), len(rs)) * value(x, tau + (c,), g) for c, g in groups.items()), Fraction(0))

    inst = spec.instance("x_in")
    h = honest("x_in", inst.witness)
    eps_c = h.mass(lambda o: not o[1])
    sim = ExactDist.from_counts(_count(tuple(spec.simulate("x_in", s)) for s in range(spec.sim_tapes)))
    eps_zk = tv_distance(h.map(lambda o: o[0]), sim)
    eps_s = value("x_out", (), list(tapes))
    return eps_c, eps_s, eps_zk


def _count(it):
    out = {}
    for o in it:
        out[o] = out.get(o, 0) + 1
    return out


FIXTURES = [build_private_fixture, build_two_private_rounds]


class TestFixtures:
    @given(st.integers(0, 8))
    def test_private_fixture_targets(self, n):
        wrong = Fraction(n, 8)
        spec = build_private_fixture(wrong)
        assert spec.errors().as_tuple() == brute_errors(spec) == (Fraction(1, 8), Fraction(1, 4), wrong)

    def test_two_rounds(self):
        spec = build_two_private_rounds()
        assert spec.errors().as_tuple() == brute_errors(spec) == (0, Fraction(1, 4), 0)
        assert spec.t == 0 and not spec.is_public_coin()


class TestPublicize:
    @pytest.mark.parametrize("build", FIXTURES)
    def test_exact_inverter_preserves_errors(self, build):
        spec = build()
        pub, rep = publicize(spec)
        assert all(d == 0 for d in rep.deltas.values())
        assert all(row["tv"] == 0 for row in rep.rows)
        assert measure_interactive_errors(pub).as_tuple() == spec.errors().as_tuple()

    @pytest.mark.parametrize("build", FIXTURES)
    @given(eta=st.sampled_from([Fraction(1, 64), Fraction(1, 16), Fraction(1, 4)]))
    def test_injected_error_within_eta(self, build, eta):
        spec = build()
        pub, rep = publicize(spec, RoundInverter(eta))
        assert rep.within_eta
        assert measure_interactive_errors(pub).as_tuple() == rep.after.as_tuple()

    def test_frozen_deltas(self):
        # cross-checked against the public-coin view measured by the interactive backward induction
        _, rep = publicize(build_private_fixture(), RoundInverter(Fraction(1, 64)))
        assert rep.deltas["eps_zk"] == Fraction(1, 128)
        assert max(r["tv"] for r in rep.rows) == Fraction(3, 256)
        _, rep5 = publicize(build_two_private_rounds(), RoundInverter(Fraction(1, 64)))
        assert max(abs(d) for d in rep5.deltas.values()) == Fraction(255, 16384)
        assert rep5.total_eta == Fraction(1, 32)

    def test_rows_and_budget(self):
        _, rep = publicize(build_two_private_rounds(), RoundInverter(Fraction(1, 64)), q_budget=16)
        assert [r["hybrid"] for r in rep.rows] == ["original"] + [f"round {j} hybrid {w}" for j in (2, 4)
                                                                   for w in (1, 2, 3)]
        assert rep.within_budget
        d = rep.as_dict()
        assert set(d) >= {"before", "after", "deltas", "rows"}

    def test_public_spec_is_usable_downstream(self):
        pub, _ = publicize(build_private_fixture())
        params = EngineParams(p=8, n=4, p_est=8, mode="exact")
        assert exact_success(pub, "x_in", (), params) > exact_success(pub, "x_out", (), params)

    def test_public_input_is_identity(self):
        demo = build_demo_interactive(3, (0, Fraction(1, 4), Fraction(1, 2)))
        wrapped = public_as_private(demo)
        pub, rep = publicize(wrapped)
        assert rep.rows[1:] == [] and all(d == 0 for d in rep.deltas.values())
        assert measure_interactive_errors(pub).as_tuple() == measure_interactive_errors(demo).as_tuple()


class TestSteps:
    def test_out_of_order(self):
        spec = build_private_fixture()
        with pytest.raises(ValueError, match="step 2"):
            hybrid_step(spec, RoundInverter(), 2)
        s1 = hybrid_step(spec, RoundInverter(), 1)
        with pytest.raises(ValueError):
            hybrid_step(s1, RoundInverter(), 3)

    def test_not_public_yet(self):
        with pytest.raises(ValueError):
            to_interactive(build_private_fixture())

    def test_stage_tvs(self):
        spec = build_private_fixture()
        s1 = hybrid_step(spec, RoundInverter(), 1)
        s2 = hybrid_step(s1, None, 2)
        s3 = hybrid_step(s2, None, 3)
        assert s3.is_public_coin() and s3.kinds == ("P", "H3", "P")
        rep = transform_fidelity(spec, s3)
        assert all(d == 0 for d in rep.deltas.values())

    def test_inverter_quality(self):
        spec = build_private_fixture()
        inv = exact_distributional_inverter(spec, (3,))
        assert inverter_joint_tv(inv) == 0
        c = spec.next_message[1]("x_in", (3,), 5)
        assert all(spec.next_message[1]("x_in", (3,), r) == c for r in inv.law(c).outcomes())
        noisy = type(inv)(spec, "x_in", (3,), 1, Fraction(1, 8))
        assert 0 < inverter_joint_tv(noisy) <= Fraction(1, 8)
        with pytest.raises(ValueError):
            exact_distributional_inverter(spec, ())
