import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from zklab.dist import BudgetExceeded, ExactDist, tv_distance
from zklab.protocols import (
    ErrorProfile,
    Instance,
    NizkSpec,
    Transcript,
    build_counterexample,
    build_demo_interactive,
    build_ideal_nizk,
    build_planted_interactive,
    build_trivial_protocol,
    enumerate_prefixes,
    measure_interactive_errors,
    measure_nizk_errors,
    table_interactive,
    table_nizk,
)

eighths = st.integers(0, 8).map(lambda n: Fraction(n, 8))


class TestNizkFixtures:
    @pytest.mark.parametrize("variant", ["derandomized", "randomized"])
    @given(eps_zk=st.sampled_from([Fraction(1, 10), Fraction(3, 10), Fraction(1, 2), Fraction(3, 4)]),
           eps_s=st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 8)]),
           delta=st.sampled_from([Fraction(0), Fraction(1, 1024), Fraction(1, 64)]))
    def test_counterexample_profile(self, variant, eps_zk, eps_s, delta):
        # the honest pair (1, 1) never occurs under Sim; the other mismatches add up to eps_zk again
        spec = build_counterexample(eps_zk, eps_s, delta, variant)
        assert measure_nizk_errors(spec).as_tuple() == (0, eps_s, eps_zk)

    def test_counterexample_sim_never_gives_crs_one_at_zero_delta(self):
        spec = build_counterexample(Fraction(1, 2), Fraction(1, 4))
        assert spec.sim_crs_law("x_in").mass(lambda c: c[0] == 1) == 0

    def test_counterexample_preconditions(self):
        with pytest.raises(ValueError):
            build_counterexample(Fraction(1, 2), Fraction(1, 4), Fraction(1, 2))
        with pytest.raises(ValueError):
            build_counterexample(Fraction(1, 2), Fraction(1, 4), sound_variant="other")

    @given(a=st.integers(0, 12), b=st.integers(0, 12))
    def test_trivial_profile(self, a, b):
        if a + b > 12:
            a, b = 12 - b, 12 - a
            if a + b > 12:
                return
        eps_c, eps_s = Fraction(a, 12), Fraction(b, 12)
        eps_zk = 1 - eps_c - eps_s
        spec = build_trivial_protocol(eps_c, eps_s, eps_zk)
        assert measure_nizk_errors(spec).as_tuple() == (eps_c, eps_s, eps_zk)

    def test_trivial_needs_unit_sum(self):
        with pytest.raises(ValueError):
            build_trivial_protocol(Fraction(1, 4), Fraction(1, 4), Fraction(1, 4))

    def test_ideal(self):
        assert measure_nizk_errors(build_ideal_nizk()).as_tuple() == (0, 0, 0)

    def test_adaptive_soundness_dominates(self):
        spec = build_counterexample(Fraction(1, 2), Fraction(1, 4), Fraction(1, 64))
        assert measure_nizk_errors(spec, adaptive=True).eps_s >= measure_nizk_errors(spec).eps_s

    def test_table_nizk(self):
        gen = ExactDist.uniform(["A", "B"])
        sim = {"x_in": ExactDist({("A", 1): Fraction(1, 2), ("B", 0): Fraction(1, 2)}),
               "x_out": ExactDist({("A", 0): Fraction(1, 2), ("B", 0): Fraction(1, 2)})}
        prover = {("A", "x_in"): ExactDist.point(1), ("B", "x_in"): ExactDist.point(1)}
        accept = {("A", "x_in", 1): 2, ("B", "x_in", 1): 2, ("A", "x_out", 0): 1}
        spec = table_nizk("t", (Instance("x_in", True, "w"), Instance("x_out", False)), gen, sim, prover,
                          accept, proofs=(0, 1), verifier_tapes=2)
        prof = measure_nizk_errors(spec)
        # eps_s: crs A accepts proof 0 on half of the verifier tapes
        assert prof.as_tuple() == (0, Fraction(1, 4), Fraction(1, 2))

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            NizkSpec("big", (Instance("x", True),), 1 << 21, 1, 1, gen=lambda r: 0,
                     prove=lambda *a: 0, verify=lambda *a: True, simulate=lambda x, r: (0, 0))

    def test_profile_range(self):
        with pytest.raises(ValueError):
            ErrorProfile(Fraction(3, 2), 0, 0)


def brute_soundness(spec, x):
    """Best deterministic prover by enumerating every strategy table (3-round specs only)."""
    assert spec.owners == ("P", "V", "P")
    size = spec.verifier_sizes[1]
    best = Fraction(0)
    for first in spec.prover_alphabet:
        for resp in itertools.product(spec.prover_alphabet, repeat=size):
            v = sum((spec.accept_prob(x, (first, c, resp[c])) for c in range(size)), Fraction(0)) / size
            best = max(best, v)
    return best


class TestInteractive:
    @pytest.mark.parametrize("k", [3, 5])
    @pytest.mark.parametrize("profile", [(0, Fraction(1, 4), Fraction(1, 2)), (Fraction(1, 8), Fraction(1, 4), 0),
                                         (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)),
                                         (0, 0, 1)])
    def test_demo_hits_targets(self, k, profile):
        spec = build_demo_interactive(k, profile)
        assert measure_interactive_errors(spec).as_tuple() == tuple(Fraction(v) for v in profile)

    @given(c=eighths, s=eighths, z=eighths)
    def test_demo_targets_property(self, c, s, z):
        if c + s >= 1 or (c + s + z >= 1 and z < 1 - c - s):
            return
        spec = build_demo_interactive(3, (c, s, z))
        assert measure_interactive_errors(spec).as_tuple() == (c, s, z)

    def test_demo_k_restricted(self):
        with pytest.raises(ValueError):
            build_demo_interactive(4, (0, 0, 0))

    def test_game_value_matches_strategy_enumeration(self):
        for spec in (build_planted_interactive(Fraction(1, 16)), build_demo_interactive(3, (0, Fraction(1, 4), Fraction(1, 2)))):
            for x in ("x_in", "x_out"):
                assert spec.game_value(x) == brute_soundness(spec, x)

    def test_planted(self):
        spec = build_planted_interactive(Fraction(1, 16))
        prof = measure_interactive_errors(spec)
        # honest always opens "good"; Sim does so w.p. rho and is wrong on half the weak challenges
        assert prof.eps_c == 0 and prof.eps_s == 0
        assert prof.eps_zk == 1 - Fraction(1, 16)
        assert spec.sim_law("x_in").mass(lambda t: t[0] == "good") == Fraction(1, 16)

    def test_transcript(self):
        t = Transcript(("a", 1, "z"), ("P", "V", "P"))
        assert t.entries() == [(1, "P", "a"), (2, "V", 1), (3, "P", "z")]
        assert t.complete and not t.prefix(2).complete
        with pytest.raises(ValueError):
            Transcript((1, 2, 3, 4), ("P", "V", "P"))

    def test_enumerate_prefixes(self):
        spec = build_planted_interactive()
        assert len(list(enumerate_prefixes(spec, 2))) == len(spec.prover_alphabet) * 4

    def test_table_interactive(self):
        inst = (Instance("x_in", True, "w"), Instance("x_out", False))
        prover = {("x_in", 0, ()): "a", ("x_in", 0, ("a", 0)): "z", ("x_in", 0, ("a", 1)): "z"}
        accept = {("x_in", ("a", 0, "z")): 1, ("x_in", ("a", 1, "z")): Fraction(1, 2)}
        sim = {"x_in": ExactDist.uniform([("a", 0, "z"), ("a", 1, "z")]), "x_out": ExactDist.point(("a", 0, "z"))}
        spec = table_interactive("t", inst, ("P", "V", "P"), (2,), ("a", "z"), prover, accept, sim)
        assert not spec.deterministic_accept
        prof = measure_interactive_errors(spec)
        assert prof.as_tuple() == (Fraction(1, 4), 0, 0)
        assert tv_distance(spec.honest_law("x_in"), spec.sim_law("x_in")) == 0
