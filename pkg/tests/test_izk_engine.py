import itertools
import time
from fractions import Fraction

import pytest

from zklab.dist import BudgetExceeded, SeedStream, chernoff_interval
from zklab.extrapolation import perturb_ue
from zklab.izk_engine import (
    DESK_PARAMS,
    Engine,
    EngineParams,
    Stuck,
    alg7_decider,
    classify_message,
    engine_for,
    est,
    exact_success,
    hybrid_chain,
    hybrid_transcript,
    izk_distinguisher,
    izk_gap_experiment,
    p_tilde_next,
    prefix_oracle,
)
from zklab.protocols import build_demo_interactive, build_planted_interactive, measure_interactive_errors

PROFILE = (0, Fraction(1, 4), Fraction(1, 2))


def demo(k=3, profile=PROFILE):
    return build_demo_interactive(k, profile)


def brute_value(spec, x, S, tau=(), memo=None):
    """P-tilde with exact estimates: enumerate every S-tuple of Sim tapes consistent with tau."""
    memo = {} if memo is None else memo
    if tau in memo:
        return memo[tau]
    i = len(tau)
    if i == spec.k:
        v = Fraction(spec.accept_prob(x, tau))
    elif spec.owners[i] == "V":
        size = spec.verifier_sizes[i]
        v = sum((brute_value(spec, x, S, tau + (c,), memo) for c in range(size)), Fraction(0)) / size
    else:
        exts = [spec.sim_transcript(x, r)[: i + 1] for r in range(spec.sim_tapes)
                if spec.sim_transcript(x, r)[:i] == tau]
        if not exts:
            v = Fraction(0)
        else:
            vals = [brute_value(spec, x, S, e, memo) for e in exts]
            total = Fraction(0)
            for pick in itertools.product(range(len(exts)), repeat=S):
                total += max(vals[j] for j in pick)
            v = total / len(exts) ** S
    memo[tau] = v
    return v


class TestParams:
    def test_formula_defaults(self):
        p = EngineParams(p=8, n=4).instantiate(3)
        assert p.p_est == 256 * 9 * 4 * 64
        assert (p.ptilde_samples, p.dist_samples, p.dist_cutoff) == (1536, 768, 4)
        assert p.est_trials == 12 * p.p_est ** 4

    def test_desk(self):
        p = DESK_PARAMS.instantiate(3)
        assert (p.p_est, p.est_trials, p.ptilde_samples, p.dist_samples) == (8, 49152, 1536, 768)

    def test_literal_trials_refused_in_mc(self):
        with pytest.raises(ValueError):
            Engine(demo(), "x_in", params=EngineParams(p=8, n=4))

    def test_validation(self):
        with pytest.raises(ValueError):
            EngineParams(mode="fast")
        with pytest.raises(ValueError):
            EngineParams(est_trials=0)


class TestExactValue:
    @pytest.mark.parametrize("S", [1, 2, 3])
    @pytest.mark.parametrize("spec", [demo(), build_planted_interactive(Fraction(1, 4)),
                                      demo(3, (Fraction(1, 8), Fraction(1, 4), Fraction(1, 4)))],
                             ids=["demo", "planted", "demo-b"])
    def test_matches_tuple_enumeration(self, S, spec):
        params = EngineParams(p=8, n=4, p_est=8, ptilde_samples=S, mode="exact")
        for x in ("x_in", "x_out"):
            assert exact_success(spec, x, (), params) == brute_value(spec, x, S)

    def test_frozen_values(self):
        spec = demo()
        params = EngineParams(p=8, n=4, p_est=8, ptilde_samples=2, mode="exact")
        # both opening draws are bad w.p. 1/4, and then only the free challenge region (1/4) accepts
        assert exact_success(spec, "x_in", (), params) == Fraction(3, 4) + Fraction(1, 4) * Fraction(1, 4)
        assert exact_success(spec, "x_out", (), params) == Fraction(1, 4)

    def test_desk_value_near_one(self):
        spec = demo()
        v = exact_success(spec, "x_in", (), EngineParams(p=8, n=4, p_est=8, mode="exact"))
        assert 1 - Fraction(1, 10 ** 100) < v < 1

    def test_decision_law_sums_to_one(self):
        eng = engine_for(demo(), "x_in", params=EngineParams(p=8, n=4, p_est=8, ptilde_samples=3, mode="exact"))
        law = eng.decision_law(())
        assert sum(w for _, w in law.items()) == 1

    def test_budget(self):
        params = EngineParams(p=8, n=4, p_est=8, mode="exact", budget_bits=2)
        with pytest.raises(BudgetExceeded):
            Engine(demo(5), "x_in", params=params).value(())

    def test_stuck_without_sim_support(self):
        spec = demo()
        eng = Engine(spec, "x_in", params=EngineParams(p=8, n=4, p_est=8, mode="exact"))
        with pytest.raises(Stuck):
            eng.ptilde_next(("z0", 0), SeedStream(0))
        assert eng.value(("z0", 0)) == 0


class TestMonteCarlo:
    def test_est_concentrates(self):
        spec = demo()
        tau = ("g1",)
        v = exact_success(spec, "x_in", tau)
        vals = [est(spec, "x_in", tau, seed=s) for s in range(200)]
        assert sum(abs(e - v) > Fraction(1, 8) for e in vals) == 0

    def test_faithful_and_fast_counts_agree(self):
        spec = demo()
        params = EngineParams(p=1, n=1, p_est=2, est_trials=60, ptilde_samples=4, dist_samples=4)
        eng = Engine(spec, "x_in", params=params)
        assert not eng.fast(())
        s = SeedStream(2)
        runs = 60
        total = sum(eng._faithful_count((), s) for _ in range(runs))
        exact = Engine(spec, "x_in", params=EngineParams(p=1, n=1, p_est=2, ptilde_samples=4, mode="exact")).value(())
        lo, hi = chernoff_interval(total, runs * 60, 0.999)
        assert lo <= float(exact) <= hi

    def test_alg7_frequency_matches_exact(self):
        spec = demo()
        small = dict(p=8, n=4, p_est=8, ptilde_samples=2)
        exact = exact_success(spec, "x_in", (), EngineParams(**small, mode="exact"))
        s = SeedStream(8)
        runs = 3000
        hits = sum(alg7_decider(spec, "x_in", params=EngineParams(**small), seed=s.spawn()) for _ in range(runs))
        lo, hi = chernoff_interval(hits, runs, 0.999)
        assert lo <= float(exact) <= hi

    def test_ptilde_prefers_good_opening(self):
        spec = demo()
        picks = [p_tilde_next(spec, "x_in", (), seed=s) for s in range(50)]
        assert set(picks) <= {"g0", "g1"}

    def test_replay(self):
        spec = demo()
        a = [alg7_decider(spec, "x_out", seed=s) for s in range(30)]
        assert a == [alg7_decider(spec, "x_out", seed=s) for s in range(30)]

    def test_engine_cache(self):
        spec = demo()
        assert engine_for(spec, "x_in") is engine_for(spec, "x_in")
        assert prefix_oracle(spec) is prefix_oracle(spec)


class TestClassification:
    def test_planted_round_is_very_good(self):
        spec = build_planted_interactive()
        q = classify_message(spec, "x_in", (), "good")
        assert q.label == "very-good" and q.very_good
        assert q.q_threshold == Fraction(1, 2) and q.margin == Fraction(1, 4)
        assert classify_message(spec, "x_in", (), "weak").label == "good"

    def test_bad_commitment_below(self):
        spec = demo()
        q = classify_message(spec, "x_in", (), "b")
        assert q.label == "below" and not q.okay


class TestDistinguisher:
    def test_planted_fires(self):
        spec = build_planted_interactive()
        eng = engine_for(spec, "x_in")
        s = SeedStream(1)
        tau = eng.honest_prefix(3, s)
        fired = [izk_distinguisher(spec, "x_in", tau, seed=s.spawn()) for _ in range(50)]
        assert all(bit == 1 and first == 1 for bit, _, first in fired)
        assert fired[0][1] == [False, True, True, True]

    def test_sim_rarely_fires(self):
        spec = demo()
        fires = 0
        for j in range(200):
            s = SeedStream(j)
            tau = spec.sim_transcript("x_in", s.randbelow(spec.sim_tapes))
            fires += izk_distinguisher(spec, "x_in", tau, seed=s)[0]
        assert fires / 200 <= 1 / 32 + 0.05

    def test_needs_complete_transcript(self):
        with pytest.raises(ValueError):
            izk_distinguisher(demo(), "x_in", ("g0",))


class TestHybrids:
    def test_reports(self):
        spec = demo()
        r0 = hybrid_transcript(spec, "x_in", 0, 1, seed=0)
        assert r0.hybrid == 0 and r0.variant == 1 and len(r0.r_flags) == spec.k + 1
        r2 = hybrid_transcript(spec, "x_in", 2, 2, seed=0)
        assert r2.transcript2 is not None and r2.verdict2 in (0, 1)
        with pytest.raises(ValueError):
            hybrid_transcript(spec, "x_in", 0, 2)
        with pytest.raises(ValueError):
            hybrid_transcript(spec, "x_out", 1, 1)

    def test_honest_hybrid_accepts(self):
        spec = demo()
        # hybrid k is the honest transcript, and the fixture has perfect completeness
        for seed in range(10):
            r = hybrid_transcript(spec, "x_in", spec.k, 1, seed=seed)
            assert r.verdict == 1 and r.transcript[0] in ("g0", "g1")

    def test_chain_slack(self):
        rows = hybrid_chain(demo(), "x_in", runs=60, seed=2)
        assert [r["i"] for r in rows] == [1, 2, 3]
        for r in rows:
            assert r["split_slack"] >= -2 * r["halfwidth"]
            assert r["swap_slack"] >= -2 * r["halfwidth"]


class TestGap:
    def test_exact_gap(self):
        rep = izk_gap_experiment(demo(), EngineParams(p=8, n=4, p_est=8, mode="exact"))
        assert rep.accept_out == Fraction(1, 4)
        assert rep.extra["gap_ok"] is True

    def test_trivial_profile_no_gap(self):
        spec = demo(3, (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)))
        rep = izk_gap_experiment(spec, EngineParams(p=8, n=4, p_est=8, mode="exact"))
        assert rep.gap == 0 and rep.extra["required_applies"] is False

    def test_perturbed_oracle_shifts_little(self):
        spec = demo()
        params = EngineParams(p=8, n=4, p_est=8, ptilde_samples=2, mode="exact")
        o = perturb_ue(prefix_oracle(spec), Fraction(1, 256))
        base = exact_success(spec, "x_in", (), params)
        shifted = exact_success(spec, "x_in", (), params, oracle=o)
        assert abs(shifted - base) <= 8 * Fraction(1, 256)

    def test_runtime_scales_with_rounds(self):
        tiny = EngineParams(p=1, n=1, p_est=2, est_trials=6, ptilde_samples=4, dist_samples=4)
        times = {}
        for k in (3, 5):
            spec = demo(k)
            eng = Engine(spec, "x_in", params=tiny)
            s = SeedStream(0)
            t = time.perf_counter()
            for _ in range(20):
                eng.alg7(s.spawn())
            times[k] = time.perf_counter() - t
        # nested simulation: each extra prover round multiplies the work by about est_trials * ptilde_samples
        assert times[5] > 2 * times[3]
        assert measure_interactive_errors(demo(5)).as_tuple() == PROFILE
