import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from zklab.dist import (
    DEFAULT_AUDIT_GRID,
    BudgetExceeded,
    EmptyPreimage,
    ExactDist,
    SeedStream,
    TapeTable,
    binomial_cdf,
    binomial_pmf,
    chernoff_audit,
    chernoff_bound,
    chernoff_interval,
    check_budget,
    condition,
    exact_tail,
    mix,
    rat,
    sample,
    sample_indices,
    tape_bits,
    tv_distance,
)

weights = st.lists(st.integers(1, 12), min_size=1, max_size=6)


def dist_from(ws, tag=""):
    total = sum(ws)
    return ExactDist({f"{tag}{i}": Fraction(w, total) for i, w in enumerate(ws)})


class TestExactDist:
    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            ExactDist({"a": Fraction(1, 2)})
        with pytest.raises(ValueError):
            ExactDist({"a": Fraction(-1, 2), "b": Fraction(3, 2)})
        with pytest.raises(TypeError):
            rat(0.5)

    def test_zero_weights_dropped(self):
        d = ExactDist({"a": 1, "b": 0})
        assert d.outcomes() == ["a"]
        assert d.prob("b") == 0

    def test_map_merges(self):
        d = ExactDist.uniform(range(6)).map(lambda r: r % 2)
        assert d == ExactDist({0: Fraction(1, 2), 1: Fraction(1, 2)})

    @given(weights)
    def test_table_realizes_law(self, ws):
        d = dist_from(ws)
        t = d.table()
        counts = {}
        for r in range(t.size):
            counts[t(r)] = counts.get(t(r), 0) + 1
        assert ExactDist.from_counts(counts) == d

    def test_table_range(self):
        t = TapeTable.from_dist(ExactDist.bernoulli(Fraction(1, 3)))
        assert t.size == 3
        with pytest.raises(IndexError):
            t(3)


class TestTV:
    @given(weights, weights)
    def test_symmetric_and_bounded(self, a, b):
        d1, d2 = dist_from(a), dist_from(b)
        v = tv_distance(d1, d2)
        assert v == tv_distance(d2, d1)
        assert 0 <= v <= 1

    @given(weights, weights, weights)
    def test_triangle(self, a, b, c):
        d1, d2, d3 = dist_from(a), dist_from(b), dist_from(c)
        assert tv_distance(d1, d3) <= tv_distance(d1, d2) + tv_distance(d2, d3)

    @given(weights)
    def test_identity(self, a):
        assert tv_distance(dist_from(a), dist_from(a)) == 0

    def test_disjoint(self):
        assert tv_distance(ExactDist.point(0), ExactDist.point(1)) == 1

    @given(weights)
    def test_max_event_form(self, a):
        # TV equals the largest event gap, found by brute force over subsets
        d1 = dist_from(a)
        d2 = ExactDist.uniform(d1.outcomes())
        outs = d1.outcomes()
        best = Fraction(0)
        for mask in range(1 << len(outs)):
            ev = [o for i, o in enumerate(outs) if mask >> i & 1]
            best = max(best, sum((d1.prob(o) for o in ev), Fraction(0)) - sum((d2.prob(o) for o in ev), Fraction(0)))
        assert tv_distance(d1, d2) == best

    @given(weights, weights, st.fractions(0, 1))
    def test_mixture_contracts(self, a, b, w):
        d1, d2 = dist_from(a), dist_from(b)
        m = mix([(d1, w), (d2, 1 - w)])
        assert tv_distance(m, d1) == (1 - w) * tv_distance(d1, d2)


class TestCondition:
    def test_condition(self):
        d = ExactDist({(0, "a"): Fraction(1, 4), (0, "b"): Fraction(1, 4), (1, "a"): Fraction(1, 2)})
        assert condition(d, 0) == ExactDist({"a": Fraction(1, 2), "b": Fraction(1, 2)})
        with pytest.raises(EmptyPreimage):
            condition(d, 2)

    def test_mix_weights(self):
        with pytest.raises(ValueError):
            mix([(ExactDist.point(0), Fraction(1, 2))])


class TestSampling:
    def test_replay(self):
        d = ExactDist({"a": Fraction(1, 3), "b": Fraction(2, 3)})
        a = [sample(d, SeedStream(5)) for _ in range(3)]
        b = [sample(d, SeedStream(5)) for _ in range(3)]
        assert a == b
        s1, s2 = SeedStream(9), SeedStream(9)
        assert np.array_equal(sample_indices(d, s1, 50), sample_indices(d, s2, 50))

    def test_spawn_independent_of_later_draws(self):
        s = SeedStream(3)
        child = s.spawn()
        first = child.randbelow(1 << 40)
        s2 = SeedStream(3)
        assert s2.spawn().randbelow(1 << 40) == first

    def test_frequencies(self):
        d = ExactDist({"a": Fraction(1, 8), "b": Fraction(7, 8)})
        idx = sample_indices(d, SeedStream(0), 40_000)
        f = float((idx == 0).mean())
        h = math.sqrt(math.log(2 / 0.001) / 40_000)
        assert abs(f - 1 / 8) < h

    def test_huge_tape_fallback(self):
        d = ExactDist({"a": Fraction(1, 3 ** 50), "b": 1 - Fraction(1, 3 ** 50)})
        assert d.table().size > 1 << 62
        assert set(sample_indices(d, SeedStream(1), 20)) <= {0, 1}


class TestBudget:
    def test_bits(self):
        assert [tape_bits(n) for n in (1, 2, 3, 4, 5, 1024, 1025)] == [0, 1, 2, 2, 3, 10, 11]

    def test_exceeded(self):
        check_budget(1 << 20, 20, "ok")
        with pytest.raises(BudgetExceeded):
            check_budget((1 << 20) + 1, 20, "big")


class TestChernoff:
    @given(st.integers(1, 40), st.fractions(0, 1, max_denominator=20))
    def test_pmf_matches_scipy(self, m, p):
        pmf = binomial_pmf(m, p)
        assert sum(pmf) == 1
        ref = stats.binom.pmf(range(m + 1), m, float(p))
        assert np.allclose([float(q) for q in pmf], ref, atol=1e-12)

    @given(st.integers(1, 40), st.fractions(0, 1, max_denominator=20), st.integers(-2, 45))
    def test_cdf_matches_scipy(self, m, p, c):
        assert math.isclose(float(binomial_cdf(c, m, p)), stats.binom.cdf(c, m, float(p)), abs_tol=1e-12)

    @given(st.sampled_from(["mult-above", "mult-below"]), st.integers(1, 300),
           st.fractions(Fraction(1, 50), Fraction(49, 50), max_denominator=50),
           st.fractions(Fraction(1, 20), Fraction(19, 20), max_denominator=20))
    def test_multiplicative_bounds_dominate(self, kind, m, p, delta):
        assert float(exact_tail(kind, m, p, delta)) <= chernoff_bound(kind, m, p, delta) + 1e-12

    @given(st.integers(1, 300), st.fractions(0, 1, max_denominator=50), st.integers(0, 60))
    def test_additive_bound_dominates(self, m, p, delta):
        assert float(exact_tail("additive", m, p, delta)) <= chernoff_bound("additive", m, p, delta) + 1e-12

    def test_additive_zero_delta(self):
        assert chernoff_bound("additive", 10, Fraction(1, 2), 0) == 2.0

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            chernoff_bound("mult-above", 10, Fraction(1, 2), 1)
        with pytest.raises(ValueError):
            chernoff_bound("nope", 10, Fraction(1, 2), Fraction(1, 2))

    def test_interval(self):
        lo, hi = chernoff_interval(500, 1000)
        h = math.sqrt(math.log(200) / 1000)
        assert math.isclose(hi - 0.5, h) and math.isclose(0.5 - lo, h)
        assert chernoff_interval(0, 10)[0] == 0.0

    def test_audit_grid_passes(self):
        rows = chernoff_audit(trials=5_000, seed=1)
        assert len(rows) == len(DEFAULT_AUDIT_GRID) == 12
        assert all(r["pass"] for r in rows)
        assert all(float(r["exact_tail"]) <= r["bound"] for r in rows)
