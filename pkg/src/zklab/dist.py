"""Exact finite distributions, seeded sampling and Chernoff tail bounds."""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable

import numpy as np

Rat = Fraction

_MASK64 = (1 << 64) - 1


class EmptyPreimage(ValueError):
    """Raised when conditioning or inverting on an observation with no support."""


class BudgetExceeded(ValueError):
    """Raised when an enumeration would exceed the configured tape budget."""


def rat(v: Any) -> Fraction:
    """Coerce ints, Fractions and "a/b" strings to Fraction. Floats are refused."""
    if isinstance(v, bool):
        raise TypeError("bool is not a rational")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"not an exact rational: {v!r}")


def rat_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def tape_bits(size: int) -> int:
    """Bits needed to index a tape space of the given size."""
    return max(0, (size - 1).bit_length())


def check_budget(size: int, budget_bits: int, role: str) -> None:
    if size < 1:
        raise ValueError(f"{role}: tape space must be non-empty")
    if tape_bits(size) > budget_bits:
        raise BudgetExceeded(f"{role}: {tape_bits(size)} bits exceeds budget of {budget_bits}")


class ExactDist:
    """Finite distribution with Fraction weights summing to exactly one.

    Zero-weight outcomes are dropped, so the support is the set of outcomes
    with positive mass. Iteration order is insertion order, which keeps
    sampling reproducible.
    """

    __slots__ = ("_w", "_table")

    def __init__(self, weights: dict | Iterable[tuple[Hashable, Any]], *, check: bool = True):
        w: dict = {}
        items = weights.items() if isinstance(weights, dict) else weights
        for o, p in items:
            p = rat(p)
            if p < 0:
                raise ValueError(f"negative weight {p} on {o!r}")
            if o in w:
                raise ValueError(f"duplicate outcome {o!r}")
            if p:
                w[o] = p
        if check and sum(w.values()) != 1:
            raise ValueError(f"weights sum to {sum(w.values())}, not 1")
        self._w = w
        self._table = None

    @classmethod
    def point(cls, o: Hashable) -> ExactDist:
        return cls({o: Fraction(1)})

    @classmethod
    def uniform(cls, outcomes: Iterable[Hashable]) -> ExactDist:
        outs = list(outcomes)
        if not outs:
            raise ValueError("uniform over empty set")
        q = Fraction(1, len(outs))
        return cls([(o, q) for o in outs])

    @classmethod
    def bernoulli(cls, p: Any) -> ExactDist:
        p = rat(p)
        return cls({1: p, 0: 1 - p})

    @classmethod
    def from_counts(cls, counts: dict) -> ExactDist:
        total = sum(counts.values())
        return cls({o: Fraction(c, total) for o, c in counts.items()})

    @property
    def support(self) -> list[tuple[Hashable, Fraction]]:
        return list(self._w.items())

    def outcomes(self) -> list:
        return list(self._w)

    def items(self):
        return self._w.items()

    def prob(self, o: Hashable) -> Fraction:
        return self._w.get(o, Fraction(0))

    __getitem__ = prob

    def __contains__(self, o) -> bool:
        return o in self._w

    def __len__(self) -> int:
        return len(self._w)

    def __iter__(self):
        return iter(self._w)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactDist) and self._w == other._w

    def __hash__(self):
        return hash(frozenset(self._w.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{o!r}: {rat_str(p)}" for o, p in list(self._w.items())[:8])
        more = ", ..." if len(self._w) > 8 else ""
        return f"ExactDist({{{body}{more}}})"

    def map(self, fn: Callable[[Hashable], Hashable]) -> ExactDist:
        """Pushforward through fn."""
        out: dict = {}
        for o, p in self._w.items():
            k = fn(o)
            out[k] = out.get(k, 0) + p
        return ExactDist(out, check=False)

    def marginal(self, i: int) -> ExactDist:
        return self.map(lambda o: o[i])

    def expect(self, fn: Callable[[Hashable], Any]) -> Fraction:
        return sum((p * rat(fn(o)) for o, p in self._w.items()), Fraction(0))

    def mass(self, pred: Callable[[Hashable], bool]) -> Fraction:
        return sum((p for o, p in self._w.items() if pred(o)), Fraction(0))

    def lcm_denominator(self) -> int:
        return math.lcm(*(p.denominator for p in self._w.values()))

    def table(self) -> TapeTable:
        """Integer tape table realizing this distribution exactly."""
        if self._table is None:
            self._table = TapeTable.from_dist(self)
        return self._table


@dataclass(frozen=True)
class TapeTable:
    """Maps a uniform tape r in [0, size) to outcomes with exact frequencies."""

    size: int
    bounds: tuple[int, ...]
    outcomes: tuple

    @classmethod
    def from_dist(cls, d: ExactDist) -> TapeTable:
        size = d.lcm_denominator()
        bounds, acc = [], 0
        for _, p in d.items():
            acc += p.numerator * (size // p.denominator)
            bounds.append(acc)
        return cls(size, tuple(bounds), tuple(d.outcomes()))

    def __call__(self, r: int) -> Hashable:
        if not 0 <= r < self.size:
            raise IndexError(f"tape {r} outside [0, {self.size})")
        return self.outcomes[bisect_right(self.bounds, r)]

    def index(self, r: int) -> int:
        return bisect_right(self.bounds, r)


def tv_distance(d1: ExactDist, d2: ExactDist) -> Fraction:
    keys = set(d1) | set(d2)
    return sum((abs(d1.prob(o) - d2.prob(o)) for o in keys), Fraction(0)) / 2


def condition(d: ExactDist, observed: Hashable) -> ExactDist:
    """Law of the second coordinate given the first equals observed."""
    marg = sum((p for o, p in d.items() if o[0] == observed), Fraction(0))
    if marg == 0:
        raise EmptyPreimage(f"no support with first coordinate {observed!r}")
    out: dict = {}
    for o, p in d.items():
        if o[0] == observed:
            out[o[1]] = out.get(o[1], 0) + p / marg
    return ExactDist(out)


def mix(components: Iterable[tuple[ExactDist, Any]]) -> ExactDist:
    comps = [(d, rat(w)) for d, w in components]
    if any(w < 0 for _, w in comps):
        raise ValueError("negative mixture weight")
    if sum(w for _, w in comps) != 1:
        raise ValueError("mixture weights must sum to 1")
    out: dict = {}
    for d, w in comps:
        for o, p in d.items():
            out[o] = out.get(o, 0) + w * p
    return ExactDist(out)


@dataclass
class SeedStream:
    """Counter-based seed stream: each draw uses the generator for (seed, counter)."""

    seed: int
    counter: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.seed & _MASK64, self.counter])
        self.counter += 1
        return np.random.Generator(np.random.PCG64(ss))

    def randbelow(self, n: int) -> int:
        g = self.generator()
        if n <= 1 << 62:
            return int(g.integers(n))
        return random.Random(int(g.integers(1 << 62))).randrange(n)

    def spawn(self) -> SeedStream:
        state = np.random.SeedSequence([self.seed & _MASK64, self.counter, 0x5EED]).generate_state(2, np.uint32)
        self.counter += 1
        return SeedStream((int(state[0]) << 32) | int(state[1]))


def as_stream(seed: int | SeedStream) -> SeedStream:
    return seed if isinstance(seed, SeedStream) else SeedStream(int(seed))


def sample(d: ExactDist, s: SeedStream) -> Hashable:
    t = d.table()
    return t(s.randbelow(t.size))


def sample_indices(d: ExactDist, s: SeedStream, size: int) -> np.ndarray:
    """Vectorized draws, returned as indices into d.outcomes()."""
    t = d.table()
    g = s.generator()
    if t.size <= 1 << 62:
        u = g.integers(t.size, size=size, dtype=np.int64)
        return np.searchsorted(np.asarray(t.bounds, dtype=np.int64), u, side="right")
    rng = random.Random(int(g.integers(1 << 62)))
    return np.array([t.index(rng.randrange(t.size)) for _ in range(size)], dtype=np.int64)


# ---------------------------------------------------------------- Chernoff

CHERNOFF_KINDS = ("mult-above", "mult-below", "additive")


def chernoff_bound(kind: str, m: int, p: Any, delta: Any) -> float:
    """Tail bounds for a sum of m i.i.d. Bernoulli(p) variables.

    mult-above bounds Pr[X >= (1+delta)mp], mult-below bounds
    Pr[X <= (1-delta)mp], additive bounds Pr[|X - mp| >= delta].
    """
    p, delta = rat(p), rat(delta)
    if m < 1 or not 0 <= p <= 1:
        raise ValueError("need m >= 1 and p in [0, 1]")
    if kind == "mult-above":
        if not 0 < delta < 1:
            raise ValueError("mult-above needs 0 < delta < 1")
        return math.exp(-float(delta * delta * m * p) / 3)
    if kind == "mult-below":
        if not 0 < delta < 1:
            raise ValueError("mult-below needs 0 < delta < 1")
        return math.exp(-float(delta * delta * m * p) / 2)
    if kind == "additive":
        if delta < 0:
            raise ValueError("additive needs Delta >= 0")
        return 2 * math.exp(-float(delta * delta) / m)
    raise ValueError(f"unknown bound kind {kind!r}")


def tail_event(kind: str, m: int, p: Fraction, delta: Fraction) -> Callable[[int], bool]:
    """Predicate on the count X for the event the bound controls."""
    mean = m * p
    if kind == "mult-above":
        return lambda x: x >= (1 + delta) * mean
    if kind == "mult-below":
        return lambda x: x <= (1 - delta) * mean
    if kind == "additive":
        return lambda x: abs(x - mean) >= delta
    raise ValueError(f"unknown bound kind {kind!r}")


def binomial_pmf(m: int, p: Any) -> list[Fraction]:
    p = rat(p)
    if p == 0:
        return [Fraction(1)] + [Fraction(0)] * m
    if p == 1:
        return [Fraction(0)] * m + [Fraction(1)]
    out = [(1 - p) ** m]
    ratio = p / (1 - p)
    for j in range(m):
        out.append(out[-1] * (m - j) / (j + 1) * ratio)
    return out


def binomial_cdf(c: Any, m: int, p: Any) -> Fraction:
    """Exact Pr[Bin(m, p) <= c]."""
    c = rat(c)
    if c < 0:
        return Fraction(0)
    top = min(m, math.floor(c))
    return sum(binomial_pmf(m, p)[: top + 1], Fraction(0))


def exact_tail(kind: str, m: int, p: Any, delta: Any) -> Fraction:
    p, delta = rat(p), rat(delta)
    ev = tail_event(kind, m, p, delta)
    return sum((q for x, q in enumerate(binomial_pmf(m, p)) if ev(x)), Fraction(0))


def chernoff_halfwidth(m: int, confidence: float = 0.99) -> float:
    """Half-width of a frequency interval from the additive bound at the given confidence."""
    return math.sqrt(math.log(2 / (1 - confidence)) / m)


def chernoff_interval(successes: int, m: int, confidence: float = 0.99) -> tuple[float, float]:
    h = chernoff_halfwidth(m, confidence)
    f = successes / m
    return max(0.0, f - h), min(1.0, f + h)


DEFAULT_AUDIT_GRID = (
    ("mult-above", 300, "1/10", "1/2"),
    ("mult-above", 100, "1/2", "1/5"),
    ("mult-above", 1000, "1/20", "1/4"),
    ("mult-above", 50, "3/10", "3/5"),
    ("mult-below", 300, "1/10", "1/2"),
    ("mult-below", 100, "1/2", "1/5"),
    ("mult-below", 1000, "1/20", "1/4"),
    ("mult-below", 64, "1/4", "1/2"),
    ("additive", 100, "1/2", "10"),
    ("additive", 300, "1/10", "15"),
    ("additive", 1000, "1/4", "40"),
    ("additive", 64, "1/8", "8"),
)


def chernoff_audit(grid=DEFAULT_AUDIT_GRID, trials: int = 100_000, seed: int = 0) -> list[dict]:
    """Empirical tail frequency of each grid cell against its bound."""
    rows = []
    s = SeedStream(seed)
    for kind, m, p, delta in grid:
        p, delta = rat(p), rat(delta)
        bound = chernoff_bound(kind, m, p, delta)
        xs = s.generator().binomial(m, float(p), size=trials)
        mean = float(m * p)
        if kind == "mult-above":
            hits = xs >= float((1 + delta) * m * p)
        elif kind == "mult-below":
            hits = xs <= float((1 - delta) * m * p)
        else:
            hits = np.abs(xs - mean) >= float(delta)
        emp = int(hits.sum())
        rows.append({
            "kind": kind, "m": m, "p": p, "delta": delta, "trials": trials,
            "hits": emp, "empirical": emp / trials, "bound": bound,
            "exact_tail": exact_tail(kind, m, p, delta),
            "pass": emp / trials <= bound,
        })
    return rows
