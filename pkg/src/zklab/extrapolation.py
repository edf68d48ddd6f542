"""Samplers and universal-extrapolation oracles realized by enumeration.

An oracle answers a query (x, y) with a tape r such that the sampler maps
(x, r) to y. The exact oracle draws uniformly from the preimage; the
perturbed oracle instead returns a uniform tape with probability eta per
query. Conditional laws are exposed exactly, with None standing for a
failed query (empty preimage).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Hashable

import numpy as np

from .dist import (
    EmptyPreimage,
    ExactDist,
    SeedStream,
    as_stream,
    check_budget,
    mix,
    rat,
    tape_bits,
)
from .protocols import InteractiveSpec, NizkSpec


@dataclass(frozen=True, eq=False)
class SamplerDef:
    tapes: int
    fn: Callable[[Any, int], Hashable]
    name: str = "sampler"
    budget_bits: int = 20

    def __post_init__(self):
        check_budget(self.tapes, self.budget_bits, self.name)

    @property
    def input_bits(self) -> int:
        return tape_bits(self.tapes)

    def __call__(self, x, r: int) -> Hashable:
        return self.fn(x, r)

    def law(self, x) -> ExactDist:
        counts: dict = {}
        for r in range(self.tapes):
            y = self.fn(x, r)
            counts[y] = counts.get(y, 0) + 1
        return ExactDist.from_counts(counts)


class UEOracle:
    """Conditional reverse sampler for a declared sampler."""

    def __init__(self, base: SamplerDef, eta=0, seed: int | None = None):
        eta = rat(eta)
        if not 0 <= eta < 1:
            raise ValueError("eta must lie in [0, 1)")
        self.base = base
        self.eta = eta
        self.seed = seed
        self._index: dict = {}
        self._laws: dict = {}
        self.memo: dict = {}

    @property
    def mode(self) -> str:
        return "exact" if self.eta == 0 else "perturbed"

    def describe(self) -> dict:
        return {"sampler": self.base.name, "mode": self.mode, "eta": self.eta, "seed": self.seed}

    def preimages(self, x) -> dict:
        """observation -> tuple of tapes, built once per instance."""
        if x not in self._index:
            idx: dict = {}
            for r in range(self.base.tapes):
                idx.setdefault(self.base.fn(x, r), []).append(r)
            self._index[x] = {y: tuple(rs) for y, rs in idx.items()}
        return self._index[x]

    def law(self, x, y) -> ExactDist:
        """Exact law of the answer to (x, y); None marks a failed query."""
        key = (x, y)
        if key not in self._laws:
            pre = self.preimages(x).get(y)
            exact = ExactDist.uniform(pre) if pre else ExactDist.point(None)
            if self.eta:
                exact = mix([(exact, 1 - self.eta), (ExactDist.uniform(range(self.base.tapes)), self.eta)])
            self._laws[key] = exact
        return self._laws[key]

    def draw_many(self, x, y, stream: SeedStream, size: int) -> np.ndarray:
        """size independent answers; -1 marks a failed query."""
        pre = self.preimages(x).get(y, ())
        g = stream.generator()
        if pre:
            out = np.asarray(pre, dtype=np.int64)[g.integers(len(pre), size=size)]
        else:
            out = np.full(size, -1, dtype=np.int64)
        if self.eta:
            noisy = g.integers(self.eta.denominator, size=size) < self.eta.numerator
            out = np.where(noisy, g.integers(self.base.tapes, size=size), out)
        return out

    def draw(self, x, y, stream: SeedStream) -> int | None:
        r = int(self.draw_many(x, y, stream, 1)[0])
        return None if r < 0 else r

    def query(self, x, y, seed: int | SeedStream) -> int:
        """One answer; a failed query raises EmptyPreimage."""
        r = self.draw(x, y, as_stream(seed))
        if r is None:
            raise EmptyPreimage(f"{self.base.name}: no tape maps to {y!r}")
        return r


def make_exact_ue(s: SamplerDef) -> UEOracle:
    return UEOracle(s)


def perturb_ue(o: UEOracle, eta, seed: int | None = None) -> UEOracle:
    """Replace each answer by a uniform tape with probability eta (composes with o's own eta)."""
    eta = rat(eta)
    if not 0 <= eta < 1:
        raise ValueError("eta must lie in [0, 1)")
    combined = 1 - (1 - o.eta) * (1 - eta)
    return UEOracle(o.base, combined, seed if seed is not None else o.seed)


def ue_quality(o: UEOracle, x) -> Fraction:
    """Exact TV between (r, M(x;r)) and (N(x, M(x;r)), M(x;r))."""
    n = o.base.tapes
    total = Fraction(0)
    for y, pre in o.preimages(x).items():
        d = o.law(x, y)
        own = Fraction(1, n)
        weight_y = Fraction(len(pre), n)
        pre_set = set(pre)
        for r, q in d.items():
            mass2 = weight_y * q
            mass1 = own if r in pre_set else Fraction(0)
            total += abs(mass1 - mass2)
        for r in pre:
            if r not in d:
                total += own
    return total / 2


def nizk_crs_sampler(spec: NizkSpec) -> SamplerDef:
    """Observation is the crs component of Sim(x; r)."""
    return SamplerDef(spec.sim_tapes, lambda x, r: spec.simulate(x, r)[0], f"crs-sampler[{spec.name}]",
                      spec.budget_bits)


def prefix_sampler(spec: InteractiveSpec) -> SamplerDef:
    """Tape r encodes (r1, r2) with r1 = r // S + 1 in [k]; observation is Sim(x; r2)[:r1 - 1]."""
    s = spec.sim_tapes

    def fn(x, r):
        return spec.sim_transcript(x, r % s)[: r // s]

    return SamplerDef(spec.k * s, fn, f"prefix-sampler[{spec.name}]", spec.budget_bits + spec.k.bit_length())


def split_prefix_tape(spec: InteractiveSpec, r: int) -> tuple[int, int]:
    return r // spec.sim_tapes + 1, r % spec.sim_tapes
