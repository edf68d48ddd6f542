"""One-wayness harnesses and the decision-to-inversion packaging.

A FunctionFamily is a keyed map f(x, r) over a finite tape space; an
Inverter answers (x, y) with a candidate tape or None, and may expose its
exact answer law so success probabilities can be enumerated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable

import numpy as np

from .dist import (
    EmptyPreimage,
    ExactDist,
    SeedStream,
    as_stream,
    chernoff_interval,
    check_budget,
    rat,
    sample,
    sample_indices,
    tape_bits,
)
from .extrapolation import SamplerDef, UEOracle
from .nizk_deciders import DeciderParams, alg1_accept_prob, alg1_decider, crs_oracle
from .protocols import NizkSpec


@dataclass(frozen=True, eq=False)
class FunctionFamily:
    name: str
    input_size: int
    fn: Callable[[Any, int], Hashable]
    aux: tuple = ()
    aux_alphabet: str = "binary"
    budget_bits: int = 20

    def __post_init__(self):
        if self.aux_alphabet not in ("unary", "binary"):
            raise ValueError("aux_alphabet must be unary or binary")
        check_budget(self.input_size, self.budget_bits, self.name)
        object.__setattr__(self, "_pre", {})

    @property
    def input_bits(self) -> int:
        return tape_bits(self.input_size)

    def __call__(self, x, r: int) -> Hashable:
        return self.fn(x, r)

    def preimages(self, x) -> dict:
        if x not in self._pre:
            idx: dict = {}
            for r in range(self.input_size):
                idx.setdefault(self.fn(x, r), []).append(r)
            self._pre[x] = {y: tuple(rs) for y, rs in idx.items()}
        return self._pre[x]

    def image_law(self, x) -> ExactDist:
        return ExactDist.from_counts({y: len(rs) for y, rs in self.preimages(x).items()})


def family_from_sampler(s: SamplerDef) -> FunctionFamily:
    return FunctionFamily(f"family[{s.name}]", s.tapes, s.fn, budget_bits=s.budget_bits)


@dataclass(frozen=True, eq=False)
class Inverter:
    """strategy(x, y, stream) -> tape or None; law(x, y) -> exact law of that answer, when known."""

    name: str
    strategy: Callable[[Any, Hashable, SeedStream], int | None]
    law: Callable[[Any, Hashable], ExactDist] | None = None
    input_size: int | None = None

    def __call__(self, x, y, seed: int | SeedStream = 0) -> int | None:
        r = self.strategy(x, y, as_stream(seed))
        if r is not None and self.input_size is not None and not 0 <= r < self.input_size:
            raise ValueError(f"{self.name} returned tape {r} outside [0, {self.input_size})")
        return r


def _law_inverter(name: str, size: int, law: Callable[[Any, Hashable], ExactDist]) -> Inverter:
    return Inverter(name, lambda x, y, s: sample(law(x, y), s), law, size)


def brute_force_inverter(f: FunctionFamily) -> Inverter:
    def law(x, y):
        pre = f.preimages(x).get(y)
        return ExactDist.uniform(pre) if pre else ExactDist.point(None)

    return _law_inverter(f"brute-force[{f.name}]", f.input_size, law)


def random_guess_inverter(f: FunctionFamily) -> Inverter:
    law = ExactDist.uniform(range(f.input_size))
    return _law_inverter(f"random-guess[{f.name}]", f.input_size, lambda x, y: law)


def null_inverter(f: FunctionFamily) -> Inverter:
    return _law_inverter(f"null[{f.name}]", f.input_size, lambda x, y: ExactDist.point(None))


def noisy_inverter(f: FunctionFamily, eta) -> Inverter:
    """Brute force, except a uniform tape with probability eta."""
    eta = rat(eta)
    bf = brute_force_inverter(f)
    uni = ExactDist.uniform(range(f.input_size))

    def law(x, y):
        d = bf.law(x, y)
        if not eta:
            return d
        out: dict = {}
        for o, w in d.items():
            out[o] = out.get(o, 0) + (1 - eta) * w
        for o, w in uni.items():
            out[o] = out.get(o, 0) + eta * w
        return ExactDist(out)

    return _law_inverter(f"noisy({eta})[{f.name}]", f.input_size, law)


def inversion_success(f: FunctionFamily, inv: Inverter, x, mode: str = "exact", runs: int = 10_000,
                      seed: int = 0) -> Fraction:
    """Pr over uniform r (and the inverter's coins) that inv(x, f(x, r)) maps back to f(x, r)."""
    if mode == "exact":
        if inv.law is None:
            raise ValueError(f"{inv.name} exposes no exact law; use mode='mc'")
        total = Fraction(0)
        for y, pre in f.preimages(x).items():
            law = inv.law(x, y)
            hit = law.mass(lambda c: c is not None and f(x, c) == y)
            total += Fraction(len(pre), f.input_size) * hit
        return total
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    s = SeedStream(seed)
    hits = 0
    for _ in range(runs):
        y = f(x, s.randbelow(f.input_size))
        c = inv(x, y, s)
        hits += c is not None and f(x, c) == y
    return Fraction(hits, runs)


# ------------------------------------------------------------ g-construction


def g_construction(d_sampler: SamplerDef, f: FunctionFamily, aux=(None,)) -> FunctionFamily:
    """g(a, r1 || r2) = (D(a; r1), f(D(a; r1), r2)) with r = r1 * |f-tapes| + r2."""
    n2 = f.input_size
    if f.aux:
        allowed = set(f.aux)
        for a in aux:
            for y in d_sampler.law(a).outcomes():
                if y not in allowed:
                    raise ValueError(f"sampler output {y!r} is outside the family's instance alphabet")

    def fn(a, r):
        xs = d_sampler(a, r // n2)
        return (xs, f(xs, r % n2))

    return FunctionFamily(f"g[{d_sampler.name},{f.name}]", d_sampler.tapes * n2, fn, tuple(aux),
                          budget_bits=d_sampler.budget_bits + f.budget_bits)


def lift_inverter(d_sampler: SamplerDef, f: FunctionFamily, inv: Inverter) -> Inverter:
    """Inverter for g from one for f: invert the f-part, pick a uniform r1 consistent with the D-part."""
    n2 = f.input_size
    pre_cache: dict = {}

    def d_pre(x, xs):
        if x not in pre_cache:
            idx: dict = {}
            for r1 in range(d_sampler.tapes):
                idx.setdefault(d_sampler(x, r1), []).append(r1)
            pre_cache[x] = idx
        return pre_cache[x].get(xs, [])

    def law(x, y):
        xs, fy = y
        r1s = d_pre(x, xs)
        inner = inv.law(xs, fy)
        if not r1s:
            return ExactDist.point(None)
        out: dict = {}
        for c, w in inner.items():
            if c is None:
                out[None] = out.get(None, 0) + w
                continue
            for r1 in r1s:
                out[r1 * n2 + c] = out.get(r1 * n2 + c, 0) + w / len(r1s)
        return ExactDist(out)

    name, size = f"lift[{inv.name}]", d_sampler.tapes * n2
    if inv.law is None:
        return Inverter(name, _lift_strategy(d_pre, n2, inv), None, size)
    return _law_inverter(name, size, law)


def _lift_strategy(d_pre, n2, inv):
    def strategy(x, y, s):
        xs, fy = y
        r1s = d_pre(x, xs)
        c = inv(xs, fy, s)
        if c is None or not r1s:
            return None
        return r1s[s.randbelow(len(r1s))] * n2 + c

    return strategy


# ------------------------------------------------------------ algorithm B


def algorithm_B(x, f: FunctionFamily, inv: Inverter, reduction: Callable[[Any, Inverter, SeedStream], int],
                seed: int | SeedStream = 0) -> int | None:
    """Invert f(x, r2) for a fresh r2; None on failure, else the reduction's verdict."""
    s = as_stream(seed)
    y = f(x, s.randbelow(f.input_size))
    c = inv(x, y, s)
    if c is None or f(x, c) != y:
        return None
    return int(reduction(x, inv, s))


def algorithm_B_law(x, f: FunctionFamily, inv: Inverter, reduction_accept) -> ExactDist:
    """Exact output law given the reduction's exact acceptance probability."""
    ok = inversion_success(f, inv, x)
    acc = rat(reduction_accept)
    return ExactDist({None: 1 - ok, 1: ok * acc, 0: ok * (1 - acc)})


# ------------------------------------------------------------ packaging


class InverterOracle(UEOracle):
    """UE oracle for a sampler whose answers come from an inverter of the sampler's family."""

    def __init__(self, base: SamplerDef, inv: Inverter):
        if inv.law is None:
            raise ValueError("inverter-backed oracles need an inverter with an exact law")
        super().__init__(base)
        self.inverter = inv

    @property
    def mode(self) -> str:
        return "inverter"

    def describe(self) -> dict:
        return {"sampler": self.base.name, "mode": "inverter", "inverter": self.inverter.name}

    def law(self, x, y) -> ExactDist:
        key = (x, y)
        if key not in self._laws:
            self._laws[key] = self.inverter.law(x, y)
        return self._laws[key]

    def draw_many(self, x, y, stream: SeedStream, size: int) -> np.ndarray:
        d = self.law(x, y)
        outs = np.array([-1 if o is None else o for o in d.outcomes()], dtype=np.int64)
        return outs[sample_indices(d, stream, size)]


def oracle_from_inverter(s: SamplerDef, inv: Inverter) -> InverterOracle:
    return InverterOracle(s, inv)


def amplification_count(p) -> int:
    """Independent runs so the vote errs w.p. at most 1/p at gap 1/p: ceil(8 p^2 ln p)."""
    p = rat(p)
    return max(1, math.ceil(8 * float(p) ** 2 * math.log(float(p))))


def _binom_upper_tail(m: int, q: float, c: int) -> float:
    """Pr[Bin(m, q) > c] in floating point."""
    if q <= 0:
        return 0.0
    if q >= 1:
        return 1.0 if c < m else 0.0
    lq, l1q = math.log(q), math.log1p(-q)
    total = 0.0
    for j in range(c + 1, m + 1):
        total += math.exp(math.lgamma(m + 1) - math.lgamma(j + 1) - math.lgamma(m - j + 1) + j * lq + (m - j) * l1q)
    return min(1.0, total)


@dataclass
class DTIRecord:
    """Amplified decider with an oracle slot, plus its per-size gap table."""

    decider_id: str
    p: Fraction
    amplification: int
    threshold: Fraction
    sizes: list[dict] = field(default_factory=list)
    notes: str = ""

    def vote_correctness(self, accept_in, accept_out) -> tuple[float, float]:
        """(Pr[vote says yes on x_in], Pr[vote says no on x_out]) for the given per-run probabilities."""
        c = math.floor(self.amplification * self.threshold)
        yes = _binom_upper_tail(self.amplification, float(accept_in), c)
        no = 1 - _binom_upper_tail(self.amplification, float(accept_out), c)
        return yes, no

    def as_dict(self) -> dict:
        return {"decider": self.decider_id, "p": self.p, "amplification": self.amplification,
                "threshold": self.threshold, "sizes": self.sizes, "notes": self.notes}


def package_dti(spec: NizkSpec, p=8, n_grid=(1, 2, 4), oracle: UEOracle | None = None,
                x_in: str = "x_in", x_out: str = "x_out", eps_s=None, threshold=None) -> DTIRecord:
    """Package Algorithm 1 as a decision-to-inversion reduction.

    The vote threshold defaults to (a short rational near) the midpoint of the
    exact-oracle acceptance probabilities at the first size, so the per-run
    gap is split evenly.
    Each row evaluates the supplied oracle (default: exact) at one size n.
    """
    p = rat(p)
    base = crs_oracle(spec)
    oracle = oracle or base
    m = amplification_count(p)
    rows = []
    thr = None if threshold is None else rat(threshold)
    for n in n_grid:
        params = DeciderParams(p=p, n=n, eps_s=eps_s)
        a0 = alg1_accept_prob(spec, base, x_in, params)
        b0 = alg1_accept_prob(spec, base, x_out, params)
        if thr is None:
            mid = (a0 + b0) / 2
            thr = mid.limit_denominator(1024)
            if not b0 < thr < a0:
                thr = mid
        a = alg1_accept_prob(spec, oracle, x_in, params)
        b = alg1_accept_prob(spec, oracle, x_out, params)
        rows.append({"n": n, "T": params.T, "accept_in": a, "accept_out": b, "gap": a - b,
                     "exact_gap": a0 - b0, "gap_shift": abs((a - b) - (a0 - b0))})
    rec = DTIRecord("alg1", p, m, thr, rows, "vote: accept iff more than threshold * amplification runs accept")
    for row in rec.sizes:
        yes, no = rec.vote_correctness(row["accept_in"], row["accept_out"])
        row["vote_in"], row["vote_out"] = yes, no
        row["holds"] = min(yes, no) >= 1 - 1 / float(p)
    return rec


def amplified_decider(rec: DTIRecord, spec: NizkSpec, oracle: UEOracle, x: str, n: int,
                      seed: int | SeedStream = 0, eps_s=None) -> int:
    """One seeded run of the packaged reduction: vote over rec.amplification Algorithm 1 runs."""
    s = as_stream(seed)
    params = DeciderParams(p=rec.p, n=n, eps_s=eps_s)
    hits = sum(alg1_decider(spec, oracle, x, params, s.spawn()) for _ in range(rec.amplification))
    return int(hits > rec.amplification * rec.threshold)


def vote_frequency(rec: DTIRecord, spec: NizkSpec, oracle: UEOracle, x: str, n: int, runs: int,
                   seed: int = 0, eps_s=None) -> tuple[Fraction, tuple[float, float]]:
    s = SeedStream(seed)
    hits = sum(amplified_decider(rec, spec, oracle, x, n, s.spawn(), eps_s) for _ in range(runs))
    return Fraction(hits, runs), chernoff_interval(hits, runs)


# ------------------------------------------------------------ fixtures


def standard_families() -> list[tuple[FunctionFamily, tuple]]:
    """Small families with their instance lists: injective, 2-to-1, constant and protocol samplers."""
    from fractions import Fraction as F

    from .extrapolation import nizk_crs_sampler, prefix_sampler
    from .protocols import build_counterexample, build_demo_interactive

    ce = build_counterexample(F(1, 2), F(1, 4), F(1, 8))
    demo = build_demo_interactive(3, (0, F(1, 4), F(1, 2)))
    return [
        (FunctionFamily("affine", 16, lambda x, r: (5 * r + x) % 16), (0, 1, 3)),
        (FunctionFamily("drop-low-bit", 16, lambda x, r: (r ^ x) >> 1), (0, 5)),
        (FunctionFamily("constant", 8, lambda x, r: 0), (0,)),
        (family_from_sampler(nizk_crs_sampler(ce)), ("x_in", "x_out")),
        (family_from_sampler(prefix_sampler(demo)), ("x_in", "x_out")),
    ]
