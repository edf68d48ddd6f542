"""NIZK tuples and public-coin interactive protocols over enumerable tapes.

Tapes are integers drawn uniformly from [0, size). Sizes need not be powers
of two; the enumeration budget is checked against the bit length of the
size. Instances are referred to by their string label.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Hashable

from .dist import (
    ExactDist,
    check_budget,
    rat,
    tape_bits,
    tv_distance,
)

Token = Hashable


@dataclass(frozen=True)
class Instance:
    label: str
    in_language: bool
    witness: Any = None


@dataclass(frozen=True)
class ErrorProfile:
    eps_c: Fraction
    eps_s: Fraction
    eps_zk: Fraction
    mode: str = "exact"
    notes: str = ""

    def __post_init__(self):
        for name in ("eps_c", "eps_s", "eps_zk"):
            v = rat(getattr(self, name))
            if not 0 <= v <= 1:
                raise ValueError(f"{name}={v} outside [0, 1]")
            object.__setattr__(self, name, v)

    @property
    def total(self) -> Fraction:
        return self.eps_c + self.eps_s + self.eps_zk

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return self.eps_c, self.eps_s, self.eps_zk


def _instances(instances) -> tuple[Instance, ...]:
    out = tuple(instances)
    labels = [i.label for i in out]
    if len(set(labels)) != len(labels):
        raise ValueError("instance labels must be distinct")
    return out


class _InstanceLookup:
    instances: tuple[Instance, ...]

    def instance(self, x: str) -> Instance:
        for inst in self.instances:
            if inst.label == x:
                return inst
        raise KeyError(f"unknown instance {x!r}")

    def in_language(self, x: str) -> bool:
        return self.instance(x).in_language

    def yes_instances(self) -> list[Instance]:
        return [i for i in self.instances if i.in_language]

    def no_instances(self) -> list[Instance]:
        return [i for i in self.instances if not i.in_language]


# ------------------------------------------------------------------ NIZK


@dataclass(eq=False)
class NizkSpec(_InstanceLookup):
    """(Gen, P, V, Sim) as maps over integer tapes.

    verify takes a verifier tape as its last argument; deterministic
    verifiers declare verifier_tapes = 1 and ignore it.
    """

    name: str
    instances: tuple[Instance, ...]
    gen_tapes: int
    prover_tapes: int
    sim_tapes: int
    gen: Callable[[int], Token]
    prove: Callable[[Token, str, Any, int], Token]
    verify: Callable[[Token, str, Token, int], bool]
    simulate: Callable[[str, int], tuple[Token, Token]]
    proofs: tuple = ()
    verifier_tapes: int = 1
    budget_bits: int = 20
    meta: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.instances = _instances(self.instances)
        for role, size in (("gen", self.gen_tapes), ("prover", self.prover_tapes),
                           ("sim", self.sim_tapes), ("verifier", self.verifier_tapes)):
            check_budget(size, self.budget_bits, f"{self.name}/{role}")
        if not self.proofs:
            seen: dict = {}
            for inst in self.instances:
                for r in range(self.sim_tapes):
                    seen.setdefault(self.simulate(inst.label, r)[1], None)
                if inst.in_language:
                    for crs in self.gen_law():
                        for r in range(self.prover_tapes):
                            seen.setdefault(self.prove(crs, inst.label, inst.witness, r), None)
            self.proofs = tuple(seen)

    @property
    def deterministic_verifier(self) -> bool:
        return self.verifier_tapes == 1

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def gen_law(self) -> ExactDist:
        return self._memo("gen", lambda: ExactDist.from_counts(_count(self.gen(r) for r in range(self.gen_tapes))))

    def sim_law(self, x: str) -> ExactDist:
        return self._memo(("sim", x), lambda: ExactDist.from_counts(
            _count(self.simulate(x, r) for r in range(self.sim_tapes))))

    def sim_crs_law(self, x: str) -> ExactDist:
        return self._memo(("simcrs", x), lambda: self.sim_law(x).marginal(0))

    def real_law(self, x: str) -> ExactDist:
        inst = self.instance(x)
        if not inst.in_language:
            raise ValueError(f"{x} has no witness")

        def build():
            out: dict = {}
            w = Fraction(1, self.prover_tapes)
            for crs, pc in self.gen_law().items():
                for r in range(self.prover_tapes):
                    k = (crs, self.prove(crs, x, inst.witness, r))
                    out[k] = out.get(k, 0) + pc * w
            return ExactDist(out)

        return self._memo(("real", x), build)

    def accept_prob(self, crs: Token, x: str, proof: Token) -> Fraction:
        key = ("acc", crs, x, proof)
        if key not in self._cache:
            hits = sum(1 for v in range(self.verifier_tapes) if self.verify(crs, x, proof, v))
            self._cache[key] = Fraction(hits, self.verifier_tapes)
        return self._cache[key]

    def crs_support(self) -> list:
        seen = dict.fromkeys(self.gen_law().outcomes())
        for inst in self.instances:
            seen.update(dict.fromkeys(self.sim_crs_law(inst.label).outcomes()))
        return list(seen)


def _count(it) -> dict:
    out: dict = {}
    for o in it:
        out[o] = out.get(o, 0) + 1
    return out


def default_instances(witness: str = "w") -> tuple[Instance, ...]:
    return (Instance("x_in", True, witness), Instance("x_out", False))


def build_trivial_protocol(eps_c, eps_s, eps_zk) -> NizkSpec:
    """Mixture protocol: the CRS picks always-reject, always-accept or witness-in-clear."""
    eps_c, eps_s, eps_zk = rat(eps_c), rat(eps_s), rat(eps_zk)
    if min(eps_c, eps_s, eps_zk) < 0 or eps_c + eps_s + eps_zk != 1:
        raise ValueError("trivial protocol needs non-negative errors summing to 1")
    instances = default_instances()
    gen_t = ExactDist({"reject": eps_c, "accept": eps_s, "clear": eps_zk}).table()
    sim_t = ExactDist({"reject": eps_c, "accept": eps_s + eps_zk}).table()
    witnesses = {i.label: i.witness for i in instances if i.in_language}

    def prove(crs, x, w, r):
        return w if crs == "clear" else "-"

    def verify(crs, x, proof, v):
        if crs == "accept":
            return True
        if crs == "clear":
            return x in witnesses and proof == witnesses[x]
        return False

    return NizkSpec(
        name=f"trivial({eps_c},{eps_s},{eps_zk})",
        instances=instances,
        gen_tapes=gen_t.size,
        prover_tapes=1,
        sim_tapes=sim_t.size,
        gen=gen_t,
        prove=prove,
        verify=verify,
        simulate=lambda x, r: (sim_t(r), "-"),
        proofs=("-", "w"),
        meta={"kind": "trivial", "targets": (eps_c, eps_s, eps_zk)},
    )


def build_counterexample(eps_zk, eps_s, delta=0, sound_variant: str = "derandomized") -> NizkSpec:
    """The two-bit CRS protocol whose OW-style decider has no gap.

    Gen outputs crs 0 with probability 1 - eps_zk and 1 otherwise; the honest
    proof repeats the crs. On yes-instances Sim outputs (0,0), (0,1), (1,0)
    with weights 1 - eps_zk, eps_zk - delta, delta. delta = 0 gives the bare
    construction in which Sim never outputs crs 1. On no-instances Sim mirrors
    Gen, since zero knowledge places no constraint there.

    The derandomized variant widens the crs with a uniform index u in
    [0, den(eps_s)) and accepts no-instances iff u falls in the first
    eps_s fraction. The randomized variant flips the verifier's own coin.
    """
    eps_zk, eps_s, delta = rat(eps_zk), rat(eps_s), rat(delta)
    if not (0 < eps_zk < 1 and 0 < eps_s < 1 and 0 <= delta < eps_zk):
        raise ValueError("need 0 < eps_zk, eps_s < 1 and 0 <= delta < eps_zk")
    if sound_variant not in ("derandomized", "randomized"):
        raise ValueError(f"unknown sound_variant {sound_variant!r}")
    instances = default_instances()
    yes = {i.label for i in instances if i.in_language}
    gen_bit = ExactDist({0: 1 - eps_zk, 1: eps_zk}).table()
    sim_pair = ExactDist({(0, 0): 1 - eps_zk, (0, 1): eps_zk - delta, (1, 0): delta}).table()
    width = eps_s.denominator
    cut = eps_s.numerator

    if sound_variant == "derandomized":
        def gen(r):
            return (gen_bit(r // width), r % width)

        def simulate(x, r):
            u, rb = r % width, r // width
            if x in yes:
                b, pi = sim_pair(rb % sim_pair.size)
            else:
                b = pi = gen_bit(rb % gen_bit.size)
            return (b, u), pi

        def verify(crs, x, proof, v):
            b, u = crs
            return proof == b if x in yes else u < cut

        gen_tapes, sim_tapes, v_tapes = gen_bit.size * width, _lcm(sim_pair.size, gen_bit.size) * width, 1
    else:
        def gen(r):
            return gen_bit(r)

        def simulate(x, r):
            if x in yes:
                return sim_pair(r % sim_pair.size)
            b = gen_bit(r % gen_bit.size)
            return b, b

        def verify(crs, x, proof, v):
            return proof == crs if x in yes else v < cut

        gen_tapes, sim_tapes, v_tapes = gen_bit.size, _lcm(sim_pair.size, gen_bit.size), width

    def prove(crs, x, w, r):
        return crs[0] if isinstance(crs, tuple) else crs

    return NizkSpec(
        name=f"counterexample({eps_zk},{eps_s},{delta},{sound_variant})",
        instances=instances,
        gen_tapes=gen_tapes,
        prover_tapes=1,
        sim_tapes=sim_tapes,
        gen=gen,
        prove=prove,
        verify=verify,
        simulate=simulate,
        proofs=(0, 1),
        verifier_tapes=v_tapes,
        meta={"kind": "counterexample", "eps_zk": eps_zk, "eps_s": eps_s, "delta": delta,
              "sound_variant": sound_variant},
    )


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def build_ideal_nizk(crs_count: int = 4) -> NizkSpec:
    """Errors (0, 0, 0): proof echoes a uniform crs; no-instances always rejected."""
    instances = default_instances()
    yes = {i.label for i in instances if i.in_language}
    return NizkSpec(
        name=f"ideal({crs_count})",
        instances=instances,
        gen_tapes=crs_count,
        prover_tapes=1,
        sim_tapes=crs_count,
        gen=lambda r: r,
        prove=lambda crs, x, w, r: crs,
        verify=lambda crs, x, proof, v: x in yes and proof == crs,
        simulate=lambda x, r: (r, r),
        proofs=tuple(range(crs_count)),
        meta={"kind": "ideal"},
    )


def table_nizk(name, instances, gen_law: ExactDist, sim_laws: dict, prover_laws: dict,
               accept: dict, proofs, verifier_tapes: int = 1, budget_bits: int = 20) -> NizkSpec:
    """NIZK spec from explicit laws.

    sim_laws maps instance label -> ExactDist over (crs, proof);
    prover_laws maps (crs, label) -> ExactDist over proofs;
    accept maps (crs, label, proof) -> number of accepting verifier tapes
    (or a bool when verifier_tapes is 1). Missing entries reject.
    """
    gen_t = gen_law.table()
    sim_t = {x: d.table() for x, d in sim_laws.items()}
    sim_size = math.lcm(*(t.size for t in sim_t.values()))
    prover_t = {k: d.table() for k, d in prover_laws.items()}
    prover_size = math.lcm(*(t.size for t in prover_t.values())) if prover_t else 1

    def verify(crs, x, proof, v):
        hits = accept.get((crs, x, proof), 0)
        return v < int(hits)

    return NizkSpec(
        name=name,
        instances=tuple(instances),
        gen_tapes=gen_t.size,
        prover_tapes=prover_size,
        sim_tapes=sim_size,
        gen=gen_t,
        prove=lambda crs, x, w, r: prover_t[(crs, x)](r % prover_t[(crs, x)].size),
        verify=verify,
        simulate=lambda x, r: sim_t[x](r % sim_t[x].size),
        proofs=tuple(proofs),
        verifier_tapes=verifier_tapes,
        budget_bits=budget_bits,
        meta={"kind": "table"},
    )


def measure_nizk_errors(spec: NizkSpec, adaptive: bool = False) -> ErrorProfile:
    """Exact error profile against the unbounded prover and the optimal distinguisher.

    adaptive=True lets the cheating prover pick the no-instance after seeing the crs.
    """
    gen = spec.gen_law()
    eps_c = Fraction(0)
    eps_zk = Fraction(0)
    for inst in spec.yes_instances():
        real = spec.real_law(inst.label)
        acc = real.expect(lambda cp: spec.accept_prob(cp[0], inst.label, cp[1]))
        eps_c = max(eps_c, 1 - acc)
        eps_zk = max(eps_zk, tv_distance(real, spec.sim_law(inst.label)))
    no = spec.no_instances()

    def best(crs, x):
        return max((spec.accept_prob(crs, x, pi) for pi in spec.proofs), default=Fraction(0))

    if not no:
        eps_s = Fraction(0)
    elif adaptive:
        eps_s = gen.expect(lambda crs: max(best(crs, i.label) for i in no))
    else:
        eps_s = max(gen.expect(lambda crs: best(crs, i.label)) for i in no)
    notes = "soundness vs unbounded prover; zero-knowledge as exact TV"
    if adaptive:
        notes += "; adaptive soundness"
    return ErrorProfile(eps_c, eps_s, eps_zk, "exact", notes)


# ----------------------------------------------------------- interactive


@dataclass(frozen=True)
class Transcript:
    """Messages with their round index and sender tag."""

    messages: tuple
    owners: tuple

    def __post_init__(self):
        if len(self.messages) > len(self.owners):
            raise ValueError("transcript longer than the protocol")

    def entries(self) -> list[tuple[int, str, Token]]:
        return [(i + 1, self.owners[i], m) for i, m in enumerate(self.messages)]

    def prefix(self, i: int) -> Transcript:
        return Transcript(self.messages[:i], self.owners)

    @property
    def complete(self) -> bool:
        return len(self.messages) == len(self.owners)

    def __len__(self) -> int:
        return len(self.messages)


def as_messages(tau) -> tuple:
    return tau.messages if isinstance(tau, Transcript) else tuple(tau)


@dataclass(eq=False)
class InteractiveSpec(_InstanceLookup):
    """k-round public-coin protocol.

    owners[i] is "P" or "V" for round i+1. Verifier messages are fresh
    uniform integers in [0, verifier_sizes[i]). accept returns a bool, or an
    exact acceptance probability when the verdict still depends on coins the
    transcript does not show (only produced by the coin transform).
    """

    name: str
    instances: tuple[Instance, ...]
    owners: tuple[str, ...]
    verifier_sizes: tuple[int, ...]
    prover_alphabet: tuple
    prover_tapes: int
    sim_tapes: int
    prove: Callable[[str, Any, tuple, int], Token]
    accept: Callable[[str, tuple], Any]
    simulate: Callable[[str, int], tuple]
    budget_bits: int = 20
    meta: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.instances = _instances(self.instances)
        self.owners = tuple(self.owners)
        if any(o not in ("P", "V") for o in self.owners):
            raise ValueError("owners must be P or V")
        if any(a == b for a, b in zip(self.owners, self.owners[1:])):
            raise ValueError("round owners must alternate")
        sizes = tuple(self.verifier_sizes)
        if len(sizes) == 1 and self.owners.count("V") != 1:
            sizes = sizes * self.owners.count("V")
        if len(sizes) != self.owners.count("V"):
            raise ValueError("one verifier size per verifier round")
        it = iter(sizes)
        self.verifier_sizes = tuple(next(it) if o == "V" else 0 for o in self.owners)
        for i, o in enumerate(self.owners):
            if o == "V":
                check_budget(self.verifier_sizes[i], self.budget_bits, f"{self.name}/round {i + 1}")
        check_budget(self.prover_tapes, self.budget_bits, f"{self.name}/prover")
        check_budget(self.sim_tapes, self.budget_bits, f"{self.name}/sim")
        self.prover_alphabet = tuple(self.prover_alphabet)

    @property
    def k(self) -> int:
        return len(self.owners)

    @property
    def verifier_bits(self) -> int:
        return max((tape_bits(s) for s in self.verifier_sizes if s), default=0)

    def prover_rounds(self) -> list[int]:
        return [i + 1 for i, o in enumerate(self.owners) if o == "P"]

    def next_owner(self, tau) -> str:
        tau = as_messages(tau)
        if len(tau) >= self.k:
            raise ValueError("transcript already complete")
        return self.owners[len(tau)]

    def transcript(self, tau) -> Transcript:
        return Transcript(as_messages(tau), self.owners)

    def accept_prob(self, x: str, tau) -> Fraction:
        tau = as_messages(tau)
        key = ("acc", x, tau)
        if key not in self._cache:
            self._cache[key] = rat(int(v) if isinstance(v := self.accept(x, tau), bool) else v)
        return self._cache[key]

    @property
    def deterministic_accept(self) -> bool:
        return self.meta.get("deterministic_accept", True)

    def sim_transcript(self, x: str, r: int) -> tuple:
        key = ("simt", x, r)
        c = self._cache
        if key not in c:
            c[key] = tuple(self.simulate(x, r))
        return c[key]

    def sim_law(self, x: str) -> ExactDist:
        key = ("sim", x)
        if key not in self._cache:
            self._cache[key] = ExactDist.from_counts(_count(self.sim_transcript(x, r) for r in range(self.sim_tapes)))
        return self._cache[key]

    def honest_law(self, x: str) -> ExactDist:
        inst = self.instance(x)
        if not inst.in_language:
            raise ValueError(f"{x} has no witness")
        key = ("honest", x)
        if key in self._cache:
            return self._cache[key]
        out: dict = {}
        w0 = Fraction(1, self.prover_tapes)
        for r in range(self.prover_tapes):
            frontier = [((), w0)]
            for i, owner in enumerate(self.owners):
                nxt = []
                for tau, w in frontier:
                    if owner == "V":
                        q = w / self.verifier_sizes[i]
                        nxt.extend((tau + (c,), q) for c in range(self.verifier_sizes[i]))
                    else:
                        nxt.append((tau + (self.prove(x, inst.witness, tau, r),), w))
                frontier = nxt
            for tau, w in frontier:
                out[tau] = out.get(tau, 0) + w
        self._cache[key] = ExactDist(out)
        return self._cache[key]

    def game_tree_size(self) -> int:
        n = 1
        for i, o in enumerate(self.owners):
            n *= len(self.prover_alphabet) if o == "P" else self.verifier_sizes[i]
        return n

    def game_value(self, x: str, tau=()) -> Fraction:
        """Optimal prover acceptance from tau: max at prover nodes, mean at verifier nodes."""
        tau = as_messages(tau)
        key = ("game", x, tau)
        if key in self._cache:
            return self._cache[key]
        if len(tau) == 0:
            check_budget(self.game_tree_size(), self.budget_bits, f"{self.name}/game tree")
        i = len(tau)
        if i == self.k:
            v = self.accept_prob(x, tau)
        elif self.owners[i] == "P":
            v = max(self.game_value(x, tau + (m,)) for m in self.prover_alphabet)
        else:
            size = self.verifier_sizes[i]
            v = sum((self.game_value(x, tau + (c,)) for c in range(size)), Fraction(0)) / size
        self._cache[key] = v
        return v

    def strategy_value(self, x: str, strategy: Callable[[tuple], Token], tau=()) -> Fraction:
        """Acceptance probability of a deterministic prover strategy."""
        tau = as_messages(tau)
        i = len(tau)
        if i == self.k:
            return self.accept_prob(x, tau)
        if self.owners[i] == "P":
            return self.strategy_value(x, strategy, tau + (strategy(tau),))
        size = self.verifier_sizes[i]
        return sum((self.strategy_value(x, strategy, tau + (c,)) for c in range(size)), Fraction(0)) / size


def measure_interactive_errors(spec: InteractiveSpec) -> ErrorProfile:
    eps_c = eps_zk = Fraction(0)
    for inst in spec.yes_instances():
        honest = spec.honest_law(inst.label)
        eps_c = max(eps_c, 1 - honest.expect(lambda t: spec.accept_prob(inst.label, t)))
        eps_zk = max(eps_zk, tv_distance(honest, spec.sim_law(inst.label)))
    eps_s = max((spec.game_value(i.label) for i in spec.no_instances()), default=Fraction(0))
    return ErrorProfile(eps_c, eps_s, eps_zk, "exact",
                        "soundness by backward induction; zero-knowledge as exact transcript TV")


def _pick_challenge_size(eps_c: Fraction, eps_s: Fraction, max_size: int = 16) -> tuple[int, int, int]:
    best = None
    for size in range(1, max_size + 1):
        nc, ns = round(eps_c * size), round(eps_s * size)
        if nc + ns > size:
            continue
        err = max(abs(Fraction(nc, size) - eps_c), abs(Fraction(ns, size) - eps_s))
        if best is None or err < best[0]:
            best = (err, size, nc, ns)
        if err == 0:
            break
    if best is None or best[0] > Fraction(1, 100):
        raise ValueError(f"targets eps_c={eps_c}, eps_s={eps_s} not reachable with <= {max_size} challenges")
    return best[1], best[2], best[3]


def build_demo_interactive(k: int, profile: ErrorProfile | tuple) -> InteractiveSpec:
    """Table-driven public-coin fixture hitting a target error profile.

    The first challenge selects a region: a free region (accept anything,
    mass eps_s), a void region (reject everything, mass eps_c) and the rest.
    When the targets sum below 1 the rest is an ideal commit/response
    protocol and Sim spends its eps_zk budget on a detectable bad commitment.
    Otherwise the rest asks for the witness in the clear, which Sim cannot
    produce, so no decider can separate yes from no.
    """
    if k not in (3, 5):
        raise ValueError("demo protocols have k in {3, 5}")
    if not isinstance(profile, ErrorProfile):
        profile = ErrorProfile(*profile)
    eps_c, eps_s, eps_zk = profile.as_tuple()
    size, n_void, n_free = _pick_challenge_size(eps_c, eps_s)
    owners = tuple("PV" * (k // 2) + "P")
    n_chal = k // 2
    instances = default_instances("w")
    yes = {"x_in"}

    def region(c: int) -> str:
        if c < n_free:
            return "free"
        if c < n_free + n_void:
            return "void"
        return "rest"

    if profile.total < 1:
        return _demo_ideal_mix(k, owners, size, n_chal, region, eps_zk, instances, yes, profile)
    return _demo_trivial_mix(k, owners, size, n_chal, region, Fraction(n_void + n_free, size), eps_zk,
                             instances, yes, profile)


_RESP = ("z0", "z1", "z2", "z3")


def _respond(prev: Token, c: int, rnd: int) -> Token:
    base = {"g0": 0, "g1": 1, "z0": 0, "z1": 1, "z2": 2, "z3": 3}[prev]
    return _RESP[(base + c + 2 * rnd + 1) % 4]


def _demo_ideal_mix(k, owners, size, n_chal, region, eps_zk, instances, yes, profile):
    alphabet = ("g0", "g1", "b") + _RESP
    dz = eps_zk.denominator
    good_cut = (1 - eps_zk) * dz

    def honest_continue(a, chals):
        out, prev = [a], a
        for j, c in enumerate(chals):
            prev = _respond(prev, c, j)
            out += [c, prev]
        return tuple(out)

    def prove(x, w, tau, r):
        if not tau:
            return ("g0", "g1")[r % 2]
        return _respond(tau[-2], tau[-1], len(tau) // 2 - 1)

    def accept(x, tau):
        reg = region(tau[1])
        if reg != "rest":
            return reg == "free"
        return x in yes and tau[0] in ("g0", "g1") and honest_continue(tau[0], tau[1::2]) == tuple(tau)

    def simulate(x, r):
        chals = []
        for _ in range(n_chal):
            chals.append(r % size)
            r //= size
        j, r = r % 2, r // 2
        if r < good_cut:
            return honest_continue(("g0", "g1")[j], chals)
        out = ["b"]
        for c in chals:
            out += [c, "z0"]
        return tuple(out)

    return InteractiveSpec(
        name=f"demo-k{k}({profile.eps_c},{profile.eps_s},{profile.eps_zk})",
        instances=instances,
        owners=owners,
        verifier_sizes=(size,),
        prover_alphabet=alphabet,
        prover_tapes=2,
        sim_tapes=size ** n_chal * 2 * dz,
        prove=prove,
        accept=accept,
        simulate=simulate,
        meta={"kind": "demo-ideal-mix", "targets": profile.as_tuple()},
    )


def _demo_trivial_mix(k, owners, size, n_chal, region, non_witness, eps_zk, instances, yes, profile):
    witness_mass = 1 - non_witness
    if eps_zk < witness_mass:
        raise ValueError("error sum >= 1 but eps_zk below the witness-branch mass")
    extra = Fraction(0) if witness_mass == 1 else (eps_zk - witness_mass) / (1 - witness_mass)
    de = extra.denominator
    alphabet = ("h", "s", "w")

    def prove(x, w, tau, r):
        if len(tau) == k - 1 and region(tau[1]) == "rest":
            return w
        return "h"

    def accept(x, tau):
        reg = region(tau[1])
        if reg != "rest":
            return reg == "free"
        return x in yes and tau[-1] == "w"

    def simulate(x, r):
        chals = []
        for _ in range(n_chal):
            chals.append(r % size)
            r //= size
        first = "s" if r < extra * de else "h"
        out = [first]
        for c in chals:
            out += [c, "h"]
        return tuple(out)

    return InteractiveSpec(
        name=f"demo-k{k}-trivial({profile.eps_c},{profile.eps_s},{profile.eps_zk})",
        instances=instances,
        owners=owners,
        verifier_sizes=(size,),
        prover_alphabet=alphabet,
        prover_tapes=1,
        sim_tapes=size ** n_chal * de,
        prove=prove,
        accept=accept,
        simulate=simulate,
        meta={"kind": "demo-trivial-mix", "targets": profile.as_tuple()},
    )


def build_planted_interactive(rho=Fraction(1, 4096), size: int = 4) -> InteractiveSpec:
    """Three-round fixture whose honest first message is very good.

    Sim opens with "good" only with probability rho; its "weak" opening is
    answered correctly on half the challenges. Under P-tilde the weak
    opening succeeds with probability 1/2 and the good one with probability 1.
    """
    rho = rat(rho)
    dr = rho.denominator
    half = size // 2

    def resp(a, c):
        return _RESP[(c + (a == "good")) % 4]

    def prove(x, w, tau, r):
        return "good" if not tau else resp(tau[0], tau[1])

    def accept(x, tau):
        return x == "x_in" and tau[2] == resp(tau[0], tau[1])

    def simulate(x, r):
        c, d = r % size, r // size
        if d < rho * dr:
            return ("good", c, resp("good", c))
        z = resp("weak", c) if c < half else resp("weak", c + 1)
        return ("weak", c, z)

    return InteractiveSpec(
        name=f"planted({rho})",
        instances=default_instances("w"),
        owners=("P", "V", "P"),
        verifier_sizes=(size,),
        prover_alphabet=("good", "weak") + _RESP,
        prover_tapes=1,
        sim_tapes=size * dr,
        prove=prove,
        accept=accept,
        simulate=simulate,
        meta={"kind": "planted", "rho": rho},
    )


def table_interactive(name, instances, owners, verifier_sizes, prover_alphabet,
                      prover_table: dict, accept_table: dict, sim_laws: dict,
                      prover_tapes: int = 1, budget_bits: int = 20) -> InteractiveSpec:
    """Interactive spec from explicit tables.

    prover_table maps (label, tape, prefix) -> message; accept_table maps
    (label, transcript) -> acceptance (missing entries reject); sim_laws maps
    label -> ExactDist over full transcripts.
    """
    sim_t = {x: d.table() for x, d in sim_laws.items()}
    sim_size = math.lcm(*(t.size for t in sim_t.values()))
    deterministic = all(rat(v) in (0, 1) for v in accept_table.values())
    return InteractiveSpec(
        name=name,
        instances=tuple(instances),
        owners=tuple(owners),
        verifier_sizes=tuple(verifier_sizes),
        prover_alphabet=tuple(prover_alphabet),
        prover_tapes=prover_tapes,
        sim_tapes=sim_size,
        prove=lambda x, w, tau, r: prover_table[(x, r, tuple(tau))],
        accept=lambda x, tau: rat(accept_table.get((x, tuple(tau)), 0)),
        simulate=lambda x, r: sim_t[x](r % sim_t[x].size),
        budget_bits=budget_bits,
        meta={"kind": "table", "deterministic_accept": deterministic},
    )


def enumerate_prefixes(spec: InteractiveSpec, length: int):
    """All prefixes of the given length over the declared alphabets."""
    spaces = []
    for i in range(length):
        spaces.append(spec.prover_alphabet if spec.owners[i] == "P" else range(spec.verifier_sizes[i]))
    return product(*spaces)
