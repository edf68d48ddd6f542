"""Private-coin to public-coin transformation with exact inverters.

A PrivateCoinSpec lists round kinds:

    P   prover message
    V   public uniform verifier message
    Vp  private verifier message c = V_j(x, tau, r) from the hidden tape r
    H1  message (c, a): a is an inverter sample for c, ignored downstream
    H2  message (c, r): r revealed, downstream steps use an inverter sample a
    H3  message u (uniform): r is read off u, c is derived, downstream uses a

Downstream computations only ever see the effective transcript, where each
verifier round is projected to its c. The verifier's hidden state is tracked
as an exact law over tapes, which is a function of the effective transcript:
conditioning on c at Vp/H1 rounds, and replacement by the inverter's answer
law at H2/H3 rounds. Exact errors of every stage follow from that law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable

from .dist import (
    EmptyPreimage,
    ExactDist,
    SeedStream,
    as_stream,
    check_budget,
    rat,
    sample,
    tv_distance,
)
from .protocols import (
    ErrorProfile,
    Instance,
    InteractiveSpec,
    Token,
    _InstanceLookup,
    _instances,
    default_instances,
)

KINDS = ("P", "V", "Vp", "H1", "H2", "H3")
PRIVATE = ("Vp", "H1", "H2")
_STEP_FROM = {1: "Vp", 2: "H1", 3: "H2"}
_STEP_TO = {1: "H1", 2: "H2", 3: "H3"}


@dataclass(eq=False)
class PrivateCoinSpec(_InstanceLookup):
    name: str
    instances: tuple[Instance, ...]
    kinds: tuple[str, ...]
    verifier_sizes: tuple[int, ...]
    tape_size: int
    next_message: dict[int, Callable[[str, tuple, int], Token]]
    prover_alphabet: tuple
    prover_tapes: int
    prove: Callable[[str, Any, tuple, int], Token]
    accept: Callable[[str, tuple, int], bool]
    sim_tapes: int
    simulate: Callable[[str, int], tuple]
    etas: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    budget_bits: int = 20
    meta: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.instances = _instances(self.instances)
        self.kinds = tuple(self.kinds)
        if any(kd not in KINDS for kd in self.kinds):
            raise ValueError(f"round kinds must be among {KINDS}")
        owners = ["P" if kd == "P" else "V" for kd in self.kinds]
        if any(a == b for a, b in zip(owners, owners[1:])):
            raise ValueError("prover and verifier rounds must alternate")
        self.verifier_sizes = tuple(self.verifier_sizes)
        if len(self.verifier_sizes) != len(self.kinds):
            raise ValueError("verifier_sizes needs one entry per round (0 where unused)")
        for j, kd in enumerate(self.kinds):
            if kd == "V" and self.verifier_sizes[j] < 1:
                raise ValueError(f"public round {j + 1} needs a size")
            if kd in PRIVATE + ("H3",) and j not in self.next_message:
                raise ValueError(f"private round {j + 1} needs a next-message map")
        check_budget(self.tape_size, self.budget_bits, f"{self.name}/verifier tape")

    # ---------------------------------------------------------------- shape

    @property
    def k(self) -> int:
        return len(self.kinds)

    @property
    def t(self) -> int:
        """Leading uniform verifier messages (public rounds before the first private one)."""
        first = next((j for j, kd in enumerate(self.kinds) if kd in PRIVATE), self.k)
        return sum(1 for kd in self.kinds[:first] if kd in ("V", "H3"))

    def is_public_coin(self) -> bool:
        return not any(kd in PRIVATE for kd in self.kinds)

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    # ---------------------------------------------------------------- state

    def state_law(self, x: str, eff: tuple) -> ExactDist:
        """Law of the hidden tape used downstream after the effective prefix eff."""
        eff = tuple(eff)

        def build():
            if not eff:
                return ExactDist.uniform(range(self.tape_size))
            j = len(eff) - 1
            prev = self.state_law(x, eff[:-1])
            kd = self.kinds[j]
            if kd in ("Vp", "H1"):
                return self._posterior(x, eff[:-1], j, prev, eff[-1])
            if kd in ("H2", "H3"):
                return self.inverter_law(x, eff[:-1], j, eff[-1])
            return prev

        return self._memo(("state", x, eff), build)

    def _posterior(self, x, prefix, j, prior: ExactDist, c) -> ExactDist:
        v = self.next_message[j]
        return _condition_on(prior, lambda r: v(x, prefix, r) == c)

    def message_law(self, x: str, prefix: tuple, j: int) -> ExactDist:
        """Law of c = V_j(x, prefix, r) under the current state."""
        v = self.next_message[j]
        return self._memo(("cl", x, prefix), lambda: self.state_law(x, prefix).map(lambda r: v(x, prefix, r)))

    def inverter_law(self, x: str, prefix: tuple, j: int, c) -> ExactDist:
        """Answer law of the round-j inverter on (prefix, c): posterior, mixed with the prior by eta."""
        def build():
            prior = self.state_law(x, prefix)
            post = self._posterior(x, prefix, j, prior, c)
            eta = rat(self.etas.get(j, 0))
            if not eta:
                return post
            out: dict = {}
            for d, w in ((post, 1 - eta), (prior, eta)):
                for r, q in d.items():
                    out[r] = out.get(r, 0) + w * q
            return ExactDist(out)

        return self._memo(("inv", x, tuple(prefix), c), build)

    def table_for(self, x: str, prefix: tuple, j: int):
        return self.state_law(x, prefix).table()

    # ---------------------------------------------------------------- steps

    def verifier_step(self, x: str, eff: tuple, j: int) -> list[tuple[Token, Token, Fraction]]:
        """(observed message, effective message, probability) for verifier round j after eff."""
        kd = self.kinds[j]
        if kd == "V":
            size = self.verifier_sizes[j]
            return [(c, c, Fraction(1, size)) for c in range(size)]
        v = self.next_message[j]
        if kd == "Vp":
            return [(c, c, w) for c, w in self.message_law(x, eff, j).items()]
        if kd == "H1":
            out = []
            for c, w in self.message_law(x, eff, j).items():
                out += [((c, a), c, w * q) for a, q in self.inverter_law(x, eff, j, c).items()]
            return out
        if kd == "H2":
            return [((v(x, eff, r), r), v(x, eff, r), w) for r, w in self.state_law(x, eff).items()]
        size = self.tables[j]
        tab = self.table_for(x, eff, j)
        return [(u, v(x, eff, tab(u % tab.size)), Fraction(1, size)) for u in range(size)]

    def effective(self, x: str, obs) -> tuple:
        eff: tuple = ()
        for j, m in enumerate(obs):
            kd = self.kinds[j]
            if kd in ("H1", "H2"):
                m = m[0]
            elif kd == "H3":
                tab = self.table_for(x, eff, j)
                m = self.next_message[j](x, eff, tab(m % tab.size))
            eff += (m,)
        return eff

    def accept_prob(self, x: str, obs) -> Fraction:
        eff = self.effective(x, obs)
        return self._memo(("acc", x, eff), lambda: self.state_law(x, eff).expect(
            lambda r: int(bool(self.accept(x, eff, r)))))

    # ---------------------------------------------------------------- laws

    def honest_law(self, x: str) -> ExactDist:
        """Law of observed honest transcripts, each paired with nothing else (verdict via accept_prob)."""
        inst = self.instance(x)
        if not inst.in_language:
            raise ValueError(f"{x} has no witness")

        def build():
            out: dict = {}
            for rp in range(self.prover_tapes):
                frontier = [((), (), Fraction(1, self.prover_tapes))]
                for j, kd in enumerate(self.kinds):
                    nxt = []
                    for obs, eff, w in frontier:
                        if kd == "P":
                            m = self.prove(x, inst.witness, eff, rp)
                            nxt.append((obs + (m,), eff + (m,), w))
                        else:
                            nxt += [(obs + (o,), eff + (e,), w * q) for o, e, q in self.verifier_step(x, eff, j)]
                    frontier = nxt
                for obs, _, w in frontier:
                    out[obs] = out.get(obs, 0) + w
            return ExactDist(out)

        return self._memo(("honest", x), build)

    def base_sim_law(self, x: str) -> ExactDist:
        return self._memo(("bsim", x), lambda: ExactDist.from_counts(
            _count(tuple(self.simulate(x, s)) for s in range(self.sim_tapes))))

    def sim_law(self, x: str) -> ExactDist:
        """Simulator output in this stage's observed format, pushed forward from the effective simulator."""
        def build():
            out: dict = {}
            for eff, w in self.base_sim_law(x).items():
                frontier = [((), w)]
                for j, kd in enumerate(self.kinds):
                    c = eff[j]
                    pre = eff[:j]
                    if kd in ("P", "V", "Vp"):
                        frontier = [(o + (c,), q) for o, q in frontier]
                        continue
                    ans = self.inverter_law(x, pre, j, c)
                    if kd in ("H1", "H2"):
                        frontier = [(o + ((c, a),), q * qa) for o, q in frontier for a, qa in ans.items()]
                        continue
                    tab = self.table_for(x, pre, j)
                    size = self.tables[j]
                    step = []
                    for a, qa in ans.items():
                        us = [u for u in range(size) if tab(u % tab.size) == a]
                        step += [(u, qa / len(us)) for u in us]
                    frontier = [(o + (u,), q * qu) for o, q in frontier for u, qu in step]
                for o, q in frontier:
                    out[o] = out.get(o, 0) + q
            return ExactDist(out)

        return self._memo(("sim", x), build)

    def game_value(self, x: str, obs=(), eff=()) -> Fraction:
        """Best prover acceptance from the observed prefix (prover sees observed messages only)."""
        obs, eff = tuple(obs), tuple(eff)
        key = ("game", x, obs)
        if key in self._cache:
            return self._cache[key]
        j = len(obs)
        if j == self.k:
            v = self.state_law(x, eff).expect(lambda r: int(bool(self.accept(x, eff, r))))
        elif self.kinds[j] == "P":
            v = max(self.game_value(x, obs + (m,), eff + (m,)) for m in self.prover_alphabet)
        else:
            v = sum((q * self.game_value(x, obs + (o,), eff + (e,)) for o, e, q in self.verifier_step(x, eff, j)),
                    Fraction(0))
        self._cache[key] = v
        return v

    def errors(self) -> ErrorProfile:
        eps_c = eps_zk = Fraction(0)
        for inst in self.yes_instances():
            h = self.honest_law(inst.label)
            eps_c = max(eps_c, 1 - h.expect(lambda o: self.accept_prob(inst.label, o)))
            eps_zk = max(eps_zk, tv_distance(h, self.sim_law(inst.label)))
        eps_s = max((self.game_value(i.label) for i in self.no_instances()), default=Fraction(0))
        return ErrorProfile(eps_c, eps_s, eps_zk, "exact", f"stage kinds {''.join(self.kinds)}")

    def project(self, x: str, obs, keep_tape: bool) -> tuple:
        """Common format across stages: c per verifier round, optionally paired with the shown tape."""
        out, eff = [], ()
        for j, m in enumerate(obs):
            kd = self.kinds[j]
            if kd in ("P", "V"):
                e = m
                shown = m
            elif kd == "Vp":
                e, shown = m, (m, None)
            elif kd in ("H1", "H2"):
                e, shown = m[0], m
            else:
                tab = self.table_for(x, eff, j)
                r = tab(m % tab.size)
                e = self.next_message[j](x, eff, r)
                shown = (e, r)
            out.append(shown if keep_tape else e)
            eff += (e,)
        return tuple(out)

    def reachable_prefixes(self, x: str, length: int) -> list[tuple]:
        frontier = [()]
        for j in range(length):
            kd = self.kinds[j]
            nxt = []
            for eff in frontier:
                if kd == "P":
                    nxt += [eff + (m,) for m in self.prover_alphabet]
                elif kd == "V":
                    nxt += [eff + (c,) for c in range(self.verifier_sizes[j])]
                else:
                    nxt += [eff + (c,) for c in self.message_law(x, eff, j).outcomes()]
            frontier = nxt
        return frontier


def _condition_on(d: ExactDist, pred) -> ExactDist:
    kept = [(o, w) for o, w in d.items() if pred(o)]
    total = sum((w for _, w in kept), Fraction(0))
    if not total:
        raise EmptyPreimage("no tape produces this message")
    return ExactDist({o: w / total for o, w in kept})


def _count(it) -> dict:
    out: dict = {}
    for v in it:
        out[v] = out.get(v, 0) + 1
    return out


# ------------------------------------------------------------ inverters


@dataclass(frozen=True)
class RoundInverter:
    """Inverter quality for one private round: eta = 0 is the exact distributional inverter."""

    eta: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "eta", rat(self.eta))
        if not 0 <= self.eta <= 1:
            raise ValueError("eta must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class BoundInverter:
    """Inverter for f(r) = V_j(x, a, r) at a fixed prefix a."""

    spec: PrivateCoinSpec
    x: str
    prefix: tuple
    round: int
    eta: Fraction = Fraction(0)

    def law(self, y) -> ExactDist:
        if self.eta:
            s = replace_etas(self.spec, {self.round: self.eta})
        else:
            s = self.spec
        return s.inverter_law(self.x, self.prefix, self.round, y)

    def __call__(self, y, seed: int | SeedStream = 0) -> int:
        return sample(self.law(y), as_stream(seed))


def replace_etas(spec: PrivateCoinSpec, etas: dict) -> PrivateCoinSpec:
    return replace(spec, etas={**spec.etas, **etas}, _cache={})


def _next_private_round(spec: PrivateCoinSpec) -> int | None:
    return next((j for j, kd in enumerate(spec.kinds) if kd in PRIVATE), None)


def exact_distributional_inverter(spec: PrivateCoinSpec, a: tuple, x: str = "x_in") -> BoundInverter:
    """Exact inverter for the first private verifier message after prefix a."""
    a = tuple(a)
    j = len(a)
    if j >= spec.k or spec.kinds[j] not in PRIVATE:
        raise ValueError(f"round {j + 1} is not a private verifier round")
    check_budget(spec.tape_size, spec.budget_bits, f"{spec.name}/round {j + 1} inverter")
    return BoundInverter(spec, x, a, j)


def inverter_joint_tv(inv: BoundInverter) -> Fraction:
    """TV between (V(a, r), r) and (V(a, r), A(a, V(a, r))) for r drawn from the state law."""
    spec, x, a, j = inv.spec, inv.x, inv.prefix, inv.round
    v = spec.next_message[j]
    state = spec.state_law(x, a)
    real = state.map(lambda r: (v(x, a, r), r))
    out: dict = {}
    for c, w in state.map(lambda r: v(x, a, r)).items():
        for r, q in inv.law(c).items():
            out[(c, r)] = out.get((c, r), 0) + w * q
    return tv_distance(real, ExactDist(out))


# ------------------------------------------------------------ hybrids


def hybrid_step(spec: PrivateCoinSpec, inverter: RoundInverter | None, which: int) -> PrivateCoinSpec:
    """Advance the first private verifier round by one hybrid (1, 2, 3 in order)."""
    if which not in _STEP_FROM:
        raise ValueError("which must be 1, 2 or 3")
    j = _next_private_round(spec)
    if j is None:
        raise ValueError("no private verifier round left to transform")
    if spec.kinds[j] != _STEP_FROM[which]:
        raise ValueError(f"round {j + 1} is at stage {spec.kinds[j]}; step {which} needs {_STEP_FROM[which]}")
    kinds = spec.kinds[:j] + (_STEP_TO[which],) + spec.kinds[j + 1:]
    etas = dict(spec.etas)
    if which == 1:
        check_budget(spec.tape_size, spec.budget_bits, f"{spec.name}/round {j + 1} inverter")
        etas[j] = (inverter or RoundInverter()).eta
    out = replace(spec, kinds=kinds, etas=etas, _cache={}, name=f"{spec.name}>{j + 1}.{which}")
    if which == 3:
        sizes = {spec.table_for(i.label, eff, j).size
                 for i in spec.instances for eff in spec.reachable_prefixes(i.label, j)}
        size = math.lcm(*sizes)
        check_budget(size, spec.budget_bits, f"{spec.name}/round {j + 1} public coin")
        out.tables = {**spec.tables, j: size}
        out.verifier_sizes = spec.verifier_sizes[:j] + (size,) + spec.verifier_sizes[j + 1:]
    return out


def to_interactive(spec: PrivateCoinSpec) -> InteractiveSpec:
    """Public-coin view of a spec whose verifier rounds are all V or H3."""
    if not spec.is_public_coin():
        raise ValueError("spec still has private verifier rounds")
    owners = tuple("P" if kd == "P" else "V" for kd in spec.kinds)
    sizes = tuple(spec.verifier_sizes[j] for j, o in enumerate(owners) if o == "V")
    sim_tabs = {i.label: spec.sim_law(i.label).table() for i in spec.instances}
    sim_size = math.lcm(*(t.size for t in sim_tabs.values()))
    check_budget(sim_size, spec.budget_bits + 8, f"{spec.name}/tabulated simulator")
    deterministic = "H3" not in spec.kinds

    def prove(x, w, tau, r):
        return spec.prove(x, w, spec.effective(x, tau), r)

    def accept(x, tau):
        return spec.accept_prob(x, tau)

    def simulate(x, r):
        t = sim_tabs[x]
        return t(r % t.size)

    out = InteractiveSpec(
        name=f"public[{spec.name}]",
        instances=spec.instances,
        owners=owners,
        verifier_sizes=sizes if sizes else (1,),
        prover_alphabet=spec.prover_alphabet,
        prover_tapes=spec.prover_tapes,
        sim_tapes=sim_size,
        prove=prove,
        accept=accept,
        simulate=simulate,
        budget_bits=spec.budget_bits + 8,
        meta={"kind": "publicized", "deterministic_accept": deterministic, "stage": spec},
    )
    # the tape table realizes the stage's law exactly, so skip re-enumerating it
    for x, t in sim_tabs.items():
        out._cache[("sim", x)] = spec.sim_law(x)
    return out


# ------------------------------------------------------------ reports


@dataclass
class TransformReport:
    before: ErrorProfile
    after: ErrorProfile
    rows: list[dict]
    total_eta: Fraction
    q_budget: Fraction | None = None

    @property
    def deltas(self) -> dict:
        return {
            "eps_c": self.after.eps_c - self.before.eps_c,
            "eps_s": self.after.eps_s - self.before.eps_s,
            "eps_zk": self.after.eps_zk - self.before.eps_zk,
        }

    @property
    def within_eta(self) -> bool:
        return all(abs(d) <= self.total_eta for d in self.deltas.values())

    @property
    def within_budget(self) -> bool | None:
        if self.q_budget is None:
            return None
        return all(abs(d) <= 1 / self.q_budget for d in self.deltas.values())

    def as_dict(self) -> dict:
        return {
            "before": self.before.as_tuple(), "after": self.after.as_tuple(), "deltas": self.deltas,
            "total_eta": self.total_eta, "q_budget": self.q_budget, "within_eta": self.within_eta,
            "rows": self.rows,
        }


def _stage_tv(a: PrivateCoinSpec, b: PrivateCoinSpec, xs, keep_tape: bool) -> tuple[Fraction, Fraction]:
    honest = sim = Fraction(0)
    for x in xs:
        if a.in_language(x):
            honest = max(honest, tv_distance(a.honest_law(x).map(lambda o: a.project(x, o, keep_tape)),
                                             b.honest_law(x).map(lambda o: b.project(x, o, keep_tape))))
        sim = max(sim, tv_distance(a.sim_law(x).map(lambda o: a.project(x, o, keep_tape)),
                                   b.sim_law(x).map(lambda o: b.project(x, o, keep_tape))))
    return honest, sim


def _row(label: str, prev: PrivateCoinSpec, cur: PrivateCoinSpec, keep_tape: bool) -> dict:
    xs = [i.label for i in cur.instances]
    tv_h, tv_s = _stage_tv(prev, cur, xs, keep_tape)
    e = cur.errors()
    return {"hybrid": label, "tv": max(tv_h, tv_s), "tv_honest": tv_h, "tv_sim": tv_s,
            "eps_c": e.eps_c, "eps_s": e.eps_s, "eps_zk": e.eps_zk}


def _as_stage(spec) -> PrivateCoinSpec:
    if isinstance(spec, InteractiveSpec):
        stage = spec.meta.get("stage")
        if stage is None:
            raise ValueError("interactive spec does not carry its private-coin stage")
        return stage
    return spec


def transform_fidelity(before, after, xs=None) -> TransformReport:
    """Exact transcript TVs (projected to effective messages) and error profiles before and after."""
    b, a = _as_stage(before), _as_stage(after)
    xs = [i.label for i in b.instances] if xs is None else list(xs)
    tv_h, tv_s = _stage_tv(b, a, xs, keep_tape=False)
    eb, ea = b.errors(), a.errors()
    total = sum((rat(v) for v in a.etas.values()), Fraction(0))
    row = {"hybrid": "end-to-end", "tv": max(tv_h, tv_s), "tv_honest": tv_h, "tv_sim": tv_s,
           "eps_c": ea.eps_c, "eps_s": ea.eps_s, "eps_zk": ea.eps_zk}
    return TransformReport(eb, ea, [row], total)


def publicize(spec: PrivateCoinSpec, inverter_factory: Callable[[int], RoundInverter] | RoundInverter | None = None,
              q_budget=None) -> tuple[InteractiveSpec, TransformReport]:
    """Run hybrids 1-3 on every private round in order; returns the public-coin spec and the per-hybrid report."""
    if inverter_factory is None:
        factory = lambda j: RoundInverter()
    elif isinstance(inverter_factory, RoundInverter):
        factory = lambda j: inverter_factory
    else:
        factory = inverter_factory
    before = spec.errors()
    rows = [{"hybrid": "original", "tv": Fraction(0), "tv_honest": Fraction(0), "tv_sim": Fraction(0),
             "eps_c": before.eps_c, "eps_s": before.eps_s, "eps_zk": before.eps_zk}]
    cur = spec
    total = Fraction(0)
    while (j := _next_private_round(cur)) is not None:
        try:
            inv = factory(j)
        except Exception as e:
            raise ValueError(f"round {j + 1}: inverter construction failed: {e}") from e
        total += inv.eta
        for which in (1, 2, 3):
            try:
                nxt = hybrid_step(cur, inv, which)
            except ValueError as e:
                raise ValueError(f"round {j + 1}, hybrid {which}: {e}") from e
            row = _row(f"round {j + 1} hybrid {which}", cur, nxt, keep_tape=which > 1)
            row["eta"] = inv.eta
            rows.append(row)
            cur = nxt
    public = to_interactive(cur)
    report = TransformReport(before, cur.errors(), rows, total, None if q_budget is None else rat(q_budget))
    return public, report


# ------------------------------------------------------------ fixtures


def _resp(a: int, c: int) -> int:
    return (3 * a + c + 1) % 4


def build_private_fixture(wrong: Fraction = Fraction(1, 4)) -> PrivateCoinSpec:
    """Three rounds (P, private V, P) over an 8-value verifier tape.

    The challenge c = ((r + a) mod 8) >> 1 hides the tape's low bit h.
    Yes-instances accept the response to (a, c) unless c = 3 and h = 1;
    no-instances accept only when c < 2 and the prover guessed h. The
    simulator answers wrongly with probability `wrong`. Errors:
    (1/8, 1/4, wrong).
    """
    wrong = rat(wrong)
    dw = wrong.denominator
    size = 8

    def challenge(x, tau, r):
        return ((r + tau[0]) % size) >> 1

    def prove(x, w, tau, r):
        return r if not tau else _resp(tau[0], tau[1])

    def accept(x, tau, r):
        a, c, z = tau
        h = r & 1
        if x == "x_in":
            return z == _resp(a, c) and not (c == 3 and h == 1)
        return c < 2 and z == h

    def simulate(x, s):
        a, s = s % size, s // size
        c, s = s % 4, s // 4
        z = _resp(a, c) if s >= wrong * dw else (_resp(a, c) + 1) % 4
        return (a, c, z)

    return PrivateCoinSpec(
        name="private-k3",
        instances=default_instances("w"),
        kinds=("P", "Vp", "P"),
        verifier_sizes=(0, 0, 0),
        tape_size=size,
        next_message={1: challenge},
        prover_alphabet=tuple(range(size)),
        prover_tapes=size,
        prove=prove,
        accept=accept,
        sim_tapes=size * 4 * dw,
        simulate=simulate,
        meta={"targets": (Fraction(1, 8), Fraction(1, 4), wrong)},
    )


def build_two_private_rounds() -> PrivateCoinSpec:
    """Five rounds (P, Vp, P, Vp, P) sharing one 4-value tape, so the second inversion works on a posterior."""
    size = 4

    def first(x, tau, r):
        return (r ^ tau[0]) & 1

    def second(x, tau, r):
        return ((r >> 1) + tau[2]) % 2

    def prove(x, w, tau, r):
        if len(tau) == 0:
            return r % 2
        if len(tau) == 2:
            return tau[1]
        return (tau[3] + tau[0]) % 2

    def accept(x, tau, r):
        ok = tau[4] == (tau[3] + tau[0]) % 2
        if x == "x_in":
            return ok
        return ok and r == 0

    def simulate(x, s):
        a, c1, c2 = s % 2, (s >> 1) % 2, (s >> 2) % 2
        return (a, c1, c1, c2, (c2 + a) % 2)

    return PrivateCoinSpec(
        name="private-k5",
        instances=default_instances("w"),
        kinds=("P", "Vp", "P", "Vp", "P"),
        verifier_sizes=(0,) * 5,
        tape_size=size,
        next_message={1: first, 3: second},
        prover_alphabet=(0, 1),
        prover_tapes=2,
        prove=prove,
        accept=accept,
        sim_tapes=8,
        simulate=simulate,
    )


def public_as_private(spec: InteractiveSpec) -> PrivateCoinSpec:
    """Wrap a public-coin spec (deterministic accept) as a stage with no private rounds."""
    kinds = tuple("P" if o == "P" else "V" for o in spec.owners)
    return PrivateCoinSpec(
        name=f"wrapped[{spec.name}]",
        instances=spec.instances,
        kinds=kinds,
        verifier_sizes=spec.verifier_sizes,
        tape_size=1,
        next_message={},
        prover_alphabet=spec.prover_alphabet,
        prover_tapes=spec.prover_tapes,
        prove=spec.prove,
        accept=lambda x, tau, r: bool(spec.accept_prob(x, tau)),
        sim_tapes=spec.sim_tapes,
        simulate=spec.simulate,
    )
