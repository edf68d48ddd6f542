"""Estimator-driven prover, round-wise distinguisher and decider for
public-coin interactive protocols.

The engine for a (spec, instance, oracle, params) tuple carries two views
of the malicious prover P-tilde:

* exact: Est is replaced by the true continuation value, so P-tilde's
  decision is a closed-form law over candidates (the max of S iid draws,
  first-seen within a level). ``value`` recurses this law and is the ground
  truth every Monte-Carlo test compares against.
* mc: Est is a binomial count over est_trials simulated continuations.
  When the only P-tilde calls left are in the final round and the verdict
  is deterministic, a continuation's outcome is Bernoulli(value), so the
  count is drawn as one binomial variate. Otherwise continuations are
  simulated one by one.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

import numpy as np

from .dist import (
    BudgetExceeded,
    ExactDist,
    SeedStream,
    as_stream,
    chernoff_interval,
    rat,
    sample,
    sample_indices,
)
from .extrapolation import UEOracle, make_exact_ue, prefix_sampler
from .nizk_deciders import GapReport
from .protocols import InteractiveSpec, as_messages, measure_interactive_errors

MODES = ("exact", "mc")
_INT64_SAFE = 1 << 62


class Stuck(RuntimeError):
    """Every candidate draw failed: Sim cannot extend the transcript."""


@dataclass(frozen=True)
class EngineParams:
    """Loop counts for P-tilde, Est and the distinguisher; None takes the formula default for the protocol's k."""

    p: Fraction = Fraction(8)
    n: int = 4
    p_est: Fraction | None = None
    ptilde_samples: int | None = None
    est_trials: int | None = None
    dist_samples: int | None = None
    dist_cutoff: int | None = None
    mode: str = "mc"
    budget_bits: int = 20

    def __post_init__(self):
        object.__setattr__(self, "p", rat(self.p))
        if self.p_est is not None:
            object.__setattr__(self, "p_est", rat(self.p_est))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.p <= 0 or self.n < 1:
            raise ValueError("need p > 0 and n >= 1")
        for name in ("ptilde_samples", "est_trials", "dist_samples"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.dist_cutoff is not None and self.dist_cutoff < 0:
            raise ValueError("dist_cutoff must be >= 0")

    @staticmethod
    def formulas() -> dict:
        return {
            "p_est": "256*k^2*n*p^2",
            "ptilde_samples": "16*k*n*p",
            "est_trials": "12*p_est^4",
            "dist_samples": "8*k*n*p",
            "dist_cutoff": "n",
        }

    def instantiate(self, k: int) -> EngineParams:
        p, n = self.p, self.n
        p_est = self.p_est if self.p_est is not None else 256 * k * k * n * p * p
        pick = lambda v, d: d if v is None else v
        return replace(
            self,
            p_est=p_est,
            ptilde_samples=pick(self.ptilde_samples, math.ceil(16 * k * n * p)),
            est_trials=pick(self.est_trials, math.ceil(12 * p_est ** 4)),
            dist_samples=pick(self.dist_samples, math.ceil(8 * k * n * p)),
            dist_cutoff=pick(self.dist_cutoff, n),
        )

    def echo(self, k: int) -> dict:
        out = asdict(self.instantiate(k))
        out["k"] = k
        out["formulas"] = self.formulas()
        return out


DESK_PARAMS = EngineParams(p=8, n=4, p_est=8)


@dataclass(frozen=True)
class MessageQuality:
    p_m: Fraction
    q_threshold: Fraction
    label: str
    margin: Fraction

    @property
    def okay(self) -> bool:
        return self.p_m >= self.q_threshold - self.margin

    @property
    def good(self) -> bool:
        return self.p_m >= self.q_threshold

    @property
    def very_good(self) -> bool:
        return self.p_m >= self.q_threshold + self.margin


@dataclass
class HybridRunReport:
    hybrid: int
    variant: int
    transcript: tuple | None
    verdict: int
    r_flags: list[bool]
    fired_round: int | None
    stuck: bool = False
    transcript2: tuple | None = None
    verdict2: int | None = None
    stuck2: bool = False

    def rejected_unfired(self, j: int) -> bool:
        return self.verdict == 0 and not self.r_flags[j]


def prefix_oracle(spec: InteractiveSpec) -> UEOracle:
    key = ("prefix-oracle",)
    if key not in spec._cache:
        spec._cache[key] = make_exact_ue(prefix_sampler(spec))
    return spec._cache[key]


class Engine:
    def __init__(self, spec: InteractiveSpec, x: str, oracle: UEOracle | None = None,
                 params: EngineParams = DESK_PARAMS):
        self.spec = spec
        self.x = x
        self.k = spec.k
        self.oracle = oracle if oracle is not None else prefix_oracle(spec)
        self.params = params.instantiate(spec.k)
        if self.params.mode == "mc" and self.params.est_trials > _INT64_SAFE:
            raise ValueError(f"est_trials={self.params.est_trials} is beyond Monte-Carlo reach; set p_est or est_trials")
        self._value: dict = {}
        self._cand: dict = {}
        self._alt: dict = {}
        self._decision: dict = {}

    # ------------------------------------------------------------ exact laws

    def _check_prover(self, tau: tuple) -> None:
        if len(tau) >= self.k or self.spec.owners[len(tau)] != "P":
            raise ValueError(f"prover does not send the next message after {tau!r}")

    def candidate_law(self, tau) -> ExactDist:
        """Law of the Sim prefix of length |tau|+1 that one oracle draw yields; None marks failure."""
        tau = as_messages(tau)
        if tau not in self._cand:
            i, s, spec, x = len(tau), self.spec.sim_tapes, self.spec, self.x
            law = self.oracle.law(x, tau)
            self._cand[tau] = law.map(lambda r: None if r is None else spec.sim_transcript(x, r % s)[: i + 1])
        return self._cand[tau]

    def alternative_law(self, prev) -> ExactDist:
        """Law of prev followed by the next Sim message drawn through the oracle at prev."""
        prev = as_messages(prev)
        if prev not in self._alt:
            i, s, spec, x = len(prev), self.spec.sim_tapes, self.spec, self.x
            law = self.oracle.law(x, prev)
            self._alt[prev] = law.map(lambda r: None if r is None else prev + (spec.sim_transcript(x, r % s)[i],))
        return self._alt[prev]

    def decision_law(self, tau) -> ExactDist:
        """P-tilde's next message when every Est is exact; None marks the stuck event."""
        tau = as_messages(tau)
        if tau in self._decision:
            return self._decision[tau]
        self._check_prover(tau)
        i, reps = len(tau), self.params.ptilde_samples
        mu = self.candidate_law(tau)
        fail = mu.prob(None)
        levels: dict = {}
        for c, w in mu.items():
            if c is not None:
                levels.setdefault(self.value(c), []).append((c, w))
        out: dict = {}
        below = fail
        for v in sorted(levels):
            members = levels[v]
            lw = sum((w for _, w in members), Fraction(0))
            top = below + lw
            p_max = top ** reps - below ** reps
            below = top
            for c, w in members:
                out[c[i]] = out.get(c[i], 0) + p_max * w / lw
        if fail:
            out[None] = fail ** reps
        self._decision[tau] = ExactDist(out)
        return self._decision[tau]

    def value(self, tau=()) -> Fraction:
        """Exact acceptance probability when P-tilde (exact Est) and V play on from tau."""
        tau = as_messages(tau)
        if tau in self._value:
            return self._value[tau]
        if len(self._value) >= 1 << self.params.budget_bits:
            raise BudgetExceeded(f"{self.spec.name}: exact recursion exceeds 2^{self.params.budget_bits} nodes")
        i = len(tau)
        if i == self.k:
            v = self.spec.accept_prob(self.x, tau)
        elif self.spec.owners[i] == "V":
            size = self.spec.verifier_sizes[i]
            v = sum((self.value(tau + (c,)) for c in range(size)), Fraction(0)) / size
        else:
            v = Fraction(0)
            for m, w in self.decision_law(tau).items():
                if m is not None:
                    v += w * self.value(tau + (m,))
        self._value[tau] = v
        return v

    # ------------------------------------------------------------ sampling

    def fast(self, tau: tuple) -> bool:
        """True when Est(tau) is exactly Binomial(est_trials, value(tau)) / est_trials."""
        if len(tau) == self.k:
            return True
        return self.spec.deterministic_accept and all(j == self.k for j in self.spec.prover_rounds() if j > len(tau))

    def verdict(self, tau: tuple, stream: SeedStream) -> int:
        acc = self.spec.accept_prob(self.x, tau)
        if acc.denominator == 1:
            return int(acc)
        return int(stream.randbelow(acc.denominator) < acc.numerator)

    def counts(self, tau: tuple, size: int, stream: SeedStream) -> np.ndarray:
        """size independent Est numerators (accepting continuations out of est_trials)."""
        trials = self.params.est_trials
        if self.fast(tau):
            return stream.generator().binomial(trials, float(self.value(tau)), size=size).astype(np.int64)
        return np.array([self._faithful_count(tau, stream) for _ in range(size)], dtype=np.int64)

    def _faithful_count(self, tau: tuple, stream: SeedStream) -> int:
        hits = 0
        for _ in range(self.params.est_trials):
            full = self.play(tau, stream)
            hits += 0 if full is None else self.verdict(full, stream)
        return hits

    def est(self, tau, stream: SeedStream) -> Fraction:
        tau = as_messages(tau)
        if self.params.mode == "exact":
            return self.value(tau)
        return Fraction(int(self.counts(tau, 1, stream)[0]), self.params.est_trials)

    def ptilde_next(self, tau, stream: SeedStream):
        tau = as_messages(tau)
        self._check_prover(tau)
        if self.params.mode == "exact":
            m = sample(self.decision_law(tau), stream)
            if m is None:
                raise Stuck(f"no simulated extension of {tau!r}")
            return m
        mu = self.candidate_law(tau)
        outs = mu.outcomes()
        idx = sample_indices(mu, stream, self.params.ptilde_samples)
        scores = np.full(len(idx), -1, dtype=np.int64)
        for j in np.unique(idx):
            c = outs[j]
            if c is None:
                continue
            pos = idx == j
            scores[pos] = self.counts(c, int(pos.sum()), stream)
        if scores.max() < 0:
            raise Stuck(f"no simulated extension of {tau!r}")
        return outs[idx[int(np.argmax(scores))]][len(tau)]

    def play(self, tau, stream: SeedStream) -> tuple | None:
        """Complete tau with P-tilde and V; None when P-tilde gets stuck."""
        tau = as_messages(tau)
        while len(tau) < self.k:
            i = len(tau)
            if self.spec.owners[i] == "V":
                tau += (stream.randbelow(self.spec.verifier_sizes[i]),)
            else:
                try:
                    tau += (self.ptilde_next(tau, stream),)
                except Stuck:
                    return None
        return tau

    def honest_prefix(self, i: int, stream: SeedStream) -> tuple:
        inst = self.spec.instance(self.x)
        if not inst.in_language:
            raise ValueError(f"{self.x} has no witness for the honest prover")
        r = stream.randbelow(self.spec.prover_tapes)
        tau: tuple = ()
        for j in range(i):
            if self.spec.owners[j] == "V":
                tau += (stream.randbelow(self.spec.verifier_sizes[j]),)
            else:
                tau += (self.spec.prove(self.x, inst.witness, tau, r),)
        return tau

    # ------------------------------------------------------------ distinguisher

    def distinguish(self, tau, stream: SeedStream) -> tuple[int, list[bool], int | None]:
        """Returns (bit, R flags for rounds 0..k, first fired round)."""
        tau = as_messages(tau)
        if len(tau) != self.k:
            raise ValueError("distinguisher needs a complete transcript")
        exact = self.params.mode == "exact"
        fired = None
        for i in self.spec.prover_rounds():
            own_tau, prev = tau[:i], tau[: i - 1]
            own = self.value(own_tau) if exact else int(self.counts(own_tau, 1, stream)[0])
            alt = self.alternative_law(prev)
            outs = alt.outcomes()
            idx = sample_indices(alt, stream, self.params.dist_samples)
            js, mult = np.unique(idx, return_counts=True)
            count = 0
            for j, c in zip(js, mult):
                t = outs[j]
                if t is None:
                    continue
                if exact:
                    count += int(c) if self.value(t) >= own else 0
                else:
                    count += int((self.counts(t, int(c), stream) >= own).sum())
            if count < self.params.dist_cutoff:
                fired = i
                break
        flags = [fired is not None and j >= fired for j in range(self.k + 1)]
        return int(fired is not None), flags, fired

    # ------------------------------------------------------------ classification

    def classify(self, tau, m) -> MessageQuality:
        tau = as_messages(tau)
        self._check_prover(tau)
        i = len(tau)
        k, p = self.k, self.params.p
        p_m = self.value(tau + (m,))
        mass: dict = {}
        for c, w in self.candidate_law(tau).items():
            pv = Fraction(0) if c is None else self.value(tau + (c[i],))
            mass[pv] = mass.get(pv, 0) + w
        need = 1 - 1 / (16 * k * p)
        cum = Fraction(0)
        q = None
        for pv in sorted(mass):
            cum += mass[pv]
            if cum > need:
                q = pv
                break
        margin = 2 / self.params.p_est
        if p_m >= q + margin:
            label = "very-good"
        elif p_m >= q:
            label = "good"
        elif p_m >= q - margin:
            label = "okay"
        else:
            label = "below"
        return MessageQuality(p_m, q, label, margin)

    # ------------------------------------------------------------ experiments

    def alg7(self, stream: SeedStream) -> tuple[int, bool]:
        """(verdict, stuck) of one full P-tilde / V interaction."""
        tau = self.play((), stream)
        if tau is None:
            return 0, True
        return self.verdict(tau, stream), False

    def hybrid(self, i: int, variant: int, stream: SeedStream) -> HybridRunReport:
        if not 0 <= i <= self.k:
            raise ValueError(f"hybrid index must lie in [0, {self.k}]")
        if variant not in (1, 2):
            raise ValueError("variant must be 1 or 2")
        if variant == 2 and i == 0:
            raise ValueError("variant 2 needs i >= 1")
        head = self.honest_prefix(i, stream)
        tau = self.play(head, stream)
        if tau is None:
            rep = HybridRunReport(i, variant, None, 0, [False] * (self.k + 1), None, stuck=True)
        else:
            _, flags, fired = self.distinguish(tau, stream)
            rep = HybridRunReport(i, variant, tau, self.verdict(tau, stream), flags, fired)
        if variant == 2:
            tau2 = self.play(head[: i - 1], stream)
            rep.transcript2 = tau2
            rep.stuck2 = tau2 is None
            rep.verdict2 = 0 if tau2 is None else self.verdict(tau2, stream)
        return rep


def engine_for(spec: InteractiveSpec, x: str, oracle: UEOracle | None = None,
               params: EngineParams = DESK_PARAMS) -> Engine:
    oracle = oracle if oracle is not None else prefix_oracle(spec)
    key = ("engine", id(spec), x, params.instantiate(spec.k))
    if key not in oracle.memo:
        oracle.memo[key] = Engine(spec, x, oracle, params)
    return oracle.memo[key]


def exact_success(spec: InteractiveSpec, x: str, tau=(), params: EngineParams = DESK_PARAMS,
                  oracle: UEOracle | None = None) -> Fraction:
    return engine_for(spec, x, oracle, params).value(tau)


def est(spec: InteractiveSpec, x: str, tau, params: EngineParams = DESK_PARAMS, seed: int | SeedStream = 0,
        oracle: UEOracle | None = None) -> Fraction:
    return engine_for(spec, x, oracle, params).est(tau, as_stream(seed))


def classify_message(spec: InteractiveSpec, x: str, tau, m, params: EngineParams = DESK_PARAMS,
                     oracle: UEOracle | None = None) -> MessageQuality:
    return engine_for(spec, x, oracle, params).classify(tau, m)


def p_tilde_next(spec: InteractiveSpec, x: str, tau, oracle: UEOracle | None = None,
                 params: EngineParams = DESK_PARAMS, seed: int | SeedStream = 0):
    return engine_for(spec, x, oracle, params).ptilde_next(tau, as_stream(seed))


def izk_distinguisher(spec: InteractiveSpec, x: str, tau, oracle: UEOracle | None = None,
                      params: EngineParams = DESK_PARAMS, seed: int | SeedStream = 0):
    return engine_for(spec, x, oracle, params).distinguish(tau, as_stream(seed))


def hybrid_transcript(spec: InteractiveSpec, x: str, i: int, variant: int, params: EngineParams = DESK_PARAMS,
                      seed: int | SeedStream = 0, oracle: UEOracle | None = None) -> HybridRunReport:
    return engine_for(spec, x, oracle, params).hybrid(i, variant, as_stream(seed))


def alg7_decider(spec: InteractiveSpec, x: str, oracle: UEOracle | None = None,
                 params: EngineParams = DESK_PARAMS, seed: int | SeedStream = 0) -> int:
    return engine_for(spec, x, oracle, params).alg7(as_stream(seed))[0]


def izk_gap_experiment(spec: InteractiveSpec, params: EngineParams = DESK_PARAMS, x_in: str = "x_in",
                       x_out: str = "x_out", runs: int = 10_000, seed: int = 0,
                       oracle: UEOracle | None = None) -> GapReport:
    """Acceptance of the decider on a yes and a no instance, with the required-gap check."""
    if not spec.in_language(x_in) or spec.in_language(x_out):
        raise ValueError("x_in must be a yes-instance and x_out a no-instance")
    profile = measure_interactive_errors(spec)
    p = params.p
    applies = profile.total < 1 - 1 / p
    required = 1 / (2 * p) if applies else None
    echo = params.echo(spec.k)
    echo["oracle"] = (oracle or prefix_oracle(spec)).describe()
    extra = {"profile": profile.as_tuple(), "required_gap": required, "required_applies": applies}
    if params.mode == "exact":
        a = engine_for(spec, x_in, oracle, params).value(())
        b = engine_for(spec, x_out, oracle, params).value(())
        extra["gap_ok"] = (a - b >= required) if applies else None
        return GapReport("alg7", x_in, x_out, a, b, "exact", None, echo, extra=extra)
    root = SeedStream(seed)
    hits, stuck = {}, {}
    for x in (x_in, x_out):
        eng, s = engine_for(spec, x, oracle, params), root.spawn()
        h = st = 0
        for _ in range(runs):
            bit, was_stuck = eng.alg7(s.spawn())
            h += bit
            st += was_stuck
        hits[x], stuck[x] = h, st
    rep = GapReport("alg7", x_in, x_out, Fraction(hits[x_in], runs), Fraction(hits[x_out], runs), "mc", seed, echo,
                    runs, chernoff_interval(hits[x_in], runs), chernoff_interval(hits[x_out], runs), extra)
    extra["stuck_in"], extra["stuck_out"] = stuck[x_in], stuck[x_out]
    extra["gap_ok"] = (rep.gap >= required and rep.gap_lower > 0) if applies else None
    return rep


def hybrid_chain(spec: InteractiveSpec, x: str, params: EngineParams = DESK_PARAMS, runs: int = 500,
                 seed: int = 0, oracle: UEOracle | None = None) -> list[dict]:
    """Per-round frequencies of the events in the hybrid argument, with slack columns.

    For each i in 1..k: A = Pr_{H1(i-1)}[reject and not R(i-1)], B = Pr_{H1(i)}[reject
    and not R(i)], C = Pr_{H2(i)}[tau' rejected and not R(i)], D = Pr_{H2(i)}[R(i) but not
    R(i-1)]. The per-round inequalities are A <= C + D and C <= B + 1/(4kp).
    """
    eng = engine_for(spec, x, oracle, params)
    k, p = spec.k, params.p
    root = SeedStream(seed)
    h1 = {}
    for i in range(k + 1):
        s = root.spawn()
        h1[i] = [eng.hybrid(i, 1, s.spawn()) for _ in range(runs)]
    rows = []
    for i in range(1, k + 1):
        s = root.spawn()
        h2 = [eng.hybrid(i, 2, s.spawn()) for _ in range(runs)]
        a = sum(r.rejected_unfired(i - 1) for r in h1[i - 1])
        b = sum(r.rejected_unfired(i) for r in h1[i])
        c = sum(r.verdict2 == 0 and not r.r_flags[i] for r in h2)
        d = sum(r.r_flags[i] and not r.r_flags[i - 1] for r in h2)
        slack = Fraction(1) / (4 * k * p)
        rows.append({
            "i": i, "runs": runs,
            "A": Fraction(a, runs), "B": Fraction(b, runs), "C": Fraction(c, runs), "D": Fraction(d, runs),
            "term": slack,
            "split_slack": Fraction(c + d - a, runs),
            "swap_slack": Fraction(b - c, runs) + slack,
            "step_slack": Fraction(b + d - a, runs) + slack,
            "halfwidth": chernoff_interval(0, runs)[1],
        })
    return rows
