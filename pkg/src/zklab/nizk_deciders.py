"""Deciders built from a NIZK and a UE oracle on its crs sampler.

Every decider comes in two forms: a seeded single run returning a bit, and
an exact acceptance probability computed by enumerating the oracle's
conditional law. The exact forms drive the acceptance tests; the seeded
runs are cross-checked against them.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .dist import (
    ExactDist,
    SeedStream,
    as_stream,
    binomial_cdf,
    chernoff_bound,
    chernoff_interval,
    rat,
    sample,
)
from .extrapolation import UEOracle, make_exact_ue, nizk_crs_sampler
from .protocols import ErrorProfile, NizkSpec, measure_nizk_errors

DECIDERS = ("ow", "chk", "alg1")


@dataclass(frozen=True)
class DeciderParams:
    """Loop counts and thresholds; None fields take the formula defaults."""

    p: Fraction = Fraction(8)
    n: int = 4
    T: int | None = None
    bad: Fraction | None = None
    good: Fraction | None = None
    cutoff: Fraction | None = None
    dist_reps: int | None = None
    eps_s: Fraction | None = None

    def __post_init__(self):
        p = rat(self.p)
        object.__setattr__(self, "p", p)
        defaults = {
            "T": math.ceil(20 * self.n * p),
            "bad": 1 / (20 * p),
            "good": 1 / (10 * p),
            "cutoff": Fraction(3, 2) * self.n,
            "dist_reps": math.ceil(20 * self.n * p),
        }
        for k, v in defaults.items():
            cur = getattr(self, k)
            if cur is None:
                object.__setattr__(self, k, v)
            elif k in ("bad", "good", "cutoff"):
                object.__setattr__(self, k, rat(cur))
        if self.eps_s is not None:
            object.__setattr__(self, "eps_s", rat(self.eps_s))
        if self.T < 1 or not self.bad < self.good:
            raise ValueError("need T >= 1 and bad threshold < good threshold")

    def formulas(self) -> dict:
        return {"T": "20*n*p", "bad": "1/(20p)", "good": "1/(10p)", "cutoff": "1.5n", "dist_reps": "20*n*p"}

    def echo(self) -> dict:
        out = {k: v for k, v in asdict(self).items()}
        out["formulas"] = self.formulas()
        return out


def crs_oracle(spec: NizkSpec) -> UEOracle:
    return make_exact_ue(nizk_crs_sampler(spec))


# ----------------------------------------------------------------- exact


def p_crs(spec: NizkSpec, oracle: UEOracle, x: str, crs) -> Fraction:
    """Probability that one reverse-sampled simulated proof is accepted against crs."""
    key = ("p_crs", id(spec), x, crs)
    cache = oracle.memo
    if key not in cache:
        law = oracle.law(x, crs)
        cache[key] = law.expect(
            lambda r: 0 if r is None else spec.accept_prob(crs, x, spec.simulate(x, r)[1]))
    return cache[key]


def chk_passes(spec: NizkSpec, x: str, crs, eps_s: Fraction) -> bool:
    """Crs check: reject when Pr_Sim[crs] / Pr_Gen[crs] exceeds 1/sqrt(eps_s)."""
    pg = spec.gen_law().prob(crs)
    if pg == 0:
        return False
    ratio = spec.sim_crs_law(x).prob(crs) / pg
    return ratio * ratio * eps_s <= 1


def _eps_s(spec: NizkSpec, params: DeciderParams) -> Fraction:
    return params.eps_s if params.eps_s is not None else measure_nizk_errors(spec).eps_s


def ow_accept_prob(spec: NizkSpec, oracle: UEOracle, x: str) -> Fraction:
    return spec.gen_law().expect(lambda crs: p_crs(spec, oracle, x, crs))


def chk_accept_prob(spec: NizkSpec, oracle: UEOracle, x: str, params: DeciderParams) -> Fraction:
    eps_s = _eps_s(spec, params)
    return spec.gen_law().expect(
        lambda crs: p_crs(spec, oracle, x, crs) if chk_passes(spec, x, crs, eps_s) else 0)


def alg1_accept_prob(spec: NizkSpec, oracle: UEOracle, x: str, params: DeciderParams) -> Fraction:
    return spec.gen_law().expect(lambda crs: 1 - (1 - p_crs(spec, oracle, x, crs)) ** params.T)


def accept_prob(decider: str, spec: NizkSpec, oracle: UEOracle, x: str, params: DeciderParams) -> Fraction:
    if decider == "ow":
        return ow_accept_prob(spec, oracle, x)
    if decider == "chk":
        return chk_accept_prob(spec, oracle, x, params)
    if decider == "alg1":
        return alg1_accept_prob(spec, oracle, x, params)
    raise ValueError(f"unknown decider {decider!r}")


def crs_badness(spec: NizkSpec, oracle: UEOracle, x: str, params: DeciderParams) -> dict:
    """crs -> (p_crs, class) over every crs Gen can output."""
    out = {}
    for crs in spec.gen_law():
        pc = p_crs(spec, oracle, x, crs)
        cls = "bad" if pc <= params.bad else "good" if pc >= params.good else "middle"
        out[crs] = (pc, cls)
    return out


def bad_mass(spec: NizkSpec, oracle: UEOracle, x: str, params: DeciderParams) -> Fraction:
    table = crs_badness(spec, oracle, x, params)
    return spec.gen_law().mass(lambda crs: table[crs][1] == "bad")


def bad_crs_check(spec: NizkSpec, oracle: UEOracle, x: str, params: DeciderParams,
                  profile: ErrorProfile | None = None) -> dict:
    """Pr_Gen[crs bad] against eps_zk + eps_c + 1/(4p)."""
    profile = profile or measure_nizk_errors(spec)
    mass = bad_mass(spec, oracle, x, params)
    bound = profile.eps_zk + profile.eps_c + 1 / (4 * params.p)
    return {"instance": x, "p": params.p, "bad_mass": mass, "bound": bound, "holds": mass <= bound}


# -------------------------------------------------------------- seeded runs


def _sim_proof_accepts(spec, oracle, x, crs, r, stream) -> bool:
    if r is None:
        return False
    proof = spec.simulate(x, r)[1]
    v = stream.randbelow(spec.verifier_tapes) if spec.verifier_tapes > 1 else 0
    return bool(spec.verify(crs, x, proof, v))


def ow_decider(spec: NizkSpec, oracle: UEOracle, x: str, seed: int | SeedStream = 0) -> int:
    s = as_stream(seed)
    crs = sample(spec.gen_law(), s)
    return int(_sim_proof_accepts(spec, oracle, x, crs, oracle.draw(x, crs, s), s))


def chk_decider(spec: NizkSpec, oracle: UEOracle, x: str, params: DeciderParams,
                seed: int | SeedStream = 0) -> int:
    s = as_stream(seed)
    crs = sample(spec.gen_law(), s)
    if not chk_passes(spec, x, crs, _eps_s(spec, params)):
        return 0
    return int(_sim_proof_accepts(spec, oracle, x, crs, oracle.draw(x, crs, s), s))


def alg1_decider(spec: NizkSpec, oracle: UEOracle, x: str, params: DeciderParams,
                 seed: int | SeedStream = 0) -> int:
    s = as_stream(seed)
    crs = sample(spec.gen_law(), s)
    tapes = oracle.draw_many(x, crs, s, params.T)
    for r in tapes:
        if _sim_proof_accepts(spec, oracle, x, crs, None if r < 0 else int(r), s):
            return 1
    return 0


def run_decider(decider: str, spec, oracle, x, params, seed) -> int:
    if decider == "ow":
        return ow_decider(spec, oracle, x, seed)
    if decider == "chk":
        return chk_decider(spec, oracle, x, params, seed)
    return alg1_decider(spec, oracle, x, params, seed)


# ------------------------------------------------------------ distinguisher


def alg2_distinguisher(spec: NizkSpec, oracle: UEOracle, x: str, pair, params: DeciderParams,
                       seed: int | SeedStream = 0) -> int:
    """1 iff the given pair is accepted and few reverse-sampled proofs are."""
    s = as_stream(seed)
    crs, proof = pair
    count = 0
    for r in oracle.draw_many(x, crs, s, params.dist_reps):
        count += _sim_proof_accepts(spec, oracle, x, crs, None if r < 0 else int(r), s)
    if count > params.cutoff:
        return 0
    v = s.randbelow(spec.verifier_tapes) if spec.verifier_tapes > 1 else 0
    return int(bool(spec.verify(crs, x, proof, v)))


def alg2_output_prob(spec: NizkSpec, oracle: UEOracle, x: str, pair, params: DeciderParams) -> Fraction:
    crs, proof = pair
    acc = spec.accept_prob(crs, x, proof)
    if acc == 0:
        return Fraction(0)
    return acc * binomial_cdf(params.cutoff, params.dist_reps, p_crs(spec, oracle, x, crs))


def alg2_advantage(spec: NizkSpec, oracle: UEOracle, x: str, params: DeciderParams) -> dict:
    """Exact output probabilities on real and simulated pairs, with the bound terms."""
    cache: dict = {}

    def out(pair):
        if pair not in cache:
            cache[pair] = alg2_output_prob(spec, oracle, x, pair, params)
        return cache[pair]

    real = spec.real_law(x).expect(out)
    sim = spec.sim_law(x).expect(out)
    profile = measure_nizk_errors(spec)
    # tail of Bin(reps, good) at the cutoff and above it, per the two Chernoff directions
    dev = 1 - params.cutoff / (params.dist_reps * params.good)
    below = chernoff_bound("mult-below", params.dist_reps, params.good, dev) if 0 < dev < 1 else 1.0
    return {
        "real": real,
        "sim": sim,
        "advantage": real - sim,
        "eps_zk": profile.eps_zk,
        "sim_bound": float(params.good) + below,
        "bad_mass": bad_mass(spec, oracle, x, params),
        "eps_c": profile.eps_c,
    }


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class GapReport:
    decider: str
    x_in: str
    x_out: str
    accept_in: Fraction
    accept_out: Fraction
    mode: str
    seed: int | None = None
    params: dict = field(default_factory=dict)
    runs: int | None = None
    ci_in: tuple[float, float] | None = None
    ci_out: tuple[float, float] | None = None
    extra: dict = field(default_factory=dict)

    @property
    def gap(self) -> Fraction:
        return self.accept_in - self.accept_out

    @property
    def gap_lower(self) -> float | None:
        if self.ci_in is None:
            return None
        return self.ci_in[0] - self.ci_out[1]


@dataclass
class NizkGapResult:
    spec_name: str
    profile: ErrorProfile
    reports: list[GapReport]
    bad_crs: list[dict]

    def by_decider(self) -> dict:
        return {r.decider: r for r in self.reports}


def nizk_gap_experiment(spec: NizkSpec, params: DeciderParams, x_in: str = "x_in", x_out: str = "x_out",
                        mode: str = "exact", seed: int = 0, runs: int = 2000,
                        oracle: UEOracle | None = None, deciders=DECIDERS) -> NizkGapResult:
    if not spec.in_language(x_in) or spec.in_language(x_out):
        raise ValueError("x_in must be a yes-instance and x_out a no-instance")
    oracle = oracle or crs_oracle(spec)
    profile = measure_nizk_errors(spec)
    if params.eps_s is None:
        params = DeciderParams(**{**asdict(params), "eps_s": profile.eps_s})
    echo = params.echo()
    echo["oracle"] = oracle.describe()
    reports = []
    for d in deciders:
        if mode == "exact":
            a = accept_prob(d, spec, oracle, x_in, params)
            b = accept_prob(d, spec, oracle, x_out, params)
            reports.append(GapReport(d, x_in, x_out, a, b, "exact", None, echo))
        elif mode == "mc":
            root = SeedStream(seed)
            hits = {}
            for x in (x_in, x_out):
                stream = root.spawn()
                hits[x] = sum(run_decider(d, spec, oracle, x, params, stream.spawn()) for _ in range(runs))
            reports.append(GapReport(
                d, x_in, x_out, Fraction(hits[x_in], runs), Fraction(hits[x_out], runs), "mc", seed, echo, runs,
                chernoff_interval(hits[x_in], runs), chernoff_interval(hits[x_out], runs)))
        else:
            raise ValueError(f"unknown mode {mode!r}")
    claims = [bad_crs_check(spec, oracle, i.label, params, profile) for i in spec.yes_instances()]
    return NizkGapResult(spec.name, profile, reports, claims)


def literal_constant_sizes(p, n_max: int = 4096) -> dict:
    """Smallest n at which each Chernoff slack term of the bad-crs argument is within its budget.

    The terms are exp(-n/16) and exp(-n/12) (each against 1/(20p)) and
    exp(-n) for the repetition loop (against 1/(4p)).
    """
    p = float(rat(p))
    targets = {
        "sim-side exp(-n/16) <= 1/(20p)": lambda n: math.exp(-n / 16) <= 1 / (20 * p),
        "real-side exp(-n/12) <= 1/(20p)": lambda n: math.exp(-n / 12) <= 1 / (20 * p),
        "loop exp(-n) <= 1/(4p)": lambda n: math.exp(-n) <= 1 / (4 * p),
    }
    return {name: next((n for n in range(1, n_max + 1) if ok(n)), None) for name, ok in targets.items()}


def eta_sweep(spec: NizkSpec, params: DeciderParams, etas, x_in: str = "x_in", x_out: str = "x_out",
              seed: int = 0) -> list[dict]:
    """Exact Algorithm 1 acceptance under perturbed oracles."""
    from .extrapolation import perturb_ue

    base = crs_oracle(spec)
    a0 = alg1_accept_prob(spec, base, x_in, params)
    b0 = alg1_accept_prob(spec, base, x_out, params)
    rows = []
    for eta in etas:
        eta = rat(eta)
        o = perturb_ue(base, eta, seed) if eta else base
        a = alg1_accept_prob(spec, o, x_in, params)
        b = alg1_accept_prob(spec, o, x_out, params)
        rows.append({"eta": eta, "accept_in": a, "accept_out": b, "gap": a - b,
                     "shift_in": abs(a - a0), "shift_out": abs(b - b0), "budget": params.T * eta,
                     "within_budget": abs(a - a0) <= params.T * eta and abs(b - b0) <= params.T * eta})
    return rows
