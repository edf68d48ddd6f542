"""Config-driven experiment runner.

    zklab <subcommand> [--config PATH] [--seed N] [--mode exact|mc] [--out DIR]

Each subcommand runs one experiment; ``run`` runs the list in the config's
``experiments`` field. Outputs are ``<experiment>.json``, ``<experiment>.csv``
and ``manifest.json`` in the output directory. The exit code is 0 iff every
assertion of every requested experiment passed.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import jsonschema

from . import __version__
from .coin_transform import RoundInverter, build_private_fixture, build_two_private_rounds, publicize
from .dist import BudgetExceeded, chernoff_audit, chernoff_interval, exact_tail, rat
from .izk_engine import EngineParams, hybrid_chain, izk_gap_experiment
from .nizk_deciders import DeciderParams, nizk_gap_experiment
from .protocols import (
    build_counterexample, build_demo_interactive, build_ideal_nizk, build_planted_interactive,
    build_trivial_protocol, measure_nizk_errors,
)
from .reductions import package_dti, vote_frequency
from .reporting import (
    GAP_COLUMNS, chain_rows, dti_dict, dti_rows, gap_report_dict, gap_rows, jsonable, transform_dict,
    transform_rows, write_csv, write_json,
)
from .spec_io import load as load_spec

TOOL = "zklab"
EXPERIMENTS = ("counterexample", "nizk-gap", "izk-gap", "coin-transform", "chernoff-audit", "dti-package")

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


# ------------------------------------------------------------------ config

_RAT = {"anyOf": [{"type": "number"}, {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}]}
_RATS = {"type": "array", "items": _RAT}
_POS = {"type": "integer", "minimum": 1}


def _section(props: dict) -> dict:
    return {"type": "object", "properties": props, "additionalProperties": False}


CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "zklab lab config",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "mode": {"enum": ["exact", "mc"]},
        "out": {"type": "string"},
        "experiments": {"type": "array", "items": {"enum": list(EXPERIMENTS)}, "uniqueItems": True},
        "counterexample": _section({
            "eps_zk": _RAT, "eps_s": _RAT, "deltas": _RATS, "variant": {"enum": ["derandomized", "randomized"]},
            "p": _RAT, "n": _POS, "T": _POS, "runs": _POS,
        }),
        "nizk_gap": _section({
            "fixture": {"enum": ["counterexample", "trivial", "ideal"]}, "spec_file": {"type": "string"},
            "eps_c": _RAT, "eps_zk": _RAT, "eps_s": _RAT, "delta": _RAT,
            "variant": {"enum": ["derandomized", "randomized"]},
            "p_grid": _RATS, "n": _POS, "T": _POS, "runs": _POS,
        }),
        "izk_gap": _section({
            "fixture": {"enum": ["demo", "planted"]}, "spec_file": {"type": "string"},
            "k": {"type": "integer", "minimum": 1}, "profile": {**_RATS, "minItems": 3, "maxItems": 3},
            "rho": _RAT, "p": _RAT, "n": _POS, "p_est": _RAT, "est_trials": _POS, "ptilde_samples": _POS,
            "dist_samples": _POS, "dist_cutoff": {"type": "integer", "minimum": 0}, "runs": _POS,
            "chain_runs": {"type": "integer", "minimum": 0}, "budget_bits": _POS,
        }),
        "coin_transform": _section({
            "fixture": {"enum": ["one-round", "two-rounds"]}, "etas": _RATS, "wrong": _RAT,
        }),
        "chernoff_audit": _section({
            "trials": _POS,
            "grid": {"type": "array", "items": {
                "type": "array", "minItems": 4, "maxItems": 4,
                "prefixItems": [{"enum": ["mult-above", "mult-below", "additive"]}, _POS, _RAT, _RAT]}},
        }),
        "dti_package": _section({
            "eps_zk": _RAT, "eps_s": _RAT, "delta": _RAT, "p": _RAT, "sizes": {"type": "array", "items": _POS},
            "vote_runs": _POS,
        }),
    },
}


@dataclass
class CounterexampleConfig:
    eps_zk: Any = "1/2"
    eps_s: Any = "1/4"
    deltas: list = field(default_factory=lambda: [0, "1/1024"])
    variant: str = "derandomized"
    p: Any = 8
    n: int = 4
    T: int = 64
    runs: int = 2000


@dataclass
class NizkGapConfig:
    fixture: str = "counterexample"
    spec_file: str | None = None
    eps_c: Any = 0
    eps_zk: Any = "1/2"
    eps_s: Any = "1/4"
    delta: Any = "1/1024"
    variant: str = "derandomized"
    p_grid: list = field(default_factory=lambda: [4, 8, 16])
    n: int = 4
    T: int | None = None
    runs: int = 2000


@dataclass
class IzkGapConfig:
    fixture: str = "demo"
    spec_file: str | None = None
    k: int = 3
    profile: list = field(default_factory=lambda: [0, "1/4", "1/2"])
    rho: Any = "1/4096"
    p: Any = 8
    n: int = 4
    p_est: Any = 8
    est_trials: int | None = None
    ptilde_samples: int | None = None
    dist_samples: int | None = None
    dist_cutoff: int | None = None
    runs: int = 2000
    chain_runs: int = 0
    budget_bits: int = 20


@dataclass
class CoinTransformConfig:
    fixture: str = "one-round"
    etas: list = field(default_factory=lambda: [0, "1/64"])
    wrong: Any = "1/4"


@dataclass
class ChernoffAuditConfig:
    trials: int = 100_000
    grid: list | None = None


@dataclass
class DtiPackageConfig:
    eps_zk: Any = "1/2"
    eps_s: Any = "1/4"
    delta: Any = "1/1024"
    p: Any = 8
    sizes: list = field(default_factory=lambda: [1, 2, 4])
    vote_runs: int = 10


_SECTIONS = {
    "counterexample": CounterexampleConfig,
    "nizk_gap": NizkGapConfig,
    "izk_gap": IzkGapConfig,
    "coin_transform": CoinTransformConfig,
    "chernoff_audit": ChernoffAuditConfig,
    "dti_package": DtiPackageConfig,
}


@dataclass
class LabConfig:
    seed: int = 0
    mode: str = "exact"
    out: str = "out"
    experiments: list = field(default_factory=list)
    counterexample: CounterexampleConfig = field(default_factory=CounterexampleConfig)
    nizk_gap: NizkGapConfig = field(default_factory=NizkGapConfig)
    izk_gap: IzkGapConfig = field(default_factory=IzkGapConfig)
    coin_transform: CoinTransformConfig = field(default_factory=CoinTransformConfig)
    chernoff_audit: ChernoffAuditConfig = field(default_factory=ChernoffAuditConfig)
    dti_package: DtiPackageConfig = field(default_factory=DtiPackageConfig)

    @classmethod
    def from_dict(cls, doc: dict) -> LabConfig:
        validate_config(doc)
        kw = {k: v for k, v in doc.items() if k not in _SECTIONS}
        for name, sec in _SECTIONS.items():
            kw[name] = sec(**doc.get(name, {}))
        return cls(**kw)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replay_dict(self) -> dict:
        """Everything that determines the report bytes (the output directory does not)."""
        d = self.to_dict()
        del d["out"]
        return d

    def hash(self) -> str:
        canon = json.dumps(jsonable(self.replay_dict()), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


class ConfigError(ValueError):
    pass


def validate_config(doc: Any) -> None:
    v = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(v.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = ["config error at /" + "/".join(str(p) for p in e.absolute_path) + f": {e.message}" for e in errors]
        raise ConfigError("\n".join(lines))


def load_config(path: str | Path | None) -> LabConfig:
    if path is None:
        return LabConfig()
    path = Path(path)
    text = path.read_bytes()
    try:
        doc = json.loads(text) if path.suffix == ".json" else tomllib.loads(text.decode())
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"config error at /: cannot parse {path.name}: {e}") from e
    return LabConfig.from_dict(doc)


# ------------------------------------------------------------- experiments


@dataclass
class Outcome:
    payload: dict
    rows: list
    columns: list | None = None
    assertions: list = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: Any = None) -> None:
        self.assertions.append({"name": name, "passed": bool(ok), "detail": detail})


def _nizk_fixture(c) -> Any:
    if c.spec_file:
        return load_spec(json.loads(Path(c.spec_file).read_text()))
    if c.fixture == "trivial":
        return build_trivial_protocol(rat(c.eps_c), rat(c.eps_s), rat(c.eps_zk))
    if c.fixture == "ideal":
        return build_ideal_nizk()
    return build_counterexample(rat(c.eps_zk), rat(c.eps_s), rat(c.delta), c.variant)


def _gap_payload(result) -> dict:
    return {"spec": result.spec_name, "profile": result.profile.as_tuple(),
            "reports": [gap_report_dict(r) for r in result.reports], "bad_crs": result.bad_crs}


def exp_counterexample(cfg: LabConfig) -> Outcome:
    c = cfg.counterexample
    out = Outcome({"cells": []}, [], GAP_COLUMNS + ["delta"])
    for delta in c.deltas:
        delta = rat(delta)
        spec = build_counterexample(rat(c.eps_zk), rat(c.eps_s), delta, c.variant)
        res = nizk_gap_experiment(spec, DeciderParams(p=c.p, n=c.n, T=c.T), mode=cfg.mode, seed=cfg.seed,
                                  runs=c.runs)
        cell = _gap_payload(res)
        cell["delta"] = delta
        out.payload["cells"].append(cell)
        for r in res.reports:
            out.rows += [{**row, "delta": delta} for row in gap_rows(r)]
        by = res.by_decider()
        if cfg.mode == "exact":
            if delta == 0:
                out.check(f"ow gap is 0 at delta={delta}", by["ow"].gap == 0, by["ow"].gap)
            out.check(f"alg1 gap >= 1/5 at delta={delta}", by["alg1"].gap >= Fraction(1, 5), by["alg1"].gap)
        else:
            if delta == 0:
                ow = by["ow"]
                out.check(f"ow intervals overlap at delta={delta}",
                          ow.ci_in[0] <= ow.ci_out[1] and ow.ci_out[0] <= ow.ci_in[1], [ow.ci_in, ow.ci_out])
            out.check(f"alg1 gap interval excludes 0 at delta={delta}", by["alg1"].gap_lower > 0,
                      by["alg1"].gap_lower)
    return out


def exp_nizk_gap(cfg: LabConfig) -> Outcome:
    c = cfg.nizk_gap
    spec = _nizk_fixture(c)
    out = Outcome({"spec": spec.name, "profile": measure_nizk_errors(spec).as_tuple(), "grid": []}, [],
                  GAP_COLUMNS + ["n"])
    for p in c.p_grid:
        res = nizk_gap_experiment(spec, DeciderParams(p=p, n=c.n, T=c.T), mode=cfg.mode, seed=cfg.seed,
                                  runs=c.runs)
        out.payload["grid"].append({"p": rat(p), **_gap_payload(res)})
        for r in res.reports:
            out.rows += [{**row, "n": c.n} for row in gap_rows(r)]
        for claim in res.bad_crs:
            out.check(f"bad-crs mass within bound (p={rat(p)}, {claim['instance']})", claim["holds"],
                      {"bad_mass": claim["bad_mass"], "bound": claim["bound"]})
    return out


def exp_izk_gap(cfg: LabConfig) -> Outcome:
    c = cfg.izk_gap
    if c.spec_file:
        spec = load_spec(json.loads(Path(c.spec_file).read_text()))
    elif c.fixture == "planted":
        spec = build_planted_interactive(rat(c.rho))
    else:
        spec = build_demo_interactive(c.k, tuple(rat(v) for v in c.profile))
    params = EngineParams(p=c.p, n=c.n, p_est=c.p_est, ptilde_samples=c.ptilde_samples, est_trials=c.est_trials,
                          dist_samples=c.dist_samples, dist_cutoff=c.dist_cutoff, mode=cfg.mode,
                          budget_bits=c.budget_bits)
    rep = izk_gap_experiment(spec, params, runs=c.runs, seed=cfg.seed)
    out = Outcome({"spec": spec.name, "report": gap_report_dict(rep)}, gap_rows(rep), GAP_COLUMNS)
    if rep.extra["required_applies"]:
        out.check("alg7 gap >= 1/(2p)" + (" with interval excluding 0" if cfg.mode == "mc" else ""),
                  rep.extra["gap_ok"], {"gap": rep.gap, "gap_lower": rep.gap_lower})
    if c.chain_runs:
        chain = hybrid_chain(spec, "x_in", params, c.chain_runs, cfg.seed)
        out.payload["hybrid_chain"] = chain
        out.payload["hybrid_chain_rows"] = chain_rows(chain)
    return out


def exp_coin_transform(cfg: LabConfig) -> Outcome:
    c = cfg.coin_transform
    build = build_two_private_rounds if c.fixture == "two-rounds" else (lambda: build_private_fixture(rat(c.wrong)))
    out = Outcome({"fixture": c.fixture, "runs": []}, [])
    for eta in c.etas:
        eta = rat(eta)
        public, rep = publicize(build(), RoundInverter(eta))
        out.payload["runs"].append({"eta": eta, "public_spec": public.name, **transform_dict(rep)})
        out.rows += [{"eta": eta, **row} for row in transform_rows(rep)]
        if eta == 0:
            out.check("exact inverter preserves the error profile", all(d == 0 for d in rep.deltas.values()),
                      rep.deltas)
        else:
            out.check(f"deltas within total eta (eta={eta})", rep.within_eta, rep.deltas)
    return out


def exp_chernoff_audit(cfg: LabConfig) -> Outcome:
    c = cfg.chernoff_audit
    grid = tuple(tuple(cell) for cell in c.grid) if c.grid else None
    out = Outcome({}, [])
    if cfg.mode == "exact":
        from .dist import DEFAULT_AUDIT_GRID, chernoff_bound

        rows = []
        for kind, m, p, delta in grid or DEFAULT_AUDIT_GRID:
            p, delta = rat(p), rat(delta)
            t, b = exact_tail(kind, m, p, delta), chernoff_bound(kind, m, p, delta)
            rows.append({"kind": kind, "m": m, "p": p, "delta": delta, "exact_tail": t,
                         "exact_tail_float": float(t), "bound": b, "pass": float(t) <= b, "mode": "exact"})
    else:
        rows = chernoff_audit(grid, c.trials, cfg.seed) if grid else chernoff_audit(trials=c.trials, seed=cfg.seed)
        for r in rows:
            r["mode"] = "mc"
            r["interval_lo"], r["interval_hi"] = chernoff_interval(r["hits"], r["trials"])
    out.payload["rows"] = rows
    out.rows = rows
    for r in rows:
        out.check(f"{r['kind']} m={r['m']} p={r['p']} delta={r['delta']}", r["pass"], r["bound"])
    return out


def exp_dti_package(cfg: LabConfig) -> Outcome:
    c = cfg.dti_package
    spec = build_counterexample(rat(c.eps_zk), rat(c.eps_s), rat(c.delta))
    rec = package_dti(spec, c.p, tuple(c.sizes))
    out = Outcome(dti_dict(rec), dti_rows(rec))
    for row in rec.sizes:
        out.check(f"amplified vote correct w.p. >= 1 - 1/p at n={row['n']}", row["holds"],
                  {"vote_in": row["vote_in"], "vote_out": row["vote_out"]})
    if cfg.mode == "mc":
        from .nizk_deciders import crs_oracle

        n = c.sizes[0]
        votes = {}
        for x in ("x_in", "x_out"):
            f, ci = vote_frequency(rec, spec, crs_oracle(spec), x, n, c.vote_runs, cfg.seed)
            votes[x] = {"frequency": f, "interval": ci}
            out.rows.append({"decider": rec.decider_id, "p": rec.p, "amplification": rec.amplification, "n": n,
                             "instance": x, "vote_frequency": f, "interval_lo": ci[0], "interval_hi": ci[1],
                             "mode": "mc"})
        out.payload["seeded_votes"] = votes
    return out


RUNNERS: dict[str, Callable[[LabConfig], Outcome]] = {
    "counterexample": exp_counterexample,
    "nizk-gap": exp_nizk_gap,
    "izk-gap": exp_izk_gap,
    "coin-transform": exp_coin_transform,
    "chernoff-audit": exp_chernoff_audit,
    "dti-package": exp_dti_package,
}


# ----------------------------------------------------------------- running


def _timestamp() -> str:
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def run(cfg: LabConfig, experiments=None) -> dict:
    """Run the requested experiments, write their reports and return the manifest."""
    names = list(cfg.experiments if experiments is None else experiments)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "tool": TOOL, "version": __version__, "config_hash": cfg.hash(), "config": jsonable(cfg.replay_dict()),
        "mode": cfg.mode, "seed": cfg.seed, "started": _timestamp(), "experiments": [],
    }
    for name in names:
        entry = {"name": name, "status": "ok", "assertions": [], "outputs": []}
        try:
            res = RUNNERS[name](cfg)
        except BudgetExceeded as e:
            entry.update(status="budget-exceeded", error=str(e))
        except (ValueError, OSError) as e:
            entry.update(status="error", error=f"{type(e).__name__}: {e}")
        else:
            stem = name.replace("-", "_")
            payload = {"experiment": name, "mode": cfg.mode, "seed": cfg.seed, **res.payload,
                       "assertions": res.assertions}
            write_json(out_dir / f"{stem}.json", payload)
            write_csv(out_dir / f"{stem}.csv", res.rows, res.columns)
            entry["outputs"] = [f"{stem}.json", f"{stem}.csv"]
            entry["assertions"] = res.assertions
            if not all(a["passed"] for a in res.assertions):
                entry["status"] = "failed"
        manifest["experiments"].append(entry)
    manifest["finished"] = _timestamp()
    manifest["passed"] = all(e["status"] == "ok" for e in manifest["experiments"])
    write_json(out_dir / "manifest.json", manifest)
    return manifest


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog=TOOL, description="Run zero-knowledge decider experiments.")
    ap.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("run",) + EXPERIMENTS:
        p = sub.add_parser(name, help="run the configured experiment list" if name == "run" else f"run {name}")
        p.add_argument("--config", help="TOML or JSON config file")
        p.add_argument("--seed", type=int)
        p.add_argument("--mode", choices=["exact", "mc"])
        p.add_argument("--out", help="output directory")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        print(e, file=sys.stderr)
        return 2
    for flag in ("seed", "mode", "out"):
        v = getattr(args, flag)
        if v is not None:
            setattr(cfg, flag, v)
    if args.command != "run":
        cfg.experiments = [args.command]
    manifest = run(cfg)
    for e in manifest["experiments"]:
        failed = [a["name"] for a in e["assertions"] if not a["passed"]]
        print(f"{e['name']}: {e['status']}" + (f" ({', '.join(failed)})" if failed else "")
              + (f" [{e['error']}]" if "error" in e else ""))
    print(f"manifest: {Path(cfg.out) / 'manifest.json'}")
    return 0 if manifest["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
