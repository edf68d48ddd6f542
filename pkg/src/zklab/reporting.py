"""Deterministic JSON and CSV writers for experiment outputs.

Exact rationals are written as "num/den" strings with a float column
next to them. Every CSV row carries the mode it was produced in.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .dist import rat_str

GAP_COLUMNS = [
    "decider", "instance", "in_language", "accept_exact", "accept_float", "mode", "seed", "T", "p",
    "interval_lo", "interval_hi", "hybrid_index", "variant", "fired_round",
]


def jsonable(v: Any) -> Any:
    if isinstance(v, Fraction):
        return rat_str(v)
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return v if v == v else None
    if dataclasses.is_dataclass(v) and not isinstance(v, type):
        return {f.name: jsonable(getattr(v, f.name)) for f in dataclasses.fields(v) if not f.name.startswith("_")}
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if hasattr(v, "item"):
        return jsonable(v.item())
    return repr(v)


def dumps_json(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path: Path, obj: Any) -> Path:
    path = Path(path)
    path.write_text(dumps_json(obj))
    return path


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return rat_str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(rows: Iterable[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({c: _cell(row.get(c)) for c in columns})
    return buf.getvalue()


def write_csv(path: Path, rows: Iterable[dict], columns: list[str] | None = None) -> Path:
    rows = list(rows)
    if columns is None:
        columns = list(dict.fromkeys(c for r in rows for c in r))
        if "mode" not in columns:
            columns.append("mode")
    path = Path(path)
    path.write_text(csv_text(rows, columns))
    return path


def gap_rows(report, in_language: dict | None = None) -> list[dict]:
    """Two rows (one per instance) for a GapReport."""
    params = report.params or {}
    T = params.get("T", params.get("est_trials"))
    rows = []
    for x, acc, ci, yes in ((report.x_in, report.accept_in, report.ci_in, True),
                            (report.x_out, report.accept_out, report.ci_out, False)):
        if in_language is not None:
            yes = in_language[x]
        rows.append({
            "decider": report.decider, "instance": x, "in_language": yes,
            "accept_exact": acc, "accept_float": float(acc), "mode": report.mode, "seed": report.seed,
            "T": T, "p": params.get("p"),
            "interval_lo": ci[0] if ci else None, "interval_hi": ci[1] if ci else None,
        })
    return rows


def gap_report_dict(report) -> dict:
    return {
        "decider": report.decider, "x_in": report.x_in, "x_out": report.x_out,
        "accept_in": report.accept_in, "accept_in_float": float(report.accept_in),
        "accept_out": report.accept_out, "accept_out_float": float(report.accept_out),
        "gap": report.gap, "gap_float": float(report.gap), "gap_lower": report.gap_lower,
        "mode": report.mode, "seed": report.seed, "runs": report.runs, "ci_in": report.ci_in,
        "ci_out": report.ci_out, "params": report.params, "extra": report.extra,
    }


def hybrid_run_rows(runs, instance: str, in_language: bool, seed: int | None, params: dict) -> list[dict]:
    """GapReport-shaped rows for individual hybrid runs."""
    out = []
    for r in runs:
        out.append({
            "decider": "hybrid", "instance": instance, "in_language": in_language,
            "accept_exact": Fraction(1 - r.verdict) if r.verdict is not None else None,
            "accept_float": float(1 - r.verdict) if r.verdict is not None else None,
            "mode": "mc", "seed": seed, "T": params.get("est_trials"), "p": params.get("p"),
            "hybrid_index": r.hybrid, "variant": r.variant, "fired_round": r.fired_round,
        })
    return out


def chain_rows(rows: list[dict], mode: str = "mc") -> list[dict]:
    out = []
    for r in rows:
        row = dict(r)
        row["mode"] = mode
        for key in ("A", "B", "C", "D", "split_slack", "swap_slack", "step_slack"):
            row[key + "_float"] = float(r[key])
        out.append(row)
    return out


def transform_dict(report) -> dict:
    d = report.as_dict()
    d["rows"] = [{**row, **{k + "_float": float(row[k]) for k in ("tv", "eps_c", "eps_s", "eps_zk")}}
                 for row in report.rows]
    d["within_budget"] = report.within_budget
    return d


def transform_rows(report, mode: str = "exact") -> list[dict]:
    return [{"hybrid": r["hybrid"], "tv": r["tv"], "tv_float": float(r["tv"]), "eps_c": r["eps_c"],
             "eps_s": r["eps_s"], "eps_zk": r["eps_zk"], "mode": mode} for r in report.rows]


def dti_dict(rec) -> dict:
    d = rec.as_dict()
    d["sizes"] = [{**row, "gap_float": float(row["gap"])} for row in rec.sizes]
    return d


def dti_rows(rec, mode: str = "exact") -> list[dict]:
    return [{"decider": rec.decider_id, "p": rec.p, "amplification": rec.amplification, "n": r["n"], "T": r["T"],
             "accept_in": r["accept_in"], "accept_out": r["accept_out"], "gap": r["gap"],
             "gap_float": float(r["gap"]), "vote_in": r["vote_in"], "vote_out": r["vote_out"],
             "holds": r["holds"], "mode": mode} for r in rec.sizes]
