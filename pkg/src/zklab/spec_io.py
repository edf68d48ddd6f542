"""JSON round-trip for protocol specs.

Every map is written as an explicit table. Random tapes appear as
lowercase hex keys padded to the tape width; tokens are JSON values with
tuples written as lists (and read back as tuples). The document layout is
fixed by NIZK_SCHEMA and INTERACTIVE_SCHEMA; ``schema_version`` is
mandatory.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import jsonschema

from .dist import rat_str, tape_bits
from .protocols import Instance, InteractiveSpec, NizkSpec, enumerate_prefixes

SCHEMA_VERSION = 1

_INSTANCES = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["label", "in_language"],
        "properties": {"label": {"type": "string"}, "in_language": {"type": "boolean"}, "witness": {}},
    },
}
_HEX_TABLE = {"type": "object", "patternProperties": {"^[0-9a-f]+$": {}}, "additionalProperties": False}
_RAT = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}

NIZK_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "zklab NIZK spec",
    "type": "object",
    "required": ["schema_version", "kind", "name", "instances", "gen_tapes", "prover_tapes", "sim_tapes",
                 "verifier_tapes", "proofs", "gen", "prove", "simulate", "verify"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"const": "nizk"},
        "name": {"type": "string"},
        "instances": _INSTANCES,
        "gen_tapes": {"type": "integer", "minimum": 1},
        "prover_tapes": {"type": "integer", "minimum": 1},
        "sim_tapes": {"type": "integer", "minimum": 1},
        "verifier_tapes": {"type": "integer", "minimum": 1},
        "budget_bits": {"type": "integer", "minimum": 1},
        "proofs": {"type": "array"},
        "gen": _HEX_TABLE,
        "prove": {"type": "array", "items": {"type": "object", "required": ["instance", "crs", "table"],
                                             "properties": {"table": _HEX_TABLE}}},
        "simulate": {"type": "object", "additionalProperties": _HEX_TABLE},
        "verify": {"type": "array", "items": {"type": "object", "required": ["instance", "crs", "proof", "table"],
                                              "properties": {"table": _HEX_TABLE}}},
    },
}

INTERACTIVE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "zklab interactive spec",
    "type": "object",
    "required": ["schema_version", "kind", "name", "instances", "owners", "verifier_sizes", "prover_alphabet",
                 "prover_tapes", "sim_tapes", "prove", "accept", "simulate"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"const": "interactive"},
        "name": {"type": "string"},
        "instances": _INSTANCES,
        "owners": {"type": "array", "items": {"enum": ["P", "V"]}},
        "verifier_sizes": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "prover_alphabet": {"type": "array"},
        "prover_tapes": {"type": "integer", "minimum": 1},
        "sim_tapes": {"type": "integer", "minimum": 1},
        "budget_bits": {"type": "integer", "minimum": 1},
        "deterministic_accept": {"type": "boolean"},
        "prove": {"type": "array", "items": {"type": "object", "required": ["instance", "tape", "table"]}},
        "accept": {"type": "array", "items": {"type": "object", "required": ["instance", "transcript", "value"],
                                              "properties": {"value": _RAT}}},
        "simulate": {"type": "object", "additionalProperties": _HEX_TABLE},
    },
}


def encode_token(t: Any) -> Any:
    if isinstance(t, tuple):
        return [encode_token(v) for v in t]
    return t


def decode_token(t: Any) -> Any:
    if isinstance(t, list):
        return tuple(decode_token(v) for v in t)
    return t


def hex_tape(r: int, size: int) -> str:
    width = max(1, (tape_bits(size) + 3) // 4)
    return f"{r:0{width}x}"


def _instances(spec) -> list[dict]:
    return [{"label": i.label, "in_language": i.in_language, "witness": encode_token(i.witness)}
            for i in spec.instances]


def _load_instances(doc) -> tuple[Instance, ...]:
    return tuple(Instance(i["label"], i["in_language"], decode_token(i.get("witness"))) for i in doc["instances"])


def dump_nizk(spec: NizkSpec) -> dict:
    crs_all = list(dict.fromkeys(list(spec.gen_law().outcomes()) +
                                 [c for i in spec.instances for c in spec.sim_crs_law(i.label).outcomes()]))
    prove = []
    for inst in spec.yes_instances():
        for crs in crs_all:
            prove.append({"instance": inst.label, "crs": encode_token(crs), "table": {
                hex_tape(r, spec.prover_tapes): encode_token(spec.prove(crs, inst.label, inst.witness, r))
                for r in range(spec.prover_tapes)}})
    verify = []
    for inst in spec.instances:
        for crs in crs_all:
            for proof in spec.proofs:
                table = {hex_tape(v, spec.verifier_tapes): 1
                         for v in range(spec.verifier_tapes) if spec.verify(crs, inst.label, proof, v)}
                if table:
                    verify.append({"instance": inst.label, "crs": encode_token(crs), "proof": encode_token(proof),
                                   "table": table})
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "nizk",
        "name": spec.name,
        "instances": _instances(spec),
        "gen_tapes": spec.gen_tapes,
        "prover_tapes": spec.prover_tapes,
        "sim_tapes": spec.sim_tapes,
        "verifier_tapes": spec.verifier_tapes,
        "budget_bits": spec.budget_bits,
        "proofs": [encode_token(p) for p in spec.proofs],
        "gen": {hex_tape(r, spec.gen_tapes): encode_token(spec.gen(r)) for r in range(spec.gen_tapes)},
        "prove": prove,
        "simulate": {i.label: {hex_tape(r, spec.sim_tapes): encode_token(spec.simulate(i.label, r))
                               for r in range(spec.sim_tapes)} for i in spec.instances},
        "verify": verify,
    }


def load_nizk(doc: dict) -> NizkSpec:
    jsonschema.validate(doc, NIZK_SCHEMA)
    gen = {int(h, 16): decode_token(v) for h, v in doc["gen"].items()}
    prove = {(e["instance"], decode_token(e["crs"]), int(h, 16)): decode_token(v)
             for e in doc["prove"] for h, v in e["table"].items()}
    sim = {x: {int(h, 16): decode_token(v) for h, v in t.items()} for x, t in doc["simulate"].items()}
    verify = {(e["instance"], decode_token(e["crs"]), decode_token(e["proof"]), int(h, 16))
              for e in doc["verify"] for h, v in e["table"].items() if v}
    return NizkSpec(
        name=doc["name"],
        instances=_load_instances(doc),
        gen_tapes=doc["gen_tapes"],
        prover_tapes=doc["prover_tapes"],
        sim_tapes=doc["sim_tapes"],
        gen=lambda r: gen[r],
        prove=lambda crs, x, w, r: prove[(x, crs, r)],
        verify=lambda crs, x, proof, v: (x, crs, proof, v) in verify,
        simulate=lambda x, r: sim[x][r],
        proofs=tuple(decode_token(p) for p in doc["proofs"]),
        verifier_tapes=doc["verifier_tapes"],
        budget_bits=doc.get("budget_bits", 20),
        meta={"kind": "loaded"},
    )


def _honest_prefixes(spec: InteractiveSpec, x: str, w, r: int) -> list[tuple[tuple, Any]]:
    out = []
    frontier = [()]
    for i, owner in enumerate(spec.owners):
        nxt = []
        for tau in frontier:
            if owner == "V":
                nxt += [tau + (c,) for c in range(spec.verifier_sizes[i])]
            else:
                m = spec.prove(x, w, tau, r)
                out.append((tau, m))
                nxt.append(tau + (m,))
        frontier = nxt
    return out


def dump_interactive(spec: InteractiveSpec) -> dict:
    prove = []
    for inst in spec.yes_instances():
        for r in range(spec.prover_tapes):
            prove.append({"instance": inst.label, "tape": hex_tape(r, spec.prover_tapes), "table": [
                [encode_token(tau), encode_token(m)] for tau, m in _honest_prefixes(spec, inst.label, inst.witness, r)]})
    accept = []
    for inst in spec.instances:
        for tau in enumerate_prefixes(spec, spec.k):
            v = spec.accept_prob(inst.label, tau)
            if v:
                accept.append({"instance": inst.label, "transcript": encode_token(tuple(tau)), "value": rat_str(v)})
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "interactive",
        "name": spec.name,
        "instances": _instances(spec),
        "owners": list(spec.owners),
        "verifier_sizes": list(spec.verifier_sizes),
        "prover_alphabet": [encode_token(a) for a in spec.prover_alphabet],
        "prover_tapes": spec.prover_tapes,
        "sim_tapes": spec.sim_tapes,
        "budget_bits": spec.budget_bits,
        "deterministic_accept": spec.deterministic_accept,
        "prove": prove,
        "accept": accept,
        "simulate": {i.label: {hex_tape(r, spec.sim_tapes): encode_token(spec.sim_transcript(i.label, r))
                               for r in range(spec.sim_tapes)} for i in spec.instances},
    }


def load_interactive(doc: dict) -> InteractiveSpec:
    jsonschema.validate(doc, INTERACTIVE_SCHEMA)
    prove = {(e["instance"], int(e["tape"], 16), decode_token(tau)): decode_token(m)
             for e in doc["prove"] for tau, m in e["table"]}
    accept = {(e["instance"], decode_token(e["transcript"])): Fraction(e["value"]) for e in doc["accept"]}
    sim = {x: {int(h, 16): decode_token(v) for h, v in t.items()} for x, t in doc["simulate"].items()}
    sizes = [s for s, o in zip(doc["verifier_sizes"], doc["owners"]) if o == "V"]
    deterministic = doc.get("deterministic_accept", True)

    def accept_fn(x, tau):
        v = accept.get((x, tuple(tau)), Fraction(0))
        return bool(v) if deterministic else v

    return InteractiveSpec(
        name=doc["name"],
        instances=_load_instances(doc),
        owners=tuple(doc["owners"]),
        verifier_sizes=tuple(sizes),
        prover_alphabet=tuple(decode_token(a) for a in doc["prover_alphabet"]),
        prover_tapes=doc["prover_tapes"],
        sim_tapes=doc["sim_tapes"],
        prove=lambda x, w, tau, r: prove[(x, r, tuple(tau))],
        accept=accept_fn,
        simulate=lambda x, r: sim[x][r],
        budget_bits=doc.get("budget_bits", 20),
        meta={"kind": "loaded", "deterministic_accept": deterministic},
    )


def dump(spec) -> dict:
    if isinstance(spec, NizkSpec):
        return dump_nizk(spec)
    if isinstance(spec, InteractiveSpec):
        return dump_interactive(spec)
    raise TypeError(f"cannot serialize {type(spec).__name__}")


def load(doc: dict):
    if "schema_version" not in doc:
        raise ValueError("spec document has no schema_version")
    if doc.get("kind") == "nizk":
        return load_nizk(doc)
    if doc.get("kind") == "interactive":
        return load_interactive(doc)
    raise ValueError(f"unknown spec kind {doc.get('kind')!r}")


def dumps(spec) -> str:
    return json.dumps(dump(spec), sort_keys=True, indent=1)


def loads(text: str):
    return load(json.loads(text))
